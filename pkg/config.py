import os
import logging
from dataclasses import dataclass
from logging.handlers import RotatingFileHandler

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


@dataclass
class Config:
    # 机器配置
    IAM_K: int = int(os.getenv("IAM_K", "0"))
    IAM_FUEL: int = int(os.getenv("IAM_FUEL", "5000"))
    IAM_LHE_FUEL: int = int(os.getenv("IAM_LHE_FUEL", "10000"))

    # 项集合配置
    IAM_SEED: int = int(os.getenv("IAM_SEED", "0"))
    IAM_CORPUS_SIZE: int = int(os.getenv("IAM_CORPUS_SIZE", "300"))
    IAM_MAX_TERM_SIZE: int = int(os.getenv("IAM_MAX_TERM_SIZE", "9"))

    # 检查套件配置
    IAM_EXHAUST_DEPTH: int = int(os.getenv("IAM_EXHAUST_DEPTH", "3"))
    IAM_EXHAUST_FUEL: int = int(os.getenv("IAM_EXHAUST_FUEL", "2000"))
    IAM_KMAX: int = int(os.getenv("IAM_KMAX", "6"))
    IAM_WORKERS: int = int(os.getenv("IAM_WORKERS", "4"))
    IAM_SUITES_DIR: str = os.getenv("IAM_SUITES_DIR", "suites")

    # 日志配置
    LOG_FILE: str = os.getenv("LOG_FILE", "lambda_iam.log")
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # HTTP 服务配置
    API_HOST: str = os.getenv("API_HOST", "127.0.0.1")
    API_PORT: int = int(os.getenv("API_PORT", "8000"))

    def validate(self):
        """验证配置取值"""
        invalid_fields = []
        for field in ("IAM_FUEL", "IAM_LHE_FUEL", "IAM_EXHAUST_FUEL"):
            if getattr(self, field) <= 0:
                invalid_fields.append(field)
        for field in ("IAM_K", "IAM_KMAX", "IAM_EXHAUST_DEPTH", "IAM_SEED"):
            if getattr(self, field) < 0:
                invalid_fields.append(field)
        for field in ("IAM_CORPUS_SIZE", "IAM_MAX_TERM_SIZE", "IAM_WORKERS"):
            if getattr(self, field) < 1:
                invalid_fields.append(field)

        if invalid_fields:
            raise ValueError(f"配置取值无效: {', '.join(invalid_fields)}")

        # 提示可疑配置
        if self.IAM_EXHAUST_DEPTH == 0:
            logger.warning("IAM_EXHAUST_DEPTH 为 0，可穷尽性检查只运行一层测试")
        if self.IAM_K > self.IAM_KMAX:
            logger.warning(f"IAM_K ({self.IAM_K}) 大于 IAM_KMAX ({self.IAM_KMAX})")


_logging_ready = False


def setup_logging(log_file: str = None, level: str = None):
    """
    配置根日志记录器（只生效一次）

    Args:
        log_file: 日志文件路径，为空字符串时只输出到控制台
        level: 日志级别名
    """
    global _logging_ready
    if _logging_ready:
        return
    log_file = config.LOG_FILE if log_file is None else log_file
    level = getattr(logging, (level or config.LOG_LEVEL).upper(), logging.INFO)

    root = logging.getLogger()
    root.setLevel(level)
    formatter = logging.Formatter(LOG_FORMAT)

    if log_file:
        # 确保日志目录存在
        log_dir = os.path.dirname(log_file)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        # 轮转文件处理器（每个文件最大 10MB，保留 5 个备份）
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=10*1024*1024,
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    # 同时输出到控制台
    console_handler = logging.StreamHandler()
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    root.addHandler(console_handler)
    _logging_ready = True


config = Config()
