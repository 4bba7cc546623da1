import importlib.util
import logging
import threading
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

from config import Config
from corpus import term_corpus
from errors import SuiteError
from syntax import Term, pretty

logger = logging.getLogger(__name__)

# 报告中最多保留的失败与标记条目
MAX_DETAILS = 20


@dataclass
class ItemResult:
    """单个检查项的结果"""
    checked: int = 0
    failures: List[Dict[str, Any]] = field(default_factory=list)
    flagged: List[Dict[str, Any]] = field(default_factory=list)

    def fail(self, **detail):
        self.failures.append(detail)

    def flag(self, **detail):
        self.flagged.append(detail)


@dataclass
class SuiteReport:
    name: str
    seed: int
    checked: int = 0
    failure_count: int = 0
    flagged_count: int = 0
    failures: List[Dict[str, Any]] = field(default_factory=list)
    flagged: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failure_count == 0

    def absorb(self, item: ItemResult):
        self.checked += item.checked
        self.failure_count += len(item.failures)
        self.flagged_count += len(item.flagged)
        self.failures.extend(item.failures[:MAX_DETAILS - len(self.failures)])
        self.flagged.extend(item.flagged[:MAX_DETAILS - len(self.flagged)])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.name,
            "seed": self.seed,
            "ok": self.ok,
            "checked": self.checked,
            "failures": self.failure_count,
            "flagged": self.flagged_count,
            "failure_details": self.failures,
            "flagged_details": self.flagged,
        }


@dataclass
class SuiteContext:
    """套件运行时使用的配置取值与工作线程池"""
    seed: int = 0
    count: int = 300
    max_size: int = 9
    k: int = 0
    fuel: int = 5000
    lhe_fuel: int = 10000
    depth: int = 3
    exhaust_fuel: int = 2000
    kmax: int = 6
    workers: int = 4
    ks: Sequence[int] = (0, 1, 2, 3)
    terms: Optional[List[Term]] = None
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @classmethod
    def from_config(cls, cfg: Config, **overrides) -> "SuiteContext":
        values = {
            "seed": cfg.IAM_SEED,
            "count": cfg.IAM_CORPUS_SIZE,
            "max_size": cfg.IAM_MAX_TERM_SIZE,
            "k": cfg.IAM_K,
            "fuel": cfg.IAM_FUEL,
            "lhe_fuel": cfg.IAM_LHE_FUEL,
            "depth": cfg.IAM_EXHAUST_DEPTH,
            "exhaust_fuel": cfg.IAM_EXHAUST_FUEL,
            "kmax": cfg.IAM_KMAX,
            "workers": cfg.IAM_WORKERS,
        }
        known = {f.name for f in fields(cls)}
        values.update({key: value for key, value in overrides.items() if key in known and value is not None})
        return cls(**values)

    def corpus(self) -> List[Term]:
        with self._lock:
            if self.terms is None:
                self.terms = term_corpus(self.seed, self.count, self.max_size)
            return self.terms

    def map(self, fn: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
        """
        在线程池中对每一项调用 fn，结果按原顺序返回

        Args:
            fn: 处理函数
            items: 待处理项

        Returns:
            List: 与 items 一一对应
        """
        indexed = list(enumerate(items))
        if self.workers <= 1 or len(indexed) <= 1:
            return [fn(item) for _, item in indexed]
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            futures = [(index, executor.submit(fn, item)) for index, item in indexed]
            results = [(index, future.result()) for index, future in futures]
        results.sort(key=lambda pair: pair[0])
        return [result for _, result in results]


class SuiteBase(ABC):
    """检查套件基类，suites/ 目录中的套件必须继承此类"""

    @property
    @abstractmethod
    def name(self) -> str:
        """套件名称"""
        pass

    @property
    @abstractmethod
    def version(self) -> str:
        """套件版本"""
        pass

    @property
    @abstractmethod
    def description(self) -> str:
        """套件描述"""
        pass

    def items(self, context: SuiteContext) -> List[Any]:
        """待检查的项，默认为项集合"""
        return context.corpus()

    @abstractmethod
    def check(self, context: SuiteContext, item: Any) -> ItemResult:
        """
        检查单个项

        Args:
            context: 套件上下文
            item: 待检查项

        Returns:
            ItemResult: 检查结果
        """
        pass

    def run(self, context: SuiteContext) -> SuiteReport:
        """对全部项运行检查并汇总"""
        report = SuiteReport(self.name, context.seed)
        for result in context.map(lambda item: self._safe_check(context, item), self.items(context)):
            report.absorb(result)
        return report

    def _safe_check(self, context: SuiteContext, item: Any) -> ItemResult:
        try:
            return self.check(context, item)
        except Exception as e:
            logger.error(f"套件 {self.name} 检查失败: {describe_item(item)}, 错误: {e}", exc_info=True)
            result = ItemResult(checked=1)
            result.fail(item=describe_item(item), error=str(e))
            return result

    def on_load(self):
        """套件加载时调用"""
        logger.info(f"套件 {self.name} (v{self.version}) 加载成功")

    def on_unload(self):
        """套件卸载时调用"""
        logger.info(f"套件 {self.name} (v{self.version}) 卸载")


def describe_item(item: Any) -> str:
    term = getattr(item, "term", item)
    try:
        return pretty(term)
    except Exception:
        return repr(item)


class SuiteLoader:
    """套件加载器，从目录中发现并加载检查套件"""

    def __init__(self, suites_dir: str = "suites"):
        path = Path(suites_dir)
        if not path.is_absolute() and not path.exists():
            path = Path(__file__).parent / path
        self.suites_dir = path
        self.suites: Dict[str, SuiteBase] = {}

    def load_all(self):
        """加载所有套件"""
        if not self.suites_dir.exists():
            logger.warning(f"套件目录不存在: {self.suites_dir}")
            return

        for file_path in sorted(self.suites_dir.glob("*.py")):
            if file_path.name.startswith("_"):
                continue
            self.load_suite(str(file_path))

        logger.info(f"已加载 {len(self.suites)} 个套件")

    def _find_suite_class(self, module) -> Optional[type]:
        for attr_name in dir(module):
            attr = getattr(module, attr_name)
            if isinstance(attr, type) and issubclass(attr, SuiteBase) and attr is not SuiteBase:
                return attr
        return None

    def load_suite(self, file_path: str) -> bool:
        """
        加载单个套件

        Args:
            file_path: 套件文件路径

        Returns:
            bool: 是否加载成功
        """
        try:
            module_name = f"suites.{Path(file_path).stem}"
            spec = importlib.util.spec_from_file_location(module_name, file_path)
            if spec is None or spec.loader is None:
                logger.error(f"无法加载套件模块: {file_path}")
                return False

            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)

            suite_class = self._find_suite_class(module)
            if suite_class is None:
                logger.warning(f"未找到套件类: {file_path}")
                return False

            suite = suite_class()
            if suite.name in self.suites:
                logger.warning(f"套件 {suite.name} 已存在，将被替换")
                self.unload_suite(suite.name)

            suite.on_load()
            self.suites[suite.name] = suite
            return True

        except Exception as e:
            logger.error(f"加载套件失败: {file_path}, 错误: {e}", exc_info=True)
            return False

    def unload_suite(self, name: str):
        """按名称卸载套件"""
        suite = self.suites.pop(name, None)
        if suite is not None:
            suite.on_unload()

    def get_suite(self, name: str) -> Optional[SuiteBase]:
        return self.suites.get(name)

    def list_suites(self) -> List[Dict[str, str]]:
        """
        列出所有套件

        Returns:
            List[Dict]: 套件列表
        """
        return [
            {
                "name": suite.name,
                "version": suite.version,
                "description": suite.description
            }
            for suite in self.suites.values()
        ]

    def run_suite(self, name: str, context: SuiteContext) -> SuiteReport:
        """
        运行一个套件

        Raises:
            SuiteError: 套件不存在
        """
        suite = self.get_suite(name)
        if suite is None:
            raise SuiteError(f"未知套件: {name}，可用套件: {', '.join(sorted(self.suites))}")
        logger.info(f"运行套件 {name} (seed={context.seed})")
        report = suite.run(context)
        logger.info(f"套件 {name} 完成: 检查 {report.checked} 项，失败 {report.failure_count}，标记 {report.flagged_count}")
        return report
