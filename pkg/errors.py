"""
λ-IAM 异常定义

机器运行中的违例（Violation）以返回值表示；只有 run_length 无处承载违例，
抛出 MachineViolation。这里只放调用方需要捕获的错误。
"""
from typing import Optional


class IamError(Exception):
    """所有 λ-IAM 错误的基类"""


class TermSyntaxError(IamError, ValueError):
    """项的语法错误，携带出错位置"""

    def __init__(self, text: str, position: int, line: int = 1, column: int = 1,
                 detail: Optional[str] = None):
        self.text = text
        self.position = position
        self.line = line
        self.column = column
        self.detail = detail
        message = f"语法错误: 第 {line} 行第 {column} 列 (偏移 {position})"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class PathError(IamError, KeyError):
    """路径无法在项中解析，或外层位置越界"""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "路径错误"


class InvalidRedex(IamError, ValueError):
    """给定的 redex 不在项的线性头部 redex 集合中"""


class FuelExhausted(IamError):
    """严格模式下燃料耗尽"""

    def __init__(self, fuel: int, what: str = "归约"):
        self.fuel = fuel
        super().__init__(f"{what}在 {fuel} 步内未结束")


class GoiMismatch(IamError):
    """微观规则无法作用于编码后的栈"""


class SearchExhausted(IamError):
    """改进图在给定步数内无法闭合"""

    def __init__(self, bound: int, side: str):
        self.bound = bound
        self.side = side
        super().__init__(f"{side} 图在 {bound} 步内未闭合")


class SuiteError(IamError):
    """检查套件不存在或加载失败"""


class MachineViolation(IamError):
    """从初始状态出发的运行出现违例；说明机器实现有误"""

    def __init__(self, description: str, state=None):
        self.description = description
        self.state = state
        super().__init__(f"机器违例: {description}")
