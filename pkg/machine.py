"""
λ-IAM 状态机

令牌（log 与 tape）在不可变的代码上移动，代码本身从不改写。
状态为 (代码, 路径, log, tape, 方向)；log 与 tape 以元组表示，下标 0 为栈顶。
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

from errors import MachineViolation
from syntax import (
    Abs,
    App,
    ESub,
    Path,
    Position,
    Step,
    Term,
    Var,
    child,
    level_of,
    path_text,
    path_to_json,
    pretty,
    pretty_context,
    subterm_at,
)

logger = logging.getLogger(__name__)


class Direction(str, Enum):
    DOWN = "down"
    UP = "up"

    def flip(self) -> "Direction":
        return Direction.UP if self is Direction.DOWN else Direction.DOWN

    def flipped(self, times: int) -> "Direction":
        return self if times % 2 == 0 else self.flip()

    @property
    def arrow(self) -> str:
        return "↓" if self is Direction.DOWN else "↑"


class Marker(str, Enum):
    """tape 上的 𝗉 标记"""
    P = "p"


@dataclass(frozen=True)
class LoggedPosition:
    """
    带 log 的位置 (x, 绑定者上下文, log)

    binder_path 与 occ_path 都是代码中的绝对路径；
    log 的长度等于绑定者与出现之间的层级差。
    """
    var: str
    binder_path: Path
    occ_path: Path
    log: Tuple["LoggedPosition", ...] = ()

    @property
    def relative_level(self) -> int:
        return level_of(self.occ_path[len(self.binder_path):])


Log = Tuple[LoggedPosition, ...]
TapeItem = Union[Marker, LoggedPosition]
Tape = Tuple[TapeItem, ...]


def position_count(tape: Tape) -> int:
    """|T|e：tape 上带 log 位置的个数"""
    return sum(1 for item in tape if isinstance(item, LoggedPosition))


@dataclass(frozen=True)
class State:
    code: Term
    path: Path
    log: Log
    tape: Tape
    dir: Direction

    @property
    def position(self) -> Position:
        return Position(self.code, self.path)

    @property
    def subterm(self) -> Term:
        return subterm_at(self.code, self.path)

    @property
    def level(self) -> int:
        return level_of(self.path)

    def flip(self) -> "State":
        return replace(self, dir=self.dir.flip())

    def __str__(self) -> str:
        return format_state(self)


class Rule(str, Enum):
    """十二条转移规则"""
    APP1 = "•1"
    ABS2 = "•2"
    APP3 = "•3"
    ABS4 = "•4"
    VAR = "var"
    BT2 = "bt2"
    ARG = "arg"
    BT1 = "bt1"
    ES = "es"
    ES2 = "es2"
    VAR2 = "var2"
    VAR3 = "var3"


# 回溯完成规则
BACKTRACK_RULES = frozenset({Rule.BT2, Rule.VAR3})


@dataclass(frozen=True)
class Failure:
    """向下遇到抽象且 tape 为空"""

    def __str__(self) -> str:
        return "FAILURE"


@dataclass(frozen=True)
class OpenSuccess:
    var: str
    j: int

    def __str__(self) -> str:
        return f"OPEN SUCCESS {self.var} {self.j}"


@dataclass(frozen=True)
class BoundSuccess:
    h: int
    j: int

    def __str__(self) -> str:
        return f"BOUND SUCCESS {self.h} {self.j}"


FinalClass = Union[Failure, OpenSuccess, BoundSuccess]


@dataclass(frozen=True)
class Next:
    state: State
    rule: Rule


@dataclass(frozen=True)
class Final:
    state: State
    cls: FinalClass


@dataclass(frozen=True)
class Violation:
    """从初始状态出发不可能出现；出现即说明实现有误"""
    state: State
    description: str


StepResult = Union[Next, Final, Violation]


@dataclass(frozen=True)
class OutOfFuel:
    state: State
    fuel: int


RunOutcome = Union[Final, Violation, OutOfFuel]


def initial_state(t: Term, k: int) -> State:
    """s_{t,k} = (t, ⟦·⟧, ε, 𝗉^k, ↓)"""
    if k < 0:
        raise ValueError(f"深度 k 不能为负: {k}")
    return State(t, (), (), (Marker.P,) * k, Direction.DOWN)


def _nodes_along(code: Term, path: Path) -> List[Term]:
    nodes = [code]
    for step in path:
        nodes.append(child(nodes[-1], step))
    return nodes


def _step_down(s: State, node: Term) -> StepResult:
    path, log, tape = s.path, s.log, s.tape
    if isinstance(node, App):
        return Next(State(s.code, path + (Step.APP_LEFT,), log, (Marker.P,) + tape, Direction.DOWN), Rule.APP1)
    if isinstance(node, ESub):
        return Next(State(s.code, path + (Step.SUB_BODY,), log, tape, Direction.DOWN), Rule.ES)
    if isinstance(node, Abs):
        if not tape:
            return Final(s, Failure())
        top = tape[0]
        if top is Marker.P:
            return Next(State(s.code, path + (Step.ABS_BODY,), log, tape[1:], Direction.DOWN), Rule.ABS2)
        if top.binder_path != path or top.var != node.var:
            return Violation(s, f"bt2: tape 顶部位置的绑定者 {path_text(top.binder_path)} 与当前位置 {path_text(path)} 不符")
        return Next(State(s.code, top.occ_path, top.log + log, tape[1:], Direction.UP), Rule.BT2)
    if isinstance(node, Var):
        return _step_var(s, node)
    return Violation(s, f"无法处理的子项: {node!r}")


def _step_var(s: State, node: Var) -> StepResult:
    path, log, tape = s.path, s.log, s.tape
    nodes = _nodes_along(s.code, path)
    for index in range(len(path) - 1, -1, -1):
        step = path[index]
        parent = nodes[index]
        is_lambda = step is Step.ABS_BODY and isinstance(parent, Abs) and parent.var == node.name
        is_es = step is Step.SUB_BODY and isinstance(parent, ESub) and parent.var == node.name
        if not (is_lambda or is_es):
            continue
        binder_path = path[:index]
        n = level_of(path[index + 1:])
        if len(log) < n:
            return Violation(s, f"log 长度 {len(log)} 小于所需层级 {n}")
        lpos = LoggedPosition(node.name, binder_path, path, log[:n])
        if is_lambda:
            return Next(State(s.code, binder_path, log[n:], (lpos,) + tape, Direction.UP), Rule.VAR)
        return Next(
            State(s.code, binder_path + (Step.SUB_DEFINIENS,), (lpos,) + log[n:], tape, Direction.DOWN),
            Rule.VAR2,
        )
    if all(item is Marker.P for item in tape):
        return Final(s, OpenSuccess(node.name, len(tape)))
    return Violation(s, f"自由变量 {node.name} 遇到 tape 上的带 log 位置")


def _step_up(s: State) -> StepResult:
    path, log, tape = s.path, s.log, s.tape
    if not path:
        positions = [i for i, item in enumerate(tape) if isinstance(item, LoggedPosition)]
        if not log and len(positions) == 1:
            h = positions[0]
            return Final(s, BoundSuccess(h, len(tape) - h - 1))
        return Violation(s, f"根处的 ↑ 状态不符合成功形状 (log {len(log)} 项, tape 上 {len(positions)} 个位置)")
    last = path[-1]
    parent = path[:-1]
    if last is Step.APP_LEFT:
        if not tape:
            return Violation(s, "↑ 状态的 tape 为空")
        top = tape[0]
        if top is Marker.P:
            return Next(State(s.code, parent, log, tape[1:], Direction.UP), Rule.APP3)
        return Next(State(s.code, parent + (Step.APP_RIGHT,), (top,) + log, tape[1:], Direction.DOWN), Rule.ARG)
    if last is Step.ABS_BODY:
        return Next(State(s.code, parent, log, (Marker.P,) + tape, Direction.UP), Rule.ABS4)
    if last is Step.APP_RIGHT:
        if not log:
            return Violation(s, "bt1: log 为空")
        return Next(State(s.code, parent + (Step.APP_LEFT,), log[1:], (log[0],) + tape, Direction.DOWN), Rule.BT1)
    if last is Step.SUB_BODY:
        return Next(State(s.code, parent, log, tape, Direction.UP), Rule.ES2)
    # SubDefiniens
    if not log:
        return Violation(s, "var3: log 为空")
    head = log[0]
    if head.binder_path != parent:
        return Violation(s, f"var3: log 顶部位置的绑定者 {path_text(head.binder_path)} 与 {path_text(parent)} 不符")
    return Next(State(s.code, head.occ_path, head.log + log[1:], tape, Direction.UP), Rule.VAR3)


def step(s: State) -> StepResult:
    """执行一步转移"""
    if s.dir is Direction.DOWN:
        return _step_down(s, s.subterm)
    return _step_up(s)


def step_backward(s: State) -> Optional[State]:
    """翻转方向、前进一步、再翻转：得到唯一的前驱（若存在）"""
    result = step(s.flip())
    if isinstance(result, Next):
        return result.state.flip()
    return None


@dataclass
class RunResult:
    start: State
    outcome: RunOutcome
    steps: int
    trace: Optional[List[State]] = None
    rules: Optional[List[Rule]] = None

    @property
    def last(self) -> State:
        return self.outcome.state

    @property
    def terminated(self) -> bool:
        return isinstance(self.outcome, Final)


def run_from(start: State, fuel: int, keep_trace: bool = True) -> RunResult:
    """
    从任意状态开始运行

    Args:
        start: 起始状态
        fuel: 最多执行的转移次数
        keep_trace: 是否保留访问过的全部状态

    Returns:
        RunResult: 运行结果
    """
    if fuel < 0:
        raise ValueError(f"燃料不能为负: {fuel}")
    trace = [start] if keep_trace else None
    rules: Optional[List[Rule]] = [] if keep_trace else None
    s = start
    steps = 0
    while True:
        result = step(s)
        if isinstance(result, Final):
            return RunResult(start, result, steps, trace, rules)
        if isinstance(result, Violation):
            logger.error(f"机器违例 (第 {steps} 步): {result.description}")
            return RunResult(start, result, steps, trace, rules)
        if steps == fuel:
            logger.debug(f"燃料 {fuel} 耗尽")
            return RunResult(start, OutOfFuel(s, fuel), steps, trace, rules)
        s = result.state
        steps += 1
        if keep_trace:
            trace.append(s)
            rules.append(result.rule)


def run(t: Term, k: int, fuel: int, keep_trace: bool = True) -> RunResult:
    result = run_from(initial_state(t, k), fuel, keep_trace)
    logger.debug(f"运行 {pretty(t)} (k={k}): {result.steps} 步, {describe_outcome(result.outcome)}")
    return result


# ---------------------------------------------------------------------------
# 语义

@dataclass(frozen=True)
class Pair:
    h: int
    j: int

    def __str__(self) -> str:
        return f"pair {self.h} {self.j}"


@dataclass(frozen=True)
class OpenPair:
    var: str
    h: int

    def __str__(self) -> str:
        return f"open {self.var} {self.h}"


@dataclass(frozen=True)
class HasAbs:
    def __str__(self) -> str:
        return "hasabs"


@dataclass(frozen=True)
class Timeout:
    fuel: int

    def __str__(self) -> str:
        return "bottom (timeout)"


@dataclass(frozen=True)
class Stuck:
    description: str

    def __str__(self) -> str:
        return f"stuck: {self.description}"


SemanticsOutcome = Union[Pair, OpenPair, HasAbs, Timeout, Stuck]


def classify(outcome: RunOutcome) -> SemanticsOutcome:
    if isinstance(outcome, OutOfFuel):
        return Timeout(outcome.fuel)
    if isinstance(outcome, Violation):
        return Stuck(outcome.description)
    cls = outcome.cls
    if isinstance(cls, BoundSuccess):
        return Pair(cls.h, cls.j)
    if isinstance(cls, OpenSuccess):
        return OpenPair(cls.var, cls.j)
    return HasAbs()


def semantics(t: Term, k: int, fuel: int) -> SemanticsOutcome:
    """⟦t⟧k，在给定燃料内近似"""
    return classify(run(t, k, fuel, keep_trace=False).outcome)


def run_length(t: Term, k: int, fuel: int) -> Optional[int]:
    """|t|k；None 表示燃料内未终止（视为 ∞），违例抛出 MachineViolation"""
    result = run(t, k, fuel, keep_trace=False)
    if isinstance(result.outcome, Final):
        return result.steps
    if isinstance(result.outcome, Violation):
        raise MachineViolation(result.outcome.description, result.outcome.state)
    return None


def is_success(outcome: SemanticsOutcome) -> bool:
    return isinstance(outcome, (Pair, OpenPair))


def semantics_to_dict(outcome: SemanticsOutcome) -> Dict[str, Any]:
    if isinstance(outcome, Pair):
        return {"outcome": "pair", "h": outcome.h, "j": outcome.j}
    if isinstance(outcome, OpenPair):
        return {"outcome": "open", "var": outcome.var, "h": outcome.h}
    if isinstance(outcome, HasAbs):
        return {"outcome": "hasabs"}
    if isinstance(outcome, Timeout):
        return {"outcome": "timeout", "fuel": outcome.fuel}
    return {"outcome": "stuck", "description": outcome.description}


def describe_outcome(outcome: RunOutcome) -> str:
    if isinstance(outcome, Final):
        return str(outcome.cls)
    if isinstance(outcome, Violation):
        return f"VIOLATION {outcome.description}"
    return f"TIMEOUT {outcome.fuel}"


# ---------------------------------------------------------------------------
# 轨迹输出

def logged_position_to_json(lpos: LoggedPosition) -> Dict[str, Any]:
    return {
        "var": lpos.var,
        "binder_path": path_to_json(lpos.binder_path),
        "occ_path": path_to_json(lpos.occ_path),
        "log": [logged_position_to_json(entry) for entry in lpos.log],
    }


def trace_record(i: int, s: State) -> Dict[str, Any]:
    return {
        "i": i,
        "dir": s.dir.value,
        "sub": pretty(s.subterm),
        "path": path_to_json(s.path),
        "log": [logged_position_to_json(entry) for entry in s.log],
        "tape": [item.value if item is Marker.P else logged_position_to_json(item) for item in s.tape],
    }


def format_logged_position(code: Term, lpos: LoggedPosition) -> str:
    binder = subterm_at(code, lpos.binder_path)
    relative = lpos.occ_path[len(lpos.binder_path):]
    inner = ", ".join(format_logged_position(code, entry) for entry in lpos.log)
    return f"({lpos.var}, {pretty_context(binder, relative)}, [{inner}])"


def format_log(code: Term, log: Log) -> str:
    if not log:
        return "ε"
    return " · ".join(format_logged_position(code, entry) for entry in log)


def format_tape(code: Term, tape: Tape) -> str:
    if not tape:
        return "ε"
    return " · ".join("𝗉" if item is Marker.P else format_logged_position(code, item) for item in tape)


def format_state(s: State) -> str:
    return (
        f"{s.dir.arrow} {pretty(s.subterm)} | {pretty_context(s.code, s.path)} | "
        f"{format_log(s.code, s.log)} | {format_tape(s.code, s.tape)}"
    )


TRACE_HEADER = "i | subterm | context | log | tape | dir"


def format_trace(result: RunResult) -> List[str]:
    """文本轨迹：每个状态一行，最后一行为结论"""
    lines = [TRACE_HEADER]
    states = result.trace if result.trace is not None else [result.start]
    for i, s in enumerate(states):
        lines.append(
            f"{i} | {pretty(s.subterm)} | {pretty_context(s.code, s.path)} | "
            f"{format_log(s.code, s.log)} | {format_tape(s.code, s.tape)} | {s.dir.arrow}"
        )
    lines.append(describe_outcome(result.outcome))
    return lines
