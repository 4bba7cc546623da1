"""
可穷尽状态的有界判定与运行不变式检查

对状态 s 的每个带 log 位置构造一个测试（tape 测试或 log 测试），
从测试起点运行机器，要求经由 bt2/var3 到达包围该位置的状态，并对其递归检查。
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple, Union

from machine import (
    BACKTRACK_RULES,
    Direction,
    Final,
    LoggedPosition,
    Marker,
    Next,
    State,
    Violation,
    position_count,
    step,
    step_backward,
)
from syntax import HEAD_STEPS, child, iter_paths, level_of, outer_path, plug, subterm_at

logger = logging.getLogger(__name__)

TAPE_TEST = "tape"
LOG_TEST = "log"


@dataclass(frozen=True)
class Test:
    kind: str
    focus: LoggedPosition
    start: State
    index: int


def tests_of(s: State) -> List[Test]:
    """
    状态的全部测试

    Args:
        s: 状态

    Returns:
        List[Test]: tape 上每个带 log 位置一个 tape 测试，log 中每一项一个 log 测试
    """
    tests: List[Test] = []
    seen = 0
    for index, item in enumerate(s.tape):
        if item is Marker.P:
            continue
        seen += 1
        prefix = s.tape[:index + 1]
        start = State(s.code, s.path, s.log, prefix, Direction.UP.flipped(seen))
        tests.append(Test(TAPE_TEST, item, start, index))
    tests.extend(log_tests_of(s))
    return tests


def log_tests_of(s: State) -> List[Test]:
    n = len(s.log)
    tests = []
    for m in range(1, min(n, level_of(s.path)) + 1):
        start = State(s.code, outer_path(s.path, m), s.log[n - m:], (), Direction.UP)
        tests.append(Test(LOG_TEST, s.log[n - m], start, m))
    return tests


def surrounds(s: State, lpos: LoggedPosition) -> bool:
    """s 为 ↑ 状态、tape 为空，位置即 lpos 的出现，且 log 以 lpos 的 log 开头"""
    return (
        s.dir is Direction.UP
        and not s.tape
        and s.path == lpos.occ_path
        and s.log[:len(lpos.log)] == lpos.log
    )


@dataclass(frozen=True)
class Exhaustible:
    completions: Tuple[str, ...] = ()
    truncated: bool = False


@dataclass(frozen=True)
class CounterExample:
    test: Test
    reason: str


@dataclass(frozen=True)
class Unknown:
    test: Test
    reason: str


Verdict = Union[Exhaustible, CounterExample, Unknown]


def run_test(test: Test, fuel: int) -> Tuple[Optional[State], Optional[str], str]:
    """
    运行一个测试直到回溯完成并包围焦点

    Returns:
        (到达的状态, 完成规则, 说明)；失败时状态为 None
    """
    s = test.start
    for i in range(fuel):
        result = step(s)
        if isinstance(result, Final):
            return None, None, f"测试在第 {i} 步终止: {result.cls}"
        if isinstance(result, Violation):
            return None, None, f"测试遇到违例: {result.description}"
        if result.rule in BACKTRACK_RULES and surrounds(result.state, test.focus):
            return result.state, result.rule.value, "ok"
        s = result.state
    return None, None, "fuel"


def is_exhaustible(s: State, depth: int, fuel: int,
                   memo: Optional[Dict[Tuple[State, int], Verdict]] = None) -> Verdict:
    """
    有界地判定 s 是否可穷尽

    Args:
        s: 状态
        depth: 递归深度上限，为 0 时只运行测试不再递归
        fuel: 每个测试的燃料

    Returns:
        Verdict: Exhaustible / CounterExample / Unknown
    """
    if memo is None:
        memo = {}
    key = (s, depth)
    if key in memo:
        return memo[key]
    completions: List[str] = []
    truncated = False
    verdict: Optional[Verdict] = None
    for test in tests_of(s):
        reached, rule, reason = run_test(test, fuel)
        if reached is None:
            if reason == "fuel":
                verdict = Unknown(test, f"燃料 {fuel} 内未完成")
            else:
                verdict = CounterExample(test, reason)
            break
        completions.append(rule)
        if depth == 0:
            truncated = truncated or bool(tests_of(reached))
            continue
        sub = is_exhaustible(reached, depth - 1, fuel, memo)
        if not isinstance(sub, Exhaustible):
            verdict = sub
            break
        completions.extend(sub.completions)
        truncated = truncated or sub.truncated
    if verdict is None:
        verdict = Exhaustible(tuple(completions), truncated)
    memo[key] = verdict
    return verdict


def _logged_count(items) -> int:
    return sum(1 + _logged_count(item.log) for item in items if isinstance(item, LoggedPosition))


def certificate_depth(s: State) -> int:
    """加深的上限：状态中（含嵌套的）带 log 位置个数加代码的最大层级"""
    code_level = max(level_of(path) for path in iter_paths(s.code))
    return _logged_count(s.tape) + _logged_count(s.log) + code_level


def certify(s: State, depth: int, fuel: int,
            memo: Optional[Dict[Tuple[State, int], Verdict]] = None) -> Verdict:
    """
    从 depth 开始逐步加深，直到证书不再被截断或到达 certificate_depth(s)

    Returns:
        Verdict: 第一个未截断的 Exhaustible，否则为最后一次的判定
    """
    if memo is None:
        memo = {}
    verdict = is_exhaustible(s, depth, fuel, memo)
    while isinstance(verdict, Exhaustible) and verdict.truncated and depth < certificate_depth(s):
        depth += 1
        verdict = is_exhaustible(s, depth, fuel, memo)
    return verdict


# ---------------------------------------------------------------------------
# log 测试的不变性

def _test_key(test: Test) -> Tuple:
    return (test.kind, test.index, test.focus, test.start)


def head_translations(s: State) -> List[State]:
    """在同一层级内平移位置：沿头部步骤向下一步，或去掉末尾的头部步骤"""
    moved = []
    node = s.subterm
    for step_ in HEAD_STEPS:
        try:
            child(node, step_)
        except KeyError:
            continue
        moved.append(replace(s, path=s.path + (step_,)))
    path = s.path
    while path and path[-1] in HEAD_STEPS:
        path = path[:-1]
        moved.append(replace(s, path=path))
    return moved


def check_log_test_invariance(s: State) -> List[str]:
    """方向翻转、替换 tape、头部平移都不改变 log 测试"""
    expected = [_test_key(test) for test in log_tests_of(s)]
    variants = [("flip", s.flip()), ("tape", replace(s, tape=())), ("tape-p", replace(s, tape=(Marker.P,)))]
    variants.extend(("translate", moved) for moved in head_translations(s))
    problems = []
    for label, variant in variants:
        if [_test_key(test) for test in log_tests_of(variant)] != expected:
            problems.append(label)
    return problems


def check_log_test_inclusion(s: State) -> List[int]:
    """外层位置的 log 测试包含于原状态的 log 测试；返回不满足的 m"""
    own = {_test_key(test) for test in log_tests_of(s)}
    n = len(s.log)
    bad = []
    for m in range(1, min(n, s.level) + 1):
        outer = State(s.code, outer_path(s.path, m), s.log[n - m:], s.tape, s.dir)
        if not {_test_key(test) for test in log_tests_of(outer)} <= own:
            bad.append(m)
    return bad


# ---------------------------------------------------------------------------
# 运行不变式

@dataclass(frozen=True)
class InvariantFailure:
    index: int
    kind: str
    detail: str


@dataclass
class InvariantReport:
    checked: int = 0
    failures: List[InvariantFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def first_failure(self) -> Optional[InvariantFailure]:
        return self.failures[0] if self.failures else None


def check_state_balance(s: State) -> Optional[str]:
    if len(s.log) != s.level:
        return f"log 长度 {len(s.log)} 不等于层级 {s.level}"
    expected = Direction.DOWN.flipped(position_count(s.tape))
    if s.dir is not expected:
        return f"方向 {s.dir.value} 与 tape 上 {position_count(s.tape)} 个位置不符"
    return None


def check_run_invariants(trace: List[State], reversibility: bool = True) -> InvariantReport:
    """
    逐状态检查代码不变、平衡不变式、↑ 状态带位置、可逆性

    Args:
        trace: run 产生的状态序列
        reversibility: 是否检查后退一步能回到前一状态

    Returns:
        InvariantReport: failures 按下标排列
    """
    report = InvariantReport()
    if not trace:
        return report
    code = trace[0].code
    for index, s in enumerate(trace):
        report.checked += 1
        if s.code != code:
            report.failures.append(InvariantFailure(index, "code", "代码发生了变化"))
            continue
        try:
            rebuilt = plug(code, s.path, subterm_at(code, s.path))
        except KeyError as e:
            report.failures.append(InvariantFailure(index, "code", f"位置无法解析: {e}"))
            continue
        if rebuilt != code:
            report.failures.append(InvariantFailure(index, "code", "plug(位置) 与代码不同"))
        problem = check_state_balance(s)
        if problem:
            report.failures.append(InvariantFailure(index, "balance", problem))
        if s.dir is Direction.UP and position_count(s.tape) < 1:
            report.failures.append(InvariantFailure(index, "up-tape", "↑ 状态的 tape 上没有位置"))
        if reversibility and index > 0 and step_backward(s) != trace[index - 1]:
            report.failures.append(InvariantFailure(index, "reversibility", "后退一步未回到前一状态"))
    if report.failures:
        first = report.failures[0]
        logger.warning(f"不变式失败于第 {first.index} 个状态 ({first.kind}): {first.detail}")
    return report


def check_forward_after_backward(trace: List[State]) -> List[int]:
    """对每个有前驱的状态 s'，step(step_backward(s')) = s'"""
    bad = []
    for index, s in enumerate(trace):
        previous = step_backward(s)
        if previous is None:
            continue
        result = step(previous)
        if not isinstance(result, Next) or result.state != s:
            bad.append(index)
    return bad
