"""
与证明网 IAM 的栈对应

带 log 位置编码为指数签名；log 对应盒子栈 B，tape 对应平衡栈 S。
var/var2 的宏观转移展开为 dereliction、辅助门与收缩的微观步骤，
bt2/var3 按逆序展开；其余转移对应一步栈操作。
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

from errors import GoiMismatch
from machine import (
    Direction,
    LoggedPosition,
    Marker,
    Next,
    RunResult,
    Rule,
    State,
    step,
)
from syntax import Path, Term, Var, binder_scope_occurrences, subterm_at

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Box:
    def __str__(self) -> str:
        return "□"


@dataclass(frozen=True)
class Pair:
    left: "Signature"
    right: "Signature"

    def __str__(self) -> str:
        return f"⟨{self.left},{self.right}⟩"


@dataclass(frozen=True)
class L:
    inner: "Signature"

    def __str__(self) -> str:
        return f"⟨l,{self.inner}⟩"


@dataclass(frozen=True)
class R:
    inner: "Signature"

    def __str__(self) -> str:
        return f"⟨r,{self.inner}⟩"


Signature = Union[Box, Pair, L, R]
BOX = Box()

BoxesStack = Tuple[Signature, ...]
BalancingItem = Union[Marker, Signature]
BalancingStack = Tuple[BalancingItem, ...]


@dataclass(frozen=True)
class Stacks:
    boxes: BoxesStack
    balancing: BalancingStack
    label: str = ""

    def same(self, other: "Stacks") -> bool:
        return self.boxes == other.boxes and self.balancing == other.balancing

    def __str__(self) -> str:
        return f"B={format_stack(self.boxes)} S={format_stack(self.balancing)}"


def format_stack(items) -> str:
    if not items:
        return "ε"
    return "·".join("𝗉" if item is Marker.P else str(item) for item in items)


def _wrap(choice: str, sig: Signature) -> Signature:
    return L(sig) if choice == "l" else R(sig)


def contraction_path(index: int, count: int) -> Tuple[str, ...]:
    """右梳收缩树中第 index 个出现（共 count 个）的 l/r 路径，由根开始"""
    if count <= 1:
        return ()
    if index < count - 1:
        return ("r",) * index + ("l",)
    return ("r",) * (count - 1)


class GoiEncoder:
    """对固定代码的编码器，缓存每个绑定者的出现列表"""

    def __init__(self, code: Term):
        self.code = code
        self._occurrences: Dict[Path, List[Path]] = {}
        self._cache: Dict[LoggedPosition, Signature] = {}

    def occurrences(self, binder_path: Path) -> List[Path]:
        if binder_path not in self._occurrences:
            self._occurrences[binder_path] = binder_scope_occurrences(self.code, binder_path)
        return self._occurrences[binder_path]

    def occurrence_path(self, binder_path: Path, occ_path: Path) -> Tuple[str, ...]:
        found = self.occurrences(binder_path)
        if occ_path not in found:
            raise GoiMismatch(f"{occ_path} 不是 {binder_path} 所绑定的出现")
        return contraction_path(found.index(occ_path), len(found))

    def encode(self, lpos: LoggedPosition) -> Signature:
        """
        编码带 log 位置

        从 □ 开始，由内向外为 log 的每一项包一层 ⟨σi,·⟩，
        最后按收缩树路径由深到浅包上 l/r。
        """
        if lpos in self._cache:
            return self._cache[lpos]
        sig: Signature = BOX
        for entry in lpos.log:
            sig = Pair(self.encode(entry), sig)
        for choice in reversed(self.occurrence_path(lpos.binder_path, lpos.occ_path)):
            sig = _wrap(choice, sig)
        self._cache[lpos] = sig
        return sig

    def encode_item(self, item) -> BalancingItem:
        return item if item is Marker.P else self.encode(item)

    def encode_state(self, s: State) -> Stacks:
        return Stacks(tuple(self.encode(entry) for entry in s.log),
                      tuple(self.encode_item(item) for item in s.tape))


def encode_logged_position(code: Term, lpos: LoggedPosition) -> Signature:
    return GoiEncoder(code).encode(lpos)


def encode_state(s: State) -> Stacks:
    return GoiEncoder(s.code).encode_state(s)


# ---------------------------------------------------------------------------
# 微观规则

def dereliction(st: Stacks) -> Stacks:
    return Stacks(st.boxes, (BOX,) + st.balancing, "dereliction")


def aux_door(st: Stacks) -> Stacks:
    """(σ'·B, σ·S) → (B, ⟨σ',σ⟩·S)"""
    if not st.boxes or not st.balancing or st.balancing[0] is Marker.P:
        raise GoiMismatch(f"辅助门无法作用于 {st}")
    return Stacks(st.boxes[1:], (Pair(st.boxes[0], st.balancing[0]),) + st.balancing[1:], "aux-door")


def contraction(choice: str, st: Stacks) -> Stacks:
    if not st.balancing or st.balancing[0] is Marker.P:
        raise GoiMismatch(f"收缩无法作用于 {st}")
    return Stacks(st.boxes, (_wrap(choice, st.balancing[0]),) + st.balancing[1:], f"contraction-{choice}")


def principal_in(st: Stacks) -> Stacks:
    """主门进入盒子：(B, σ·S) → (σ·B, S)"""
    if not st.balancing or st.balancing[0] is Marker.P:
        raise GoiMismatch(f"主门进入无法作用于 {st}")
    return Stacks((st.balancing[0],) + st.boxes, st.balancing[1:], "principal-in")


def principal_out(st: Stacks) -> Stacks:
    """主门离开盒子：(σ·B, S) → (B, σ·S)"""
    if not st.boxes:
        raise GoiMismatch(f"主门离开无法作用于 {st}")
    return Stacks(st.boxes[1:], (st.boxes[0],) + st.balancing, "principal-out")


def undo_contraction(choice: str, st: Stacks) -> Stacks:
    top = st.balancing[0] if st.balancing else None
    expected = L if choice == "l" else R
    if not isinstance(top, expected):
        raise GoiMismatch(f"期望 ⟨{choice},·⟩，实际为 {format_stack(st.balancing)}")
    return Stacks(st.boxes, (top.inner,) + st.balancing[1:], f"undo-contraction-{choice}")


def undo_aux_door(st: Stacks) -> Stacks:
    top = st.balancing[0] if st.balancing else None
    if not isinstance(top, Pair):
        raise GoiMismatch(f"期望 ⟨σ',σ⟩，实际为 {format_stack(st.balancing)}")
    return Stacks((top.left,) + st.boxes, (top.right,) + st.balancing[1:], "undo-aux-door")


def undo_dereliction(st: Stacks) -> Stacks:
    if not st.balancing or not isinstance(st.balancing[0], Box):
        raise GoiMismatch(f"期望 □，实际为 {format_stack(st.balancing)}")
    return Stacks(st.boxes, st.balancing[1:], "undo-dereliction")


def _binder_of_variable(s: State) -> Tuple[Path, bool, int]:
    """↓ 变量状态的绑定者路径、是否为 ES 绑定、相对层级"""
    result = step(s)
    if not isinstance(result, Next) or result.rule not in (Rule.VAR, Rule.VAR2):
        raise GoiMismatch(f"状态不在 var/var2 转移之前: {s}")
    if result.rule is Rule.VAR:
        lpos = result.state.tape[0]
        return lpos.binder_path, False, lpos.relative_level
    lpos = result.state.log[0]
    return lpos.binder_path, True, lpos.relative_level


def micro_var_expand(s: State, encoder: Optional[GoiEncoder] = None) -> List[Stacks]:
    """
    把 var/var2 转移展开为微观栈序列

    Args:
        s: 即将执行 var 或 var2 的 ↓ 变量状态
        encoder: 可复用的编码器

    Returns:
        List[Stacks]: 第一项为起始栈，最后一项应等于后继状态的编码
    """
    encoder = encoder or GoiEncoder(s.code)
    if s.dir is not Direction.DOWN or not isinstance(subterm_at(s.code, s.path), Var):
        raise GoiMismatch(f"不是 ↓ 变量状态: {s}")
    binder_path, is_es, n = _binder_of_variable(s)
    current = encoder.encode_state(s)
    trace = [Stacks(current.boxes, current.balancing, "start")]
    current = dereliction(current)
    trace.append(current)
    for _ in range(n):
        current = aux_door(current)
        trace.append(current)
    for choice in reversed(encoder.occurrence_path(binder_path, s.path)):
        current = contraction(choice, current)
        trace.append(current)
    if is_es:
        trace.append(principal_in(current))
    return trace


def micro_backtrack_expand(s: State, encoder: Optional[GoiEncoder] = None) -> List[Stacks]:
    """
    bt2/var3 的微观展开：按逆序撤销收缩、辅助门与 dereliction

    var3 先经主门离开定义项所在的盒子。
    """
    encoder = encoder or GoiEncoder(s.code)
    if s.dir is Direction.DOWN:
        if not s.tape or s.tape[0] is Marker.P:
            raise GoiMismatch(f"bt2 需要 tape 顶部为带 log 位置: {s}")
        lpos = s.tape[0]
    else:
        if not s.log:
            raise GoiMismatch(f"var3 需要非空 log: {s}")
        lpos = s.log[0]
    current = encoder.encode_state(s)
    trace = [Stacks(current.boxes, current.balancing, "start")]
    if s.dir is Direction.UP:
        current = principal_out(current)
        trace.append(current)
    for choice in encoder.occurrence_path(lpos.binder_path, lpos.occ_path):
        current = undo_contraction(choice, current)
        trace.append(current)
    for _ in range(lpos.relative_level):
        current = undo_aux_door(current)
        trace.append(current)
    trace.append(undo_dereliction(current))
    return trace


def stack_action(rule: Rule, st: Stacks) -> Stacks:
    """非指数转移对两个栈的一步作用"""
    if rule in (Rule.APP1, Rule.ABS4):
        return Stacks(st.boxes, (Marker.P,) + st.balancing, "push-p")
    if rule in (Rule.ABS2, Rule.APP3):
        if not st.balancing or st.balancing[0] is not Marker.P:
            raise GoiMismatch(f"{rule.value} 需要 S 顶部为 𝗉: {st}")
        return Stacks(st.boxes, st.balancing[1:], "pop-p")
    if rule is Rule.ARG:
        return principal_in(st)
    if rule is Rule.BT1:
        return principal_out(st)
    if rule in (Rule.ES, Rule.ES2):
        return Stacks(st.boxes, st.balancing, "identity")
    raise GoiMismatch(f"{rule.value} 是指数转移，没有单步栈作用")


def expand_transition(s: State, rule: Rule, encoder: GoiEncoder) -> List[Stacks]:
    if rule in (Rule.VAR, Rule.VAR2):
        return micro_var_expand(s, encoder)
    if rule in (Rule.BT2, Rule.VAR3):
        return micro_backtrack_expand(s, encoder)
    start = encoder.encode_state(s)
    return [Stacks(start.boxes, start.balancing, "start"), stack_action(rule, start)]


# ---------------------------------------------------------------------------
# 一致性

@dataclass(frozen=True)
class CoherenceFailure:
    index: int
    rule: str
    detail: str


@dataclass
class CoherenceReport:
    checked: int = 0
    exponential: int = 0
    failures: List[CoherenceFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_coherence(result: RunResult) -> CoherenceReport:
    """
    检查一次运行中每个转移的宏观/微观一致性

    Args:
        result: 保留了轨迹的运行结果

    Returns:
        CoherenceReport: failures 按转移下标排列
    """
    report = CoherenceReport()
    if result.trace is None:
        raise ValueError("check_coherence 需要保留轨迹的运行结果")
    encoder = GoiEncoder(result.start.code)
    for index, rule in enumerate(result.rules):
        before, after = result.trace[index], result.trace[index + 1]
        report.checked += 1
        if rule in (Rule.VAR, Rule.VAR2, Rule.BT2, Rule.VAR3):
            report.exponential += 1
        try:
            expanded = expand_transition(before, rule, encoder)
            expected = encoder.encode_state(after)
        except GoiMismatch as e:
            report.failures.append(CoherenceFailure(index, rule.value, str(e)))
            continue
        if not expanded[-1].same(expected):
            report.failures.append(
                CoherenceFailure(index, rule.value, f"微观结果 {expanded[-1]} 与宏观编码 {expected} 不同")
            )
    if report.failures:
        first = report.failures[0]
        logger.warning(f"GoI 不一致于第 {first.index} 个转移 ({first.rule}): {first.detail}")
    return report


def encoding_collisions(code: Term, positions: List[LoggedPosition]) -> List[Tuple[LoggedPosition, LoggedPosition]]:
    """同一绑定者的不同带 log 位置若编码相同，则返回这些对"""
    encoder = GoiEncoder(code)
    seen: Dict[Tuple[Path, Signature], LoggedPosition] = {}
    collisions = []
    for lpos in positions:
        key = (lpos.binder_path, encoder.encode(lpos))
        other = seen.setdefault(key, lpos)
        if other != lpos:
            collisions.append((other, lpos))
    return collisions


def logged_positions_of(result: RunResult) -> List[LoggedPosition]:
    """运行中出现过的全部带 log 位置，含嵌套在 log 内的"""
    found: Dict[LoggedPosition, None] = {}
    stack: List[LoggedPosition] = []
    for s in result.trace or []:
        stack.extend(s.log)
        stack.extend(item for item in s.tape if item is not Marker.P)
    while stack:
        lpos = stack.pop()
        if lpos in found:
            continue
        found[lpos] = None
        stack.extend(lpos.log)
    return list(found)


def goi_rows(result: RunResult) -> List[Dict[str, Any]]:
    """逐状态给出 (B, S) 与 (L, T) 的对照"""
    encoder = GoiEncoder(result.start.code)
    rows = []
    for index, s in enumerate(result.trace or []):
        st = encoder.encode_state(s)
        rows.append({
            "i": index,
            "dir": s.dir.value,
            "B": format_stack(st.boxes),
            "S": format_stack(st.balancing),
            "log_length": len(s.log),
            "tape_length": len(s.tape),
            "rule": result.rules[index].value if index < len(result.rules) else None,
        })
    return rows
