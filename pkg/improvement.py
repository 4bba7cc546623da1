"""
改进关系 ▷dB、▷ls、▷gc 与改进图检查

一步 t ⊸ u 诱导两台机器状态之间的关系：位置按 redex 的残余映射对应，
log 与 tape 逐项对应，ls 的副本一侧允许 log 多出最外层的一项。
残余映射用于搜索改进图的见证；每个同步点再按推理规则（rdx、rdx2、ctx、
tok、pos、pos2、state、state2）逐条核对，见 Improvement.justify。
在此之上检查改进定义的四个子句，并沿 ⊸ 序列比较语义与运行长度。
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from errors import PathError, SearchExhausted
from machine import (
    Final,
    LoggedPosition,
    Marker,
    Next,
    SemanticsOutcome,
    State,
    TapeItem,
    Timeout,
    classify,
    initial_state,
    run,
    semantics_to_dict,
    step,
)
from reduction import Redex, RuleName, contract, ctx_rewrite, head_spine, lhe_normalize, lhe_redexes
from syntax import (
    HEAD_STEPS,
    ESub,
    Path,
    Step,
    Term,
    Var,
    alpha_eq,
    binder_of,
    context_of,
    fill,
    hole_path,
    path_to_json,
    plug,
    pretty,
    rename_apart,
    size,
    strip_subst,
    subterm_at,
)

logger = logging.getLogger(__name__)

ORIGINAL = "original"
COPY = "copy"


class Rel(str, Enum):
    DB = "dB"
    LS = "ls"
    GC = "gc"
    UNION = "union"

    def admits(self, rule: RuleName) -> bool:
        return self is Rel.UNION or self.value == rule.value


def rel_for(rule: RuleName) -> Rel:
    return Rel(rule.value)


@dataclass(frozen=True)
class Image:
    path: Path
    branch: str = ORIGINAL


class Improvement:
    """
    一步 t ⊸ u 诱导的状态关系

    Args:
        source: 左侧代码 t
        redex: t 中被收缩的 redex
        target: 右侧代码 u，缺省时由收缩得到
    """

    def __init__(self, source: Term, redex: Redex, target: Optional[Term] = None):
        self.source = source
        self.redex = redex
        self.rule = redex.rule
        self.site = redex.site
        self.target = target if target is not None else contract(source, redex)
        node = subterm_at(source, self.site)
        self.depth = 0
        self.surplus: Optional[LoggedPosition] = None
        if self.rule is RuleName.DB:
            ctx, _ = strip_subst(node.left)
            self.depth = len(ctx)
        elif self.rule is RuleName.LS:
            self.definiens = self.site + (Step.SUB_DEFINIENS,)
            self.surplus = LoggedPosition(node.var, self.site, redex.occurrence, ())
        self._apart: Optional[Tuple[Term, Term]] = None
        self._rule_cache: Dict[Tuple[Path, Path], Optional[str]] = {}
        self._pos_cache: Dict[Tuple[LoggedPosition, LoggedPosition], bool] = {}

    # -- 位置的残余 --------------------------------------------------------

    def images(self, path: Path) -> List[Image]:
        """左侧位置在右侧代码中的对应位置；模式内部的结点没有对应"""
        if self.rule is RuleName.DB:
            return self._db_images(path)
        if self.rule is RuleName.LS:
            if path[:len(self.definiens)] == self.definiens:
                rest = path[len(self.definiens):]
                return [Image(self.redex.occurrence + rest, COPY), Image(path, ORIGINAL)]
            return [Image(path)]
        sigma = self.site
        if path[:len(sigma)] != sigma:
            return [Image(path)]
        rest = path[len(sigma):]
        if not rest:
            return [Image(sigma)]
        if rest[0] is Step.SUB_BODY:
            return [Image(sigma + rest[1:])]
        return []

    def _db_images(self, path: Path) -> List[Image]:
        sigma, k = self.site, self.depth
        if path[:len(sigma)] != sigma:
            return [Image(path)]
        rest = path[len(sigma):]
        if not rest:
            return [Image(sigma)]
        subs = (Step.SUB_BODY,) * k
        if rest[0] is Step.APP_RIGHT:
            return [Image(sigma + subs + (Step.SUB_DEFINIENS,) + rest[1:])]
        inner = rest[1:]
        j = 0
        while j < k and j < len(inner) and inner[j] is Step.SUB_BODY:
            j += 1
        tail = inner[j:]
        if not tail:
            return []
        if j < k:
            # tail[0] 是 S 中第 j 个替换的定义项
            return [Image(sigma + (Step.SUB_BODY,) * j + tail)]
        return [Image(sigma + subs + (Step.SUB_BODY,) + tail[1:])]

    def binder_image(self, path: Path, branch: str) -> Optional[Path]:
        if self.rule is RuleName.DB:
            sigma, k = self.site, self.depth
            head = sigma + (Step.APP_LEFT,)
            rest = path[len(head):]
            if path[:len(head)] == head and len(rest) <= k and all(s is Step.SUB_BODY for s in rest):
                return sigma + rest
        elif self.rule is RuleName.LS:
            if branch == COPY and path[:len(self.definiens)] == self.definiens:
                return self.redex.occurrence + path[len(self.definiens):]
            return path
        elif path == self.site:
            return None
        images = self.images(path)
        return images[0].path if images else None

    def log_surplus(self, binder: Path, occurrence: Path, branch: str) -> Optional[LoggedPosition]:
        """副本一侧、出现在定义项内而绑定者在外时，左侧 log 多出的最外层一项"""
        if self.surplus is None or branch != COPY:
            return None
        inside = occurrence[:len(self.definiens)] == self.definiens
        binder_inside = binder[:len(self.definiens)] == self.definiens
        return self.surplus if inside and not binder_inside else None

    # -- 关系 ---------------------------------------------------------------

    def related_items(self, left: Sequence[TapeItem], right: Sequence[TapeItem]) -> bool:
        if len(left) != len(right):
            return False
        for a, b in zip(left, right):
            if a is Marker.P or b is Marker.P:
                if a is not b:
                    return False
            elif not self.related_positions(a, b):
                return False
        return True

    def related_positions(self, a: LoggedPosition, b: LoggedPosition) -> bool:
        for image in self.images(a.occ_path):
            if image.path != b.occ_path:
                continue
            if self.binder_image(a.binder_path, image.branch) != b.binder_path:
                continue
            if self._related_logs(a.log, b.log, self.log_surplus(a.binder_path, a.occ_path, image.branch)):
                return True
        return False

    def _related_logs(self, left, right, surplus: Optional[LoggedPosition]) -> bool:
        if surplus is not None:
            if not left or left[-1] != surplus:
                return False
            left = left[:-1]
        return self.related_items(left, right)

    def related(self, s: State, q: State) -> bool:
        """s ▷ q：方向相同，位置对应，tape 与 log 逐项相关"""
        if s.dir is not q.dir:
            return False
        for image in self.images(s.path):
            if image.path != q.path:
                continue
            surplus = self.log_surplus((), s.path, image.branch)
            if self._related_logs(s.log, q.log, surplus) and self.related_items(s.tape, q.tape):
                return True
        return False

    # -- 推理规则 -----------------------------------------------------------

    def _renamed(self) -> Tuple[Term, Term]:
        """绑定名分离后的 t 与 u：收缩上下文不会重命名，填回子项时不会被捕获"""
        if self._apart is None:
            source = rename_apart(self.source)
            self._apart = (source, contract(source, self.redex))
        return self._apart

    def position_rule(self, left_path: Path, right_path: Path) -> Optional[str]:
        """
        位置 (t, C) ▷ (u, D) 所依据的规则

        Returns:
            Optional[str]: "rdx"、"rdx2"（仅 ls）、"ctx"，参数化重写 ls,t 与 gc,t 给出的 "ctx-t"，
            或洞留在被复制替换中的 "ctx-es"（仅 ls）；都不适用时为 None
        """
        key = (left_path, right_path)
        if key not in self._rule_cache:
            self._rule_cache[key] = self._position_rule(left_path, right_path)
        return self._rule_cache[key]

    def _position_rule(self, left_path: Path, right_path: Path) -> Optional[str]:
        source, target = self._renamed()
        try:
            t = subterm_at(source, left_path)
            subterm_at(target, right_path)
        except PathError:
            return None
        if left_path == right_path and all(step_ in HEAD_STEPS for step_ in left_path):
            for redex in lhe_redexes(t):
                if redex.rule is self.rule and alpha_eq(plug(source, left_path, contract(t, redex)), target):
                    return "rdx"
            if self.rule is RuleName.LS and self._copies_head(source, target, left_path):
                return "rdx2"
        ctx = context_of(source, left_path)
        for plug_term in (None, t):
            if plug_term is not None and self.rule is RuleName.DB:
                continue
            for reduct in ctx_rewrite(self.rule, ctx, plug_term):
                if hole_path(reduct) == right_path and alpha_eq(fill(reduct, t), target):
                    return self._context_rule(plug_term, right_path)
        return None

    def _context_rule(self, plug_term: Optional[Term], right_path: Path) -> str:
        if plug_term is None:
            return "ctx"
        # 洞留在被复制的替换中：H⟦C⟦t⟧⟧[x<-C]
        if self.rule is RuleName.LS and right_path[:len(self.definiens)] == self.definiens:
            return "ctx-es"
        return "ctx-t"

    @staticmethod
    def _copies_head(source: Term, target: Term, path: Path) -> bool:
        """(H⟦x⟧, K) ▷ (H⟦t⟧, K)：x 的替换 [x<-t] 位于 K 中"""
        head_path, head = head_spine(subterm_at(source, path))[-1]
        if not isinstance(head, Var):
            return False
        occurrence = path + head_path
        binder = binder_of(source, occurrence)
        if binder is None or not isinstance(subterm_at(source, binder), ESub):
            return False
        if path[:len(binder) + 1] != binder + (Step.SUB_BODY,):
            return False
        return alpha_eq(contract(source, Redex(RuleName.LS, binder, occurrence)), target)

    def _log_kind(self, rule: str, left: Sequence[TapeItem], right: Sequence[TapeItem]) -> Optional[str]:
        """state/pos 要求 log 逐项相关；state2/pos2 只用于 ls,t，左侧多出最外层一项"""
        if len(left) == len(right):
            return "state" if self._items_justified(left, right) else None
        if self.rule is RuleName.LS and rule == "ctx-t" and len(left) == len(right) + 1:
            return "state2" if self._items_justified(left[:-1], right) else None
        return None

    def _items_justified(self, left: Sequence[TapeItem], right: Sequence[TapeItem]) -> bool:
        if len(left) != len(right):
            return False
        for a, b in zip(left, right):
            if a is Marker.P or b is Marker.P:
                if a is not b:
                    return False
            elif not self._position_justified(a, b):
                return False
        return True

    def _position_justified(self, a: LoggedPosition, b: LoggedPosition) -> bool:
        key = (a, b)
        if key not in self._pos_cache:
            rule = self.position_rule(a.occ_path, b.occ_path)
            self._pos_cache[key] = rule is not None and self._log_kind(rule, a.log, b.log) is not None
        return self._pos_cache[key]

    def justify(self, s: State, q: State) -> Optional[str]:
        """
        按推理规则判定 s ▷ q

        Returns:
            Optional[str]: "<state|state2>:<位置规则>"，例如 "state:ctx"；不相关时为 None
        """
        if s.dir is not q.dir:
            return None
        if not alpha_eq(s.code, self.source) or not alpha_eq(q.code, self.target):
            return None
        rule = self.position_rule(s.path, q.path)
        if rule is None:
            return None
        kind = self._log_kind(rule, s.log, q.log)
        if kind is None or not self._items_justified(s.tape, q.tape):
            return None
        return f"{kind}:{rule}"


def improvement_for(rel: Rel, s: State, q: State, redex: Optional[Redex] = None) -> Optional[Improvement]:
    """在 s.code 的 redex 中找出使 s ▷ q 成立的那一步；找不到时为 None"""
    candidates = [redex] if redex is not None else lhe_redexes(s.code)
    for candidate in candidates:
        if not rel.admits(candidate.rule):
            continue
        improvement = Improvement(s.code, candidate)
        if alpha_eq(improvement.target, q.code) and improvement.related(s, q):
            return improvement
    return None


def related(rel: Rel, s: State, q: State, redex: Optional[Redex] = None) -> bool:
    """
    判断 s ▷ q

    Args:
        rel: ▷dB、▷ls、▷gc 或三者之并
        s: 左侧状态（代码 t）
        q: 右侧状态（代码 u）
        redex: t ⊸ u 所收缩的 redex；缺省时在 t 的所有 redex 中寻找

    Returns:
        bool: 是否相关
    """
    return improvement_for(rel, s, q, redex) is not None


def justify(rel: Rel, s: State, q: State, redex: Optional[Redex] = None) -> Optional[str]:
    """按推理规则判定 s ▷ q，返回所用的规则名；参数同 related"""
    candidates = [redex] if redex is not None else lhe_redexes(s.code)
    for candidate in candidates:
        if not rel.admits(candidate.rule):
            continue
        improvement = Improvement(s.code, candidate)
        if alpha_eq(improvement.target, q.code):
            name = improvement.justify(s, q)
            if name is not None:
                return name
    return None


# ---------------------------------------------------------------------------
# 改进图

class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    FINAL_LEFT = "final-left"
    FINAL_RIGHT = "final-right"


@dataclass(frozen=True)
class DiagramReport:
    """
    m 与 n 为左、右两侧的步数；LEFT 子句的 m 不含 s → s' 这一步
    """
    side: Side
    m: int
    n: int
    states: Optional[Tuple[State, State]]
    ok: bool
    note: str = ""


def _walk(s: State, limit: int) -> List[State]:
    """从 s 出发至多 limit 步内经过的状态（含 s）"""
    states = [s]
    while len(states) <= limit:
        result = step(states[-1])
        if not isinstance(result, Next):
            break
        states.append(result.state)
    return states


def _final_kind(result) -> Tuple:
    outcome = classify(result)
    if isinstance(outcome, Timeout):
        return ("timeout",)
    return tuple(semantics_to_dict(outcome).items())


def check_diagram(rel: Rel, s: State, q: State, bound: int, redex: Optional[Redex] = None,
                  strict: bool = False) -> List[DiagramReport]:
    """
    对相关的一对状态检查适用的改进子句

    Args:
        rel: ▷dB、▷ls、▷gc 或三者之并
        s: 左侧状态
        q: 右侧状态，需满足 s ▷ q
        bound: 每个子句向前搜索的步数上限
        redex: t ⊸ u 所收缩的 redex；缺省时在 t 的所有 redex 中寻找
        strict: 为 True 时，无法闭合的子句抛出 SearchExhausted

    Returns:
        List[DiagramReport]: 每个适用子句一份报告

    Raises:
        ValueError: s 与 q 不相关
    """
    improvement = improvement_for(rel, s, q, redex)
    if improvement is None:
        raise ValueError(f"状态不相关: {s} 与 {q}")
    return _check_diagram(improvement, s, q, bound, strict)


def _check_diagram(improvement: Improvement, s: State, q: State, bound: int,
                   strict: bool = False) -> List[DiagramReport]:
    reports: List[DiagramReport] = []
    left = step(s)
    right = step(q)
    if isinstance(left, Final):
        ok = isinstance(right, Final) and _final_kind(left) == _final_kind(right)
        reports.append(DiagramReport(Side.FINAL_LEFT, 0, 0, (s, q), ok, "" if ok else "右侧未同时终止"))
    if isinstance(right, Final):
        lefts = _walk(s, bound)
        end = step(lefts[-1])
        ok = isinstance(end, Final) and _final_kind(end) == _final_kind(right)
        reports.append(DiagramReport(Side.FINAL_RIGHT, len(lefts) - 1, 0, (lefts[-1], q), ok,
                                     "" if ok else f"左侧 {bound} 步内未到达同类终止状态"))
    if isinstance(left, Next):
        reports.append(_close_left(improvement, left.state, q, bound))
    elif not isinstance(left, Final):
        reports.append(DiagramReport(Side.LEFT, 0, 0, (s, q), False, f"左侧违例: {left.description}"))
    if isinstance(right, Next):
        reports.append(_close_right(improvement, s, right.state, bound))
    elif not isinstance(right, Final):
        reports.append(DiagramReport(Side.RIGHT, 0, 0, (s, q), False, f"右侧违例: {right.description}"))
    if strict:
        for report in reports:
            if not report.ok:
                raise SearchExhausted(bound, report.side.value)
    return reports


def _close_left(improvement: Improvement, s1: State, q: State, bound: int) -> DiagramReport:
    lefts = _walk(s1, bound)
    rights = _walk(q, bound + 1)
    for m, s2 in enumerate(lefts):
        for n in range(min(m + 2, len(rights))):
            if improvement.related(s2, rights[n]):
                return DiagramReport(Side.LEFT, m, n, (s2, rights[n]), True)
    return DiagramReport(Side.LEFT, len(lefts) - 1, len(rights) - 1, None, False, f"{bound} 步内未闭合")


def _close_right(improvement: Improvement, s: State, q1: State, bound: int) -> DiagramReport:
    lefts = _walk(s, bound + 1)
    rights = _walk(q1, bound)
    for m in range(1, len(lefts)):
        for n in range(min(m, len(rights))):
            if improvement.related(lefts[m], rights[n]):
                return DiagramReport(Side.RIGHT, m, n, (lefts[m], rights[n]), True)
    return DiagramReport(Side.RIGHT, len(lefts) - 1, len(rights) - 1, None, False, f"{bound} 步内未闭合")


def default_bound(t: Term) -> int:
    return 4 * (size(t) + 2)


@dataclass
class CoRunReport:
    source: Term
    redex: Redex
    k: int
    sync_points: int = 0
    left_steps: int = 0
    right_steps: int = 0
    failure: Optional[DiagramReport] = None
    timed_out: bool = False
    justifications: Dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failure is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "term": pretty(self.source),
            "rule": self.redex.rule.value,
            "site": path_to_json(self.redex.site),
            "k": self.k,
            "sync_points": self.sync_points,
            "left_steps": self.left_steps,
            "right_steps": self.right_steps,
            "timed_out": self.timed_out,
            "justifications": dict(self.justifications),
            "failure": None if self.failure is None else {
                "side": self.failure.side.value,
                "m": self.failure.m,
                "n": self.failure.n,
                "note": self.failure.note,
            },
        }


def co_run(t: Term, redex: Redex, k: int, fuel: int, bound: Optional[int] = None) -> CoRunReport:
    """
    同步运行 t 与 u 上的两台机器

    每个同步点检查全部适用子句，再沿 LEFT 子句的见证前进。

    Args:
        t: 左侧代码
        redex: t 中被收缩的 redex
        k: 深度
        fuel: 左侧最多步数
        bound: 子句搜索上限，缺省为 4·(|t|+2)

    Returns:
        CoRunReport: failure 为第一个未闭合的子句，或第一个推理规则不成立的同步点
    """
    improvement = Improvement(t, redex)
    bound = default_bound(t) if bound is None else bound
    report = CoRunReport(t, redex, k)
    s = initial_state(t, k)
    q = initial_state(improvement.target, k)
    if not improvement.related(s, q):
        report.failure = DiagramReport(Side.LEFT, 0, 0, (s, q), False, "初始状态不相关")
        return report
    while True:
        report.sync_points += 1
        justified = improvement.justify(s, q)
        if justified is None:
            report.failure = DiagramReport(Side.LEFT, 0, 0, (s, q), False, "同步点不满足任何推理规则")
            logger.warning(f"推理规则不成立: {pretty(t)} {redex.rule.value} k={k} 于第 {report.left_steps} 步")
            return report
        report.justifications[justified] = report.justifications.get(justified, 0) + 1
        reports = _check_diagram(improvement, s, q, bound)
        failed = next((r for r in reports if not r.ok), None)
        if failed is not None:
            report.failure = failed
            logger.warning(
                f"改进图未闭合: {pretty(t)} {redex.rule.value} k={k} "
                f"子句 {failed.side.value} 于第 {report.left_steps} 步: {failed.note}"
            )
            return report
        witness = next((r for r in reports if r.side is Side.LEFT), None)
        if witness is None:
            return report
        s, q = witness.states
        report.left_steps += witness.m + 1
        report.right_steps += witness.n
        if report.left_steps >= fuel:
            report.timed_out = True
            return report


# ---------------------------------------------------------------------------
# 可靠性与运行长度

def measure(t: Term, k: int, fuel: int) -> Tuple[SemanticsOutcome, Optional[int]]:
    """一次运行同时得到 ⟦t⟧k 与 |t|k"""
    result = run(t, k, fuel, keep_trace=False)
    length = result.steps if isinstance(result.outcome, Final) else None
    return classify(result.outcome), length


@dataclass(frozen=True)
class SoundnessEntry:
    redex: Redex
    reduct: Term
    left: SemanticsOutcome
    right: SemanticsOutcome
    left_length: Optional[int]
    right_length: Optional[int]

    @property
    def agree(self) -> bool:
        return self.left == self.right

    @property
    def both_timeout(self) -> bool:
        return isinstance(self.left, Timeout) and isinstance(self.right, Timeout)

    @property
    def length_ok(self) -> bool:
        if self.left_length is None or self.right_length is None:
            return True
        return self.left_length >= self.right_length


@dataclass
class SoundnessReport:
    term: Term
    k: int
    entries: List[SoundnessEntry] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(entry.agree and entry.length_ok for entry in self.entries)

    @property
    def flagged(self) -> List[SoundnessEntry]:
        return [entry for entry in self.entries if isinstance(entry.left, Timeout) or isinstance(entry.right, Timeout)]


def check_soundness(t: Term, k: int, fuel: int) -> SoundnessReport:
    """对 t 的每一步 t ⊸ u 比较 ⟦t⟧k 与 ⟦u⟧k，并检查 |t|k ≥ |u|k"""
    report = SoundnessReport(t, k)
    left, left_length = measure(t, k, fuel)
    for redex in lhe_redexes(t):
        u = contract(t, redex)
        right, right_length = measure(u, k, fuel)
        entry = SoundnessEntry(redex, u, left, right, left_length, right_length)
        if entry.both_timeout:
            logger.warning(f"{pretty(t)} 与 {pretty(u)} 在 k={k}、燃料 {fuel} 下均超时，按一致处理")
        report.entries.append(entry)
    return report


@dataclass
class LengthDecrease:
    k0: Optional[int]
    lengths: List[Tuple[int, Optional[int], Optional[int]]]

    @property
    def flagged(self) -> bool:
        return any(lt is None or lu is None for _, lt, lu in self.lengths)


def check_length_decrease(t: Term, u: Term, fuel: int, kmax: int) -> LengthDecrease:
    """
    寻找最小的 k0 ≤ kmax，使得对所有 h ∈ [k0, kmax] 有 |t|h > |u|h

    Returns:
        LengthDecrease: k0 为 None 表示 kmax 以内找不到
    """
    lengths = []
    for h in range(kmax + 1):
        lengths.append((h, measure(t, h, fuel)[1], measure(u, h, fuel)[1]))
    k0 = None
    for h, lt, lu in reversed(lengths):
        if lt is None or lu is None or lt <= lu:
            break
        k0 = h
    return LengthDecrease(k0, lengths)


@dataclass(frozen=True)
class StepRow:
    index: int
    rule: str
    site: Path
    before: Term
    after: Term
    left: SemanticsOutcome
    right: SemanticsOutcome
    left_length: Optional[int]
    right_length: Optional[int]

    @property
    def agree(self) -> bool:
        return self.left == self.right

    @property
    def decreased(self) -> Optional[bool]:
        if self.left_length is None or self.right_length is None:
            return None
        return self.left_length > self.right_length

    def to_dict(self) -> Dict[str, Any]:
        return {
            "i": self.index,
            "rule": self.rule,
            "site": path_to_json(self.site),
            "term": pretty(self.after),
            "sem_before": semantics_to_dict(self.left),
            "sem_after": semantics_to_dict(self.right),
            "len_before": self.left_length,
            "len_after": self.right_length,
            "agree": self.agree,
            "decreased": self.decreased,
        }


@dataclass
class StepTable:
    rows: List[StepRow]
    normal: bool

    @property
    def ok(self) -> bool:
        return all(row.agree for row in self.rows)


def step_table(t: Term, k: int, fuel: int, lhe_fuel: int) -> StepTable:
    """沿最左最外的 ⊸ 序列逐步比较语义与运行长度"""
    normalized = lhe_normalize(t, lhe_fuel)
    rows = []
    before = t
    left, left_length = measure(before, k, fuel)
    for index, (redex, after) in enumerate(normalized.steps):
        right, right_length = measure(after, k, fuel)
        rows.append(StepRow(index, redex.rule.value, redex.site, before, after,
                            left, right, left_length, right_length))
        before, left, left_length = after, right, right_length
    return StepTable(rows, normalized.normal)


def format_step_table(table: StepTable) -> List[str]:
    lines = ["i | rule | site | term | sem | length"]
    for row in table.rows:
        length = "∞" if row.right_length is None else str(row.right_length)
        before = "∞" if row.left_length is None else str(row.left_length)
        mark = "" if row.agree else "  ✗"
        lines.append(
            f"{row.index} | {row.rule} | {''.join(s.short for s in row.site) or 'ε'} | {pretty(row.after)} | "
            f"{row.left} -> {row.right} | {before} -> {length}{mark}"
        )
    lines.append("normal" if table.normal else "not normal (fuel)")
    return lines
