"""
头归约与线性头归约（⊸）

⊸ 由 dB、ls、gc 三条规则组成，只在头上下文中进行；
所有 redex 都位于项的头部脊上。本模块同时作为状态机的独立参照。
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, List, Optional, Set, Tuple

from errors import FuelExhausted, InvalidRedex
from syntax import (
    Abs,
    App,
    ESub,
    Hole,
    Path,
    Step,
    Term,
    Var,
    all_names,
    alpha_eq,
    free_vars,
    fresh_name,
    hole_path,
    occurs_free,
    plug,
    pretty,
    strip_subst,
    subterm_at,
)

logger = logging.getLogger(__name__)


class RuleName(str, Enum):
    DB = "dB"
    LS = "ls"
    GC = "gc"


@dataclass(frozen=True)
class Redex:
    """
    rule: 规则名
    site: 被收缩模式所在的路径（层级为 0）
    occurrence: 仅 ls 使用，被替换的头部变量出现的绝对路径
    """
    rule: RuleName
    site: Path
    occurrence: Optional[Path] = None


# ---------------------------------------------------------------------------
# 元层替换

def substitute(t: Term, x: str, u: Term) -> Term:
    """避免捕获的元层替换 t{x:=u}"""
    fv_u = free_vars(u)
    return _substitute(t, x, u, fv_u)


def _substitute(t: Term, x: str, u: Term, fv_u) -> Term:
    if isinstance(t, Var):
        return u if t.name == x else t
    if isinstance(t, Hole):
        return t
    if isinstance(t, App):
        return App(_substitute(t.left, x, u, fv_u), _substitute(t.right, x, u, fv_u))
    if isinstance(t, Abs):
        if t.var == x or not occurs_free(x, t.body):
            return t
        if t.var in fv_u:
            new = fresh_name(t.var, all_names(t.body) | set(fv_u) | {x})
            body = _substitute(t.body, t.var, Var(new), frozenset({new}))
            return Abs(new, _substitute(body, x, u, fv_u))
        return Abs(t.var, _substitute(t.body, x, u, fv_u))
    # ESub
    definiens = _substitute(t.definiens, x, u, fv_u)
    if t.var == x or not occurs_free(x, t.body):
        return ESub(t.body, t.var, definiens)
    if t.var in fv_u:
        new = fresh_name(t.var, all_names(t.body) | set(fv_u) | {x})
        body = _substitute(t.body, t.var, Var(new), frozenset({new}))
        return ESub(_substitute(body, x, u, fv_u), new, definiens)
    return ESub(_substitute(t.body, x, u, fv_u), t.var, definiens)


def rename_binder(t: Term, avoid: Set[str]) -> Term:
    """把 Abs/ESub 结点的绑定名换成不在 avoid 中的新名字"""
    if not isinstance(t, (Abs, ESub)):
        raise ValueError(f"不是绑定结点: {pretty(t)}")
    new = fresh_name(t.var, avoid | all_names(t.body))
    body = substitute(t.body, t.var, Var(new))
    if isinstance(t, Abs):
        return Abs(new, body)
    return ESub(body, new, t.definiens)


# ---------------------------------------------------------------------------
# 头归约（纯项）

def _head_redex_path(t: Term, under_lambda: bool = True) -> Optional[Path]:
    path: Path = ()
    node = t
    while True:
        if isinstance(node, Abs):
            if not under_lambda:
                return None
            node = node.body
            path += (Step.ABS_BODY,)
        elif isinstance(node, App):
            if isinstance(node.left, Abs):
                return path
            node = node.left
            path += (Step.APP_LEFT,)
        else:
            return None


def head_step(t: Term) -> Optional[Term]:
    """
    收缩头 β-redex

    Args:
        t: 不含显式替换的项

    Returns:
        Optional[Term]: 头归约一步的结果；t 为头范式时返回 None
    """
    path = _head_redex_path(t)
    if path is None:
        return None
    redex = subterm_at(t, path)
    return plug(t, path, substitute(redex.left.body, redex.left.var, redex.right))


@dataclass
class HeadRun:
    term: Term
    steps: int
    normal: bool


def head_normalize(t: Term, fuel: int) -> HeadRun:
    steps = 0
    while steps < fuel:
        reduct = head_step(t)
        if reduct is None:
            return HeadRun(t, steps, True)
        t = reduct
        steps += 1
    return HeadRun(t, steps, _head_redex_path(t) is None)


def weak_head_normalize(t: Term, fuel: int) -> HeadRun:
    """弱头归约：不进入抽象内部"""
    steps = 0
    while True:
        path = _head_redex_path(t, under_lambda=False)
        if path is None:
            return HeadRun(t, steps, True)
        if steps == fuel:
            return HeadRun(t, steps, False)
        redex = subterm_at(t, path)
        t = plug(t, path, substitute(redex.left.body, redex.left.var, redex.right))
        steps += 1


# ---------------------------------------------------------------------------
# 线性头归约

def head_spine(t: Term) -> List[Tuple[Path, Term]]:
    """头部脊：从根沿 Abs 体、App 左侧、ESub 体向下，直到变量或洞"""
    spine = []
    path: Path = ()
    node = t
    while True:
        spine.append((path, node))
        if isinstance(node, Abs):
            node, path = node.body, path + (Step.ABS_BODY,)
        elif isinstance(node, App):
            node, path = node.left, path + (Step.APP_LEFT,)
        elif isinstance(node, ESub):
            node, path = node.body, path + (Step.SUB_BODY,)
        else:
            return spine


def _head_bound_by(spine: List[Tuple[Path, Term]]) -> List[bool]:
    """
    对脊上每个 ESub 结点，判断脊末端的头变量是否由它绑定

    Returns:
        List[bool]: 与 spine 等长
    """
    result = [False] * len(spine)
    head = spine[-1][1]
    if not isinstance(head, Var):
        return result
    captured = False
    for index in range(len(spine) - 2, -1, -1):
        node = spine[index][1]
        if isinstance(node, (Abs, ESub)) and node.var == head.name and not captured:
            result[index] = isinstance(node, ESub)
            captured = True
    return result


def iter_redexes(t: Term, include_gc: bool = True) -> Iterator[Redex]:
    """按由外到内的顺序列出所有 ⊸-redex"""
    spine = head_spine(t)
    bound = _head_bound_by(spine)
    occurrence = spine[-1][0]
    for index, (path, node) in enumerate(spine):
        if isinstance(node, App):
            _, core = strip_subst(node.left)
            if isinstance(core, Abs):
                yield Redex(RuleName.DB, path)
        elif isinstance(node, ESub):
            if bound[index]:
                yield Redex(RuleName.LS, path, occurrence)
            elif include_gc and not occurs_free(node.var, node.body) and not _contains_hole(node.body):
                yield Redex(RuleName.GC, path)


def _contains_hole(t: Term) -> bool:
    return hole_path(t) is not None


def lhe_redexes(t: Term, include_gc: bool = True) -> List[Redex]:
    return list(iter_redexes(t, include_gc))


def _rename_capturing(t: Term, relative: Path, dangerous: Set[str], avoid: Set[str]) -> Term:
    """对 relative 路径上、名字落在 dangerous 中的绑定者做 α-重命名"""
    if not dangerous:
        return t
    avoid = set(avoid) | set(dangerous) | all_names(t)
    for index, step_ in enumerate(relative):
        prefix = relative[:index]
        node = subterm_at(t, prefix)
        binds = (
            (isinstance(node, Abs) and step_ is Step.ABS_BODY)
            or (isinstance(node, ESub) and step_ is Step.SUB_BODY)
        )
        if binds and node.var in dangerous:
            renamed = rename_binder(node, avoid)
            avoid.add(renamed.var)
            t = plug(t, prefix, renamed)
    return t


def _contract_db(redex: App) -> Term:
    ctx, core = strip_subst(redex.left)
    argument = redex.right
    inner = ctx.plug(core)
    # S 的绑定者不能捕获参数中的自由变量
    fv_arg = set(free_vars(argument))
    dangerous = fv_arg & set(ctx.binders())
    if dangerous:
        inner = _rename_capturing(inner, (Step.SUB_BODY,) * len(ctx), dangerous, fv_arg)
        ctx, core = strip_subst(inner)
    return ctx.plug(ESub(core.body, core.var, argument))


def _contract_ls(redex: ESub, relative: Path) -> Term:
    definiens = redex.definiens
    fv_def = set(free_vars(definiens))
    if redex.var in fv_def:
        redex = rename_binder(redex, fv_def | all_names(definiens))
    body = _rename_capturing(redex.body, relative, fv_def, fv_def)
    return ESub(plug(body, relative, definiens), redex.var, definiens)


def contract(t: Term, r: Redex) -> Term:
    """收缩 r 指定的 redex，不检查它是否属于 lhe_redexes(t)"""
    node = subterm_at(t, r.site)
    if r.rule is RuleName.DB:
        reduct = _contract_db(node)
    elif r.rule is RuleName.LS:
        relative = r.occurrence[len(r.site) + 1:]
        reduct = _contract_ls(node, relative)
    else:
        reduct = node.body
    return plug(t, r.site, reduct)


def one_step(t: Term) -> List[Term]:
    """t 的全部一步 ⊸ 结果，不含 t 本身"""
    return [contract(t, redex) for redex in lhe_redexes(t)]


def diamond_closes(t: Term, first: Redex, second: Redex) -> bool:
    """两个 redex 的结果 α-等价，或各再走恰好一步汇合"""
    left, right = contract(t, first), contract(t, second)
    if alpha_eq(left, right):
        return True
    return any(alpha_eq(a, b) for a in one_step(left) for b in one_step(right))


def lhe_step(t: Term, r: Redex) -> Term:
    """
    执行一步 ⊸

    Args:
        t: 项
        r: 必须属于 lhe_redexes(t)

    Returns:
        Term: 收缩结果；ls 只替换指定的头部出现并保留替换

    Raises:
        InvalidRedex: r 不是 t 的 redex
    """
    if r not in lhe_redexes(t):
        raise InvalidRedex(f"{r.rule.value}@{list(s.value for s in r.site)} 不是 {pretty(t)} 的 redex")
    return contract(t, r)


@dataclass
class LheRun:
    start: Term
    term: Term
    steps: List[Tuple[Redex, Term]] = field(default_factory=list)
    normal: bool = False

    @property
    def normal_form(self) -> Optional[Term]:
        return self.term if self.normal else None

    @property
    def rules(self) -> List[str]:
        return [redex.rule.value for redex, _ in self.steps]


def lhe_normalize(t: Term, fuel: int, include_gc: bool = True, strict: bool = False,
                  record: bool = True) -> LheRun:
    """
    按最左最外策略归约到 ⊸-范式

    Args:
        t: 项
        fuel: 最多步数
        include_gc: 是否使用 gc
        strict: 燃料耗尽时抛出 FuelExhausted
        record: 是否记录每一步

    Returns:
        LheRun: normal 为 False 表示燃料耗尽
    """
    result = LheRun(t, t)
    current = t
    count = 0
    while True:
        redex = next(iter_redexes(current, include_gc), None)
        if redex is None:
            result.term = current
            result.normal = True
            return result
        if count == fuel:
            result.term = current
            if strict:
                raise FuelExhausted(fuel, "线性头归约")
            logger.debug(f"线性头归约燃料 {fuel} 耗尽")
            return result
        current = contract(current, redex)
        count += 1
        if record:
            result.steps.append((redex, current))


def gc_normalize(t: Term) -> Term:
    """反复执行 gc 直到没有 gc-redex"""
    while True:
        redex = next((r for r in iter_redexes(t) if r.rule is RuleName.GC), None)
        if redex is None:
            return t
        t = contract(t, redex)


def unfold(t: Term) -> Term:
    """把所有显式替换展开为元层替换，由内向外"""
    if isinstance(t, (Var, Hole)):
        return t
    if isinstance(t, Abs):
        return Abs(t.var, unfold(t.body))
    if isinstance(t, App):
        return App(unfold(t.left), unfold(t.right))
    return substitute(unfold(t.body), t.var, unfold(t.definiens))


@dataclass(frozen=True)
class Spine:
    """
    ⊸-范式的脊 λx0…λxn.y u1…ul

    index 为头变量绑定者从最外层数起的下标；头变量自由时为 None
    """
    binders: Tuple[str, ...]
    head: str
    index: Optional[int]
    args: int


def spine(t: Term) -> Optional[Spine]:
    """剥去脊上的替换上下文读出头部形状；有 dB 或 ls redex 时返回 None"""
    if any(r.rule is not RuleName.GC for r in iter_redexes(t)):
        return None
    binders: List[str] = []
    args = 0
    node = t
    while True:
        if isinstance(node, ESub):
            node = node.body
        elif isinstance(node, Abs):
            if args:
                return None
            binders.append(node.var)
            node = node.body
        elif isinstance(node, App):
            args += 1
            node = node.left
        elif isinstance(node, Var):
            break
        else:
            return None
    index = None
    for position in range(len(binders) - 1, -1, -1):
        if binders[position] == node.name:
            index = position
            break
    return Spine(tuple(binders), node.name, index, args)


# ---------------------------------------------------------------------------
# 上下文重写

def _hole_inside(path: Path, hole: Optional[Path]) -> bool:
    return hole is not None and hole[:len(path)] == path


def ctx_rewrite(rule: RuleName, ctx: Term, plug_term: Optional[Term] = None) -> List[Term]:
    """
    上下文上的一步 ⊸ 重写，洞视为不透明原子

    Args:
        rule: dB、ls 或 gc
        ctx: 恰含一个洞的项
        plug_term: 参数化规则 ls,t 与 gc,t 使用的填充项

    Returns:
        List[Term]: 所有一步可达的上下文
    """
    hole = hole_path(ctx)
    reducts: List[Term] = []
    for redex in iter_redexes(ctx, include_gc=True):
        if redex.rule is not rule:
            continue
        node = subterm_at(ctx, redex.site)
        if rule is RuleName.DB:
            reducts.append(contract(ctx, redex))
        elif rule is RuleName.LS:
            if _hole_inside(redex.site + (Step.SUB_DEFINIENS,), hole):
                if plug_term is None:
                    continue
                # ls,t: H⟦x⟧[x<-C] ↦ H⟦C⟧[x<-C⟦t⟧]
                # 另一个出现到达定义项时洞留在替换中: H⟦x⟧[x<-C] ↦ H⟦C⟦t⟧⟧[x<-C]
                relative = redex.occurrence[len(redex.site) + 1:]
                filled = plug(node.definiens, hole[len(redex.site) + 1:], plug_term)
                renamed = _contract_ls(ESub(node.body, node.var, filled), relative)
                copy = plug(renamed.body, relative, node.definiens)
                reducts.append(plug(ctx, redex.site, ESub(copy, renamed.var, filled)))
                reducts.append(plug(ctx, redex.site, ESub(renamed.body, renamed.var, node.definiens)))
            else:
                reducts.append(contract(ctx, redex))
        elif not _hole_inside(redex.site + (Step.SUB_DEFINIENS,), hole):
            reducts.append(contract(ctx, redex))
    if rule is RuleName.GC:
        reducts.extend(_gc_around_hole(ctx, hole, plug_term))
    return reducts


def _gc_around_hole(ctx: Term, hole: Optional[Path], plug_term: Optional[Term]) -> List[Term]:
    """C[x<-u] ↦gc,t C：洞位于被删除替换的体内"""
    reducts: List[Term] = []
    if hole is None:
        return reducts
    for path, node in head_spine(ctx):
        if not isinstance(node, ESub) or not _hole_inside(path + (Step.SUB_BODY,), hole):
            continue
        if occurs_free(node.var, node.body):
            if plug_term is not None and not occurs_free(node.var, plug_term):
                logger.warning(
                    f"gc,t: 仅检查填充项时 [{node.var}<-{pretty(node.definiens)}] 可删除，"
                    f"但上下文中仍有 {node.var} 的自由出现"
                )
            continue
        if plug_term is None or occurs_free(node.var, plug_term):
            continue
        reducts.append(plug(ctx, path, node.body))
    return reducts
