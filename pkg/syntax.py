"""
线性替换演算（LSC）的项、路径与位置

项由四种构造组成：变量、抽象、应用、显式替换 t[x<-u]；
Hole 只用于表示上下文（带一个洞的项），parse 永远不会产生它。
位置用 (根项, 路径) 表示，路径是从根出发的步骤序列。
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Dict, FrozenSet, Iterator, List, Optional, Set, Tuple, Union

from pyparsing import (
    Forward,
    Group,
    OneOrMore,
    ParseBaseException,
    ParserElement,
    Regex,
    Suppress,
    ZeroOrMore,
    one_of,
)

from errors import PathError, TermSyntaxError

logger = logging.getLogger(__name__)

HOLE_TEXT = "⟦·⟧"


class Step(str, Enum):
    """路径中的一步"""
    ABS_BODY = "AbsBody"
    APP_LEFT = "AppLeft"
    APP_RIGHT = "AppRight"
    SUB_BODY = "SubBody"
    SUB_DEFINIENS = "SubDefiniens"

    @property
    def short(self) -> str:
        return _SHORT_NAMES[self]


_SHORT_NAMES = {
    Step.ABS_BODY: "B",
    Step.APP_LEFT: "L",
    Step.APP_RIGHT: "R",
    Step.SUB_BODY: "S",
    Step.SUB_DEFINIENS: "D",
}

# 进入参数或替换定义体，层级加一
LEVEL_STEPS = frozenset({Step.APP_RIGHT, Step.SUB_DEFINIENS})
# 头部步骤：不改变层级
HEAD_STEPS = frozenset({Step.ABS_BODY, Step.APP_LEFT, Step.SUB_BODY})

Path = Tuple[Step, ...]


class _Printable:
    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Var(_Printable):
    name: str


@dataclass(frozen=True)
class Abs(_Printable):
    var: str
    body: "Term"


@dataclass(frozen=True)
class App(_Printable):
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class ESub(_Printable):
    """显式替换 body[var<-definiens]，var 只在 body 中被绑定"""
    body: "Term"
    var: str
    definiens: "Term"


@dataclass(frozen=True)
class Hole(_Printable):
    pass


Term = Union[Var, Abs, App, ESub, Hole]


def level_of(path: Path) -> int:
    """路径的层级：AppRight 与 SubDefiniens 步骤的个数"""
    return sum(1 for step in path if step in LEVEL_STEPS)


def path_text(path: Path) -> str:
    return "[" + ",".join(step.short for step in path) + "]"


def children(t: Term) -> List[Tuple[Step, Term]]:
    if isinstance(t, Abs):
        return [(Step.ABS_BODY, t.body)]
    if isinstance(t, App):
        return [(Step.APP_LEFT, t.left), (Step.APP_RIGHT, t.right)]
    if isinstance(t, ESub):
        return [(Step.SUB_BODY, t.body), (Step.SUB_DEFINIENS, t.definiens)]
    return []


def child(t: Term, step: Step) -> Term:
    if step is Step.ABS_BODY and isinstance(t, Abs):
        return t.body
    if step is Step.APP_LEFT and isinstance(t, App):
        return t.left
    if step is Step.APP_RIGHT and isinstance(t, App):
        return t.right
    if step is Step.SUB_BODY and isinstance(t, ESub):
        return t.body
    if step is Step.SUB_DEFINIENS and isinstance(t, ESub):
        return t.definiens
    raise PathError(f"无法沿 {step.value} 进入 {type(t).__name__}")


def with_child(t: Term, step: Step, new: Term) -> Term:
    if step is Step.ABS_BODY and isinstance(t, Abs):
        return Abs(t.var, new)
    if step is Step.APP_LEFT and isinstance(t, App):
        return App(new, t.right)
    if step is Step.APP_RIGHT and isinstance(t, App):
        return App(t.left, new)
    if step is Step.SUB_BODY and isinstance(t, ESub):
        return ESub(new, t.var, t.definiens)
    if step is Step.SUB_DEFINIENS and isinstance(t, ESub):
        return ESub(t.body, t.var, new)
    raise PathError(f"无法沿 {step.value} 进入 {type(t).__name__}")


def subterm_at(root: Term, path: Path) -> Term:
    node = root
    for depth, step in enumerate(path):
        try:
            node = child(node, step)
        except PathError:
            raise PathError(f"路径 {path_text(path)} 在第 {depth} 步无法解析") from None
    return node


def plug(root: Term, path: Path, filler: Term) -> Term:
    """
    把 root 在 path 处的子项替换为 filler，不做任何重命名（允许捕获）

    Args:
        root: 根项
        path: 洞的位置
        filler: 填入的项

    Returns:
        Term: 新的根项
    """
    spine = []
    node = root
    for step in path:
        spine.append(node)
        node = child(node, step)
    result = filler
    for parent, step in zip(reversed(spine), reversed(path)):
        result = with_child(parent, step, result)
    return result


def context_of(root: Term, path: Path) -> Term:
    """以 Hole 表示的上下文"""
    return plug(root, path, Hole())


def hole_path(ctx: Term) -> Optional[Path]:
    """上下文中洞的路径；没有洞时返回 None"""
    stack: List[Tuple[Term, Path]] = [(ctx, ())]
    while stack:
        node, path = stack.pop()
        if isinstance(node, Hole):
            return path
        for step, sub in children(node):
            stack.append((sub, path + (step,)))
    return None


def fill(ctx: Term, filler: Term) -> Term:
    path = hole_path(ctx)
    if path is None:
        raise PathError("上下文中没有洞")
    return plug(ctx, path, filler)


@dataclass(frozen=True)
class Position:
    """项中的一个出现：根项加路径"""
    root: Term
    path: Path

    @property
    def subterm(self) -> Term:
        return subterm_at(self.root, self.path)

    @property
    def context(self) -> Term:
        return context_of(self.root, self.path)

    @property
    def level(self) -> int:
        return level_of(self.path)

    def __str__(self) -> str:
        return f"({pretty(self.subterm)}, {pretty(self.context)})"


def resolve(root: Term, path: Path) -> Position:
    path = tuple(path)
    subterm_at(root, path)
    return Position(root, path)


def outer_path(path: Path, m: int) -> Path:
    """在第 m 个层级步骤（从根数起）之后截断路径"""
    level = level_of(path)
    if m < 1 or m > level:
        raise PathError(f"外层位置越界: m={m}, 层级={level}")
    seen = 0
    for index, step in enumerate(path):
        if step in LEVEL_STEPS:
            seen += 1
            if seen == m:
                return tuple(path[:index + 1])
    raise PathError(f"外层位置越界: m={m}")


def outer_position(p: Position, m: int) -> Position:
    """
    p 的 m 层外层位置：层级为 m，其子项包含 p 的子项

    Args:
        p: 层级至少为 m 的位置
        m: 1 ≤ m ≤ level(p)

    Returns:
        Position: 外层位置
    """
    return Position(p.root, outer_path(p.path, m))


@dataclass(frozen=True)
class SubstCtx:
    """替换上下文 ⟨·⟩[x1<-u1]...[xk<-uk]，entries 由内向外"""
    entries: Tuple[Tuple[str, Term], ...] = ()

    def plug(self, t: Term) -> Term:
        for var, definiens in self.entries:
            t = ESub(t, var, definiens)
        return t

    def binders(self) -> Tuple[str, ...]:
        return tuple(var for var, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def strip_subst(t: Term) -> Tuple[SubstCtx, Term]:
    entries = []
    while isinstance(t, ESub):
        entries.append((t.var, t.definiens))
        t = t.body
    return SubstCtx(tuple(reversed(entries))), t


def free_vars(t: Term) -> FrozenSet[str]:
    result: Set[str] = set()
    stack: List[Tuple[Term, FrozenSet[str]]] = [(t, frozenset())]
    while stack:
        node, bound = stack.pop()
        if isinstance(node, Var):
            if node.name not in bound:
                result.add(node.name)
        elif isinstance(node, Abs):
            stack.append((node.body, bound | {node.var}))
        elif isinstance(node, App):
            stack.append((node.left, bound))
            stack.append((node.right, bound))
        elif isinstance(node, ESub):
            stack.append((node.body, bound | {node.var}))
            stack.append((node.definiens, bound))
    return frozenset(result)


def occurs_free(name: str, t: Term) -> bool:
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            if node.name == name:
                return True
        elif isinstance(node, Abs):
            if node.var != name:
                stack.append(node.body)
        elif isinstance(node, App):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, ESub):
            if node.var != name:
                stack.append(node.body)
            stack.append(node.definiens)
    return False


def all_names(t: Term) -> Set[str]:
    """项中出现的所有名字（自由的与绑定的）"""
    names: Set[str] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            names.add(node.name)
        elif isinstance(node, Abs):
            names.add(node.var)
            stack.append(node.body)
        elif isinstance(node, ESub):
            names.add(node.var)
            stack.append(node.body)
            stack.append(node.definiens)
        elif isinstance(node, App):
            stack.append(node.left)
            stack.append(node.right)
    return names


def size(t: Term) -> int:
    count = 0
    stack = [t]
    while stack:
        node = stack.pop()
        count += 1
        stack.extend(sub for _, sub in children(node))
    return count


def is_pure(t: Term) -> bool:
    """不含显式替换（也不含洞）"""
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, (ESub, Hole)):
            return False
        stack.extend(sub for _, sub in children(node))
    return True


def iter_paths(t: Term) -> Iterator[Path]:
    """前序遍历所有可解析路径"""
    stack: List[Tuple[Term, Path]] = [(t, ())]
    while stack:
        node, path = stack.pop()
        yield path
        for step, sub in reversed(children(node)):
            stack.append((sub, path + (step,)))


def fresh_name(base: str, avoid: Set[str]) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def rename_apart(t: Term) -> Term:
    """α-等价的项：绑定名两两不同，也不与自由变量同名；所有路径保持不变"""
    used = set(free_vars(t))

    def walk(node: Term, env: Dict[str, str]) -> Term:
        if isinstance(node, Var):
            return Var(env.get(node.name, node.name))
        if isinstance(node, Hole):
            return node
        if isinstance(node, App):
            return App(walk(node.left, env), walk(node.right, env))
        new = fresh_name(node.var, used) if node.var in used else node.var
        used.add(new)
        inner = {**env, node.var: new}
        if isinstance(node, Abs):
            return Abs(new, walk(node.body, inner))
        return ESub(walk(node.body, inner), new, walk(node.definiens, env))

    return walk(t, {})


# 绑定环境：(名字, 深度, 外层环境) 组成的链
_Env = Optional[Tuple[str, int, "_Env"]]


def _lookup(env: _Env, name: str) -> Optional[int]:
    while env is not None:
        if env[0] == name:
            return env[1]
        env = env[2]
    return None


def alpha_eq(t: Term, u: Term) -> bool:
    """α-等价：两个项在规范的无名形式下相同"""
    stack: List[Tuple[Term, _Env, Term, _Env, int]] = [(t, None, u, None, 0)]
    while stack:
        a, env_a, b, env_b, depth = stack.pop()
        if type(a) is not type(b):
            return False
        if isinstance(a, Var):
            index_a = _lookup(env_a, a.name)
            index_b = _lookup(env_b, b.name)
            if index_a is None and index_b is None:
                if a.name != b.name:
                    return False
            elif index_a != index_b:
                return False
        elif isinstance(a, Abs):
            stack.append((a.body, (a.var, depth, env_a), b.body, (b.var, depth, env_b), depth + 1))
        elif isinstance(a, App):
            stack.append((a.left, env_a, b.left, env_b, depth))
            stack.append((a.right, env_a, b.right, env_b, depth))
        elif isinstance(a, ESub):
            stack.append((a.body, (a.var, depth, env_a), b.body, (b.var, depth, env_b), depth + 1))
            stack.append((a.definiens, env_a, b.definiens, env_b, depth))
    return True


# ---------------------------------------------------------------------------
# 打印

def _atom(t: Term) -> str:
    if isinstance(t, (Var, Hole, ESub)):
        return pretty(t)
    return f"({pretty(t)})"


def pretty(t: Term) -> str:
    """使用 \\ 与 [x<-u]，只加必要的括号"""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Hole):
        return HOLE_TEXT
    if isinstance(t, Abs):
        return f"\\{t.var}.{pretty(t.body)}"
    if isinstance(t, App):
        left = f"({pretty(t.left)})" if isinstance(t.left, Abs) else pretty(t.left)
        right = _atom(t.right)
        return f"{left} {right}"
    if isinstance(t, ESub):
        return f"{_atom(t.body)}[{t.var}<-{pretty(t.definiens)}]"
    raise TypeError(f"不是项: {t!r}")


def pretty_context(root: Term, path: Path) -> str:
    return pretty(context_of(root, path))


# ---------------------------------------------------------------------------
# 解析

def _fold_esubs(tokens) -> Term:
    body = tokens[0]
    for suffix in tokens[1:]:
        body = ESub(body, suffix[0], suffix[1])
    return body


def _build_grammar() -> ParserElement:
    term = Forward()
    name = Regex(r"[a-zA-Z][a-zA-Z0-9_']*")
    var = name.copy().set_parse_action(lambda tokens: Var(tokens[0]))
    atom = var | (Suppress("(") + term + Suppress(")"))
    esuffix = Group(Suppress("[") + name + Suppress("<-") + term + Suppress("]"))
    item = (atom + ZeroOrMore(esuffix)).set_parse_action(_fold_esubs)
    app = OneOrMore(item).set_parse_action(lambda tokens: reduce(App, tokens))
    lam = (Suppress(one_of("\\ λ")) + name + Suppress(".") + term).set_parse_action(
        lambda tokens: Abs(tokens[0], tokens[1])
    )
    term <<= lam | app
    return term


_GRAMMAR = _build_grammar()


def parse(text: str) -> Term:
    """
    解析项

    Args:
        text: 形如 "(\\x.x x)(\\y.y)" 的文本

    Returns:
        Term: 解析结果

    Raises:
        TermSyntaxError: 文本不符合语法
    """
    try:
        result = _GRAMMAR.parse_string(text, parse_all=True)
    except ParseBaseException as e:
        logger.debug(f"解析失败: {text!r}: {e}")
        raise TermSyntaxError(text, e.loc, e.lineno, e.col, e.msg) from None
    return result[0]


def path_from_json(items: List[str]) -> Path:
    return tuple(Step(item) for item in items)


def path_to_json(path: Path) -> List[str]:
    return [step.value for step in path]


def binder_scope_occurrences(root: Term, binder_path: Path) -> List[Path]:
    """
    绑定者作用域内被它绑定的所有变量出现，按从左到右排列（替换体先于定义体）

    Args:
        root: 根项
        binder_path: Abs 或 ESub 结点的路径

    Returns:
        List[Path]: 绝对路径列表
    """
    binder = subterm_at(root, binder_path)
    if isinstance(binder, Abs):
        start = binder_path + (Step.ABS_BODY,)
    elif isinstance(binder, ESub):
        start = binder_path + (Step.SUB_BODY,)
    else:
        raise PathError(f"{path_text(binder_path)} 处不是绑定者")
    name = binder.var
    found: List[Path] = []
    stack: List[Tuple[Term, Path]] = [(subterm_at(root, start), start)]
    while stack:
        node, path = stack.pop()
        if isinstance(node, Var):
            if node.name == name:
                found.append(path)
            continue
        for step, sub in reversed(children(node)):
            if isinstance(node, Abs) and node.var == name:
                continue
            if isinstance(node, ESub) and node.var == name and step is Step.SUB_BODY:
                continue
            stack.append((sub, path + (step,)))
    return found


def binder_of(root: Term, path: Path) -> Optional[Path]:
    """路径处变量的绑定者路径；自由变量返回 None"""
    nodes = [root]
    for step in path:
        nodes.append(child(nodes[-1], step))
    node = nodes[-1]
    if not isinstance(node, Var):
        raise PathError(f"{path_text(path)} 处不是变量")
    for index in range(len(path) - 1, -1, -1):
        if path[index] not in (Step.ABS_BODY, Step.SUB_BODY):
            continue
        parent = nodes[index]
        if isinstance(parent, (Abs, ESub)) and parent.var == node.name:
            return tuple(path[:index])
    return None

