"""
确定性的项生成器

为检查套件与命令行 check 提供可复现的项集合：随机 LSC 项、
带替换上下文填充的 ⊸-范式脊，以及几个具名的例子。
"""
import logging
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from machine import HasAbs, OpenPair, Pair, SemanticsOutcome
from syntax import Abs, App, ESub, Term, Var, parse, size

logger = logging.getLogger(__name__)

BOUND_NAMES = ("x", "y", "z", "w", "u", "v")
FREE_NAMES = ("a", "b", "c")

WORKED_RUN = parse(r"((\z.\x.x) w)(\y.y)")
BACKTRACK_RUN = parse(r"(\x.x x)(\y.y)")
OMEGA = parse(r"(\x.x x)(\x.x x)")
BIG_LAMBDA = parse(r"(\x.\y.x x)(\x.\y.x x)")

NAMED_TERMS = {
    "worked": WORKED_RUN,
    "backtrack": BACKTRACK_RUN,
    "omega": OMEGA,
    "big-lambda": BIG_LAMBDA,
}


def _kinds(n: int, has_names: bool, allow_es: bool) -> List[Tuple[str, int]]:
    """给定结点数与是否有可用名字时可行的构造子及其权重"""
    if n == 1:
        return [("var", 1)] if has_names else []
    leaf = 1 if has_names else 2
    kinds = [("abs", 2)]
    if n - 1 >= 2 * leaf:
        kinds.append(("app", 3))
    if allow_es and n - 1 >= 1 + leaf:
        kinds.append(("esub", 1))
    return kinds


def _pick(rng: random.Random, weighted: Sequence[Tuple[str, int]]) -> str:
    names = [name for name, _ in weighted]
    weights = [weight for _, weight in weighted]
    return rng.choices(names, weights=weights)[0]


def random_term(rng: random.Random, n: int, scope: Tuple[str, ...] = (), allow_es: bool = True,
                free_names: Tuple[str, ...] = FREE_NAMES) -> Term:
    """
    生成恰有 n 个结点的随机项

    Args:
        rng: 随机数发生器
        n: 结点数（Var/Abs/App/ESub 各计 1）
        scope: 当前作用域内的绑定名
        allow_es: 是否生成显式替换
        free_names: 可用的自由变量名

    Returns:
        Term: 随机项
    """
    if n < 1:
        raise ValueError(f"结点数必须为正: {n}")
    names = tuple(dict.fromkeys(scope + free_names))
    kinds = _kinds(n, bool(names), allow_es)
    if not kinds:
        raise ValueError("没有可用的变量名，无法生成单个结点的项")
    kind = _pick(rng, kinds)
    if kind == "var":
        return Var(rng.choice(names))
    if kind == "abs":
        var = rng.choice(BOUND_NAMES)
        return Abs(var, random_term(rng, n - 1, scope + (var,), allow_es, free_names))
    leaf = 1 if names else 2
    if kind == "app":
        left = rng.randint(leaf, n - 1 - leaf)
        return App(random_term(rng, left, scope, allow_es, free_names),
                   random_term(rng, n - 1 - left, scope, allow_es, free_names))
    var = rng.choice(BOUND_NAMES)
    body = rng.randint(1, n - 1 - leaf)
    return ESub(random_term(rng, body, scope + (var,), allow_es, free_names), var,
                random_term(rng, n - 1 - body, scope, allow_es, free_names))


def term_corpus(seed: int, count: int, max_size: int, allow_es: bool = True, closed: bool = False) -> List[Term]:
    """
    可复现的项集合

    结点数不超过 max_size 的具名例子总在最前面。

    Args:
        seed: 随机种子
        count: 项的个数
        max_size: 最大结点数
        allow_es: 是否包含显式替换
        closed: 是否只生成闭项

    Returns:
        List[Term]: 长度为 count
    """
    rng = random.Random(seed)
    terms = [t for t in NAMED_TERMS.values() if size(t) <= max_size][:count]
    free_names = () if closed else FREE_NAMES
    smallest = 2 if closed else 1
    while len(terms) < count:
        n = rng.randint(smallest, max(smallest, max_size))
        terms.append(random_term(rng, n, (), allow_es, free_names))
    logger.debug(f"生成项集合: seed={seed}, {count} 项, 最大结点数 {max_size}")
    return terms


# ---------------------------------------------------------------------------
# ⊸-范式的脊

@dataclass(frozen=True)
class SpineCase:
    """
    λx0…λxn.h u1…ul，外加不捕获头变量的替换上下文

    head_index 为 None 表示头变量自由
    """
    term: Term
    n: int
    head_index: Optional[int]
    head: str
    args: int
    closed: bool

    def expected(self) -> SemanticsOutcome:
        """深度 n+1 处的读出结果"""
        if self.head_index is None:
            return OpenPair(self.head, self.args)
        return Pair(self.head_index, self.args)

    def expected_below(self) -> SemanticsOutcome:
        """闭项在深度 k ≤ n 处的结果"""
        return HasAbs()


class _Padding:
    def __init__(self, rng: random.Random, probability: float, closed: bool):
        self.rng = rng
        self.probability = probability
        self.closed = closed
        self.counter = 0

    def __call__(self, t: Term) -> Term:
        for _ in range(2):
            if self.rng.random() >= self.probability:
                break
            name = f"e{self.counter}"
            self.counter += 1
            if self.closed:
                definiens = random_term(self.rng, self.rng.randint(2, 3), (), False, ())
            else:
                definiens = random_term(self.rng, self.rng.randint(1, 3), (), False, FREE_NAMES)
            t = ESub(t, name, definiens)
        return t


def spine_term(rng: random.Random, n: int, m: Optional[int], l: int, padding: float = 0.5,
               closed: bool = True) -> SpineCase:
    """
    生成一个带填充的脊 λx0…λxn.x_m u1…ul

    Args:
        rng: 随机数发生器
        n: 最内层绑定者的下标（共 n+1 个 λ）
        m: 头变量的绑定者下标；None 表示头变量自由
        l: 参数个数
        padding: 每个脊上子项外包替换的概率
        closed: 参数与定义项是否为闭项

    Returns:
        SpineCase: 项及其期望读出
    """
    if m is not None and not 0 <= m <= n:
        raise ValueError(f"头变量下标 {m} 不在 0..{n} 内")
    if m is None and closed:
        raise ValueError("闭项的头变量不能自由")
    binders = tuple(f"x{i}" for i in range(n + 1))
    pad = _Padding(rng, padding, closed)
    head = binders[m] if m is not None else rng.choice(FREE_NAMES)
    t: Term = pad(Var(head))
    free_names = () if closed else FREE_NAMES
    for _ in range(l):
        arg = random_term(rng, rng.randint(1, 3), binders, True, free_names)
        t = pad(App(t, arg))
    for var in reversed(binders):
        t = pad(Abs(var, t))
    return SpineCase(t, n, m, head, l, closed)


def spine_corpus(seed: int, count: int, max_n: int = 4, max_l: int = 3, padding: float = 0.5,
                 free_ratio: float = 0.2) -> List[SpineCase]:
    """可复现的脊集合；约 free_ratio 的例子头变量自由"""
    rng = random.Random(seed)
    cases = []
    for _ in range(count):
        n = rng.randint(0, max_n)
        l = rng.randint(0, max_l)
        if rng.random() < free_ratio:
            cases.append(spine_term(rng, n, None, l, padding, closed=False))
        else:
            cases.append(spine_term(rng, n, rng.randint(0, n), l, padding, closed=True))
    return cases
