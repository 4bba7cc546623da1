"""
读出头变量套件

对带填充的 ⊸-范式脊 λx0…λxn.x_m u1…ul：深度 n+1 处读出 ⟨m,l⟩（头变量自由时为开放对）；
闭项在 k ≤ n 时结果为 ⇓。同时检查 spine 读出的形状。
"""
from corpus import SpineCase, spine_corpus
from machine import semantics
from reduction import spine
from suite_loader import ItemResult, SuiteBase, SuiteContext
from syntax import pretty

# 脊例子个数的下限
MIN_CASES = 500


class ReadingSuite(SuiteBase):

    @property
    def name(self) -> str:
        return "reading"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "从 ⊸-范式的脊读出头变量下标与参数个数"

    def items(self, context: SuiteContext):
        return spine_corpus(context.seed, max(context.count, MIN_CASES))

    def check(self, context: SuiteContext, item: SpineCase) -> ItemResult:
        result = ItemResult(checked=1)
        term = pretty(item.term)
        actual = semantics(item.term, item.n + 1, context.fuel)
        if actual != item.expected():
            result.fail(term=term, k=item.n + 1, expected=str(item.expected()), actual=str(actual))
        if item.closed:
            for k in range(item.n + 1):
                result.checked += 1
                below = semantics(item.term, k, context.fuel)
                if below != item.expected_below():
                    result.fail(term=term, k=k, expected=str(item.expected_below()), actual=str(below))
                    break
        shape = spine(item.term)
        if shape is None or len(shape.binders) != item.n + 1 or shape.index != item.head_index \
                or shape.args != item.args:
            result.fail(term=term, kind="spine", actual=str(shape))
        return result
