"""
菱形性质套件：两个不同 ⊸-redex 的结果 α-等价，或各再走恰好一步即可汇合
"""
from itertools import combinations

from reduction import diamond_closes, lhe_redexes
from suite_loader import ItemResult, SuiteBase, SuiteContext
from syntax import Term, path_text, pretty, size

# 只检查结点数不超过此值的项
MAX_SIZE = 10


class DiamondSuite(SuiteBase):

    @property
    def name(self) -> str:
        return "diamond"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "⊸ 的菱形性质"

    def items(self, context: SuiteContext):
        return [t for t in context.corpus() if size(t) <= MAX_SIZE]

    def check(self, context: SuiteContext, item: Term) -> ItemResult:
        result = ItemResult()
        for first, second in combinations(lhe_redexes(item), 2):
            result.checked += 1
            if not diamond_closes(item, first, second):
                result.fail(term=pretty(item), first=f"{first.rule.value}@{path_text(first.site)}",
                            second=f"{second.rule.value}@{path_text(second.site)}")
        return result
