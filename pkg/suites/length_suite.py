"""
运行长度套件

对每一步 t ⊸ u，若 t 在 kmax 处终止，则存在 k0 ≤ kmax 使得对所有 h ∈ [k0, kmax] 有 |t|h > |u|h。
"""
from improvement import check_length_decrease, measure
from reduction import contract, lhe_redexes
from suite_loader import ItemResult, SuiteBase, SuiteContext
from syntax import Term, path_text, pretty


class LengthSuite(SuiteBase):

    @property
    def name(self) -> str:
        return "length"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "终止运行的长度沿 ⊸ 严格下降"

    def check(self, context: SuiteContext, item: Term) -> ItemResult:
        result = ItemResult()
        if measure(item, context.kmax, context.fuel)[1] is None:
            return result
        for redex in lhe_redexes(item):
            result.checked += 1
            u = contract(item, redex)
            decrease = check_length_decrease(item, u, context.fuel, context.kmax)
            if decrease.k0 is not None:
                continue
            where = {"term": pretty(item), "rule": redex.rule.value, "site": path_text(redex.site),
                     "lengths": [list(row) for row in decrease.lengths]}
            if decrease.flagged:
                result.flag(kind="timeout", **where)
            else:
                result.fail(kind="no-k0", **where)
        return result
