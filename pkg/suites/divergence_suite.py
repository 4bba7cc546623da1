"""
发散套件：⟦Ω⟧k 对 k ≤ 4 超时；⟦Λ⟧k 对 k ≤ 8 终止于 ⇓
"""
from corpus import BIG_LAMBDA, OMEGA
from machine import HasAbs, Timeout, semantics
from suite_loader import ItemResult, SuiteBase, SuiteContext
from syntax import pretty

DIVERGENCE_FUEL = 10_000


class DivergenceSuite(SuiteBase):

    @property
    def name(self) -> str:
        return "divergence"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "Ω 不终止，Λ 终止但从不成功"

    def items(self, context: SuiteContext):
        return [(OMEGA, k, Timeout) for k in range(5)] + [(BIG_LAMBDA, k, HasAbs) for k in range(9)]

    def check(self, context: SuiteContext, item) -> ItemResult:
        term, k, expected = item
        result = ItemResult(checked=1)
        actual = semantics(term, k, DIVERGENCE_FUEL)
        if not isinstance(actual, expected):
            result.fail(term=pretty(term), k=k, expected=expected.__name__, actual=str(actual))
        return result
