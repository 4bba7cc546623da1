"""
平衡套件：逐状态检查代码不变与平衡不变式，并确认没有违例
"""
from exhaustibility import check_run_invariants
from machine import Violation, run
from suite_loader import ItemResult, SuiteBase, SuiteContext
from syntax import Term, pretty


class BalanceSuite(SuiteBase):

    @property
    def name(self) -> str:
        return "balance"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "代码不变、平衡不变式、↑ 状态 tape 上有位置"

    def check(self, context: SuiteContext, item: Term) -> ItemResult:
        result = ItemResult()
        for k in context.ks:
            outcome = run(item, k, context.fuel)
            result.checked += len(outcome.trace)
            if isinstance(outcome.outcome, Violation):
                result.fail(term=pretty(item), k=k, kind="violation", detail=outcome.outcome.description)
                continue
            report = check_run_invariants(outcome.trace, reversibility=False)
            if not report.ok:
                first = report.first_failure
                result.fail(term=pretty(item), k=k, index=first.index, kind=first.kind, detail=first.detail)
        return result
