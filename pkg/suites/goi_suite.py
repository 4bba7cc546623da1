"""
GoI 一致性套件

每次运行的每个转移：var/bt2/var2/var3 的微观展开与宏观编码一致，其他转移一步交换。
同一绑定者下编码相同的不同带 log 位置记为标记项。
"""
from goi import check_coherence, encoding_collisions, logged_positions_of
from machine import run
from suite_loader import ItemResult, SuiteBase, SuiteContext
from syntax import Term, pretty


class GoiSuite(SuiteBase):

    @property
    def name(self) -> str:
        return "goi"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "带 log 位置与 GoI 栈编码的宏观/微观一致性"

    def check(self, context: SuiteContext, item: Term) -> ItemResult:
        result = ItemResult()
        for k in context.ks:
            outcome = run(item, k, context.fuel)
            report = check_coherence(outcome)
            result.checked += report.checked
            if not report.ok:
                first = report.failures[0]
                result.fail(term=pretty(item), k=k, index=first.index, rule=first.rule, detail=first.detail)
            collisions = encoding_collisions(item, logged_positions_of(outcome))
            if collisions:
                result.flag(term=pretty(item), k=k, kind="collision", count=len(collisions))
        return result
