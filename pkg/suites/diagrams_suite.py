"""
改进图套件

对每个 ⊸-redex 与每个 k 同步运行两台机器，在每个同步点检查四个子句都能在界内闭合。
"""
from improvement import co_run
from reduction import lhe_redexes
from suite_loader import ItemResult, SuiteBase, SuiteContext
from syntax import Term


class DiagramsSuite(SuiteBase):

    @property
    def name(self) -> str:
        return "diagrams"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "▷dB/▷ls/▷gc 满足改进互模拟的图表"

    def check(self, context: SuiteContext, item: Term) -> ItemResult:
        result = ItemResult()
        for redex in lhe_redexes(item):
            for k in context.ks:
                report = co_run(item, redex, k, context.exhaust_fuel)
                result.checked += report.sync_points
                if not report.ok:
                    result.fail(**report.to_dict())
                elif report.timed_out:
                    result.flag(kind="timeout", **report.to_dict())
        return result
