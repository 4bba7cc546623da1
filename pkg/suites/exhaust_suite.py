"""
可穷尽性套件

对运行中的每个可达状态做有界的可穷尽性判定；同时确认运行中没有违例。
燃料内未终止的运行也检查全部已访问状态。
被截断的证书逐步加深重试；Unknown 与加深后仍被截断的证书都算失败。
"""
from exhaustibility import CounterExample, Exhaustible, Unknown, certificate_depth, certify
from machine import Violation, run
from suite_loader import ItemResult, SuiteBase, SuiteContext
from syntax import Term, pretty


class ExhaustSuite(SuiteBase):

    @property
    def name(self) -> str:
        return "exhaust"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "可达状态都是可穷尽的，带 log 位置从不阻塞"

    def check(self, context: SuiteContext, item: Term) -> ItemResult:
        result = ItemResult()
        for k in context.ks:
            outcome = run(item, k, context.exhaust_fuel)
            if isinstance(outcome.outcome, Violation):
                result.fail(term=pretty(item), k=k, kind="violation", detail=outcome.outcome.description)
                continue
            memo = {}
            for index, s in enumerate(outcome.trace):
                result.checked += 1
                verdict = certify(s, context.depth, context.exhaust_fuel, memo)
                if isinstance(verdict, CounterExample):
                    result.fail(term=pretty(item), k=k, index=index, kind=verdict.test.kind, detail=verdict.reason)
                    break
                if isinstance(verdict, Unknown):
                    result.fail(term=pretty(item), k=k, index=index, kind="unknown", detail=verdict.reason)
                    break
                if isinstance(verdict, Exhaustible) and verdict.truncated:
                    result.fail(term=pretty(item), k=k, index=index, kind="truncated", depth=certificate_depth(s))
                    break
        return result
