"""
可逆性套件

对每个可达状态 s'：后退一步回到它的前一状态，且从后退得到的状态前进一步回到 s'。
"""
from exhaustibility import check_forward_after_backward
from machine import run, step_backward
from suite_loader import ItemResult, SuiteBase, SuiteContext
from syntax import Term, pretty


class ReversibleSuite(SuiteBase):

    @property
    def name(self) -> str:
        return "reversible"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "后退一步再前进一步回到原状态"

    def check(self, context: SuiteContext, item: Term) -> ItemResult:
        result = ItemResult()
        for k in context.ks:
            trace = run(item, k, context.fuel).trace
            result.checked += len(trace)
            for index in range(1, len(trace)):
                if step_backward(trace[index]) != trace[index - 1]:
                    result.fail(term=pretty(item), k=k, index=index, kind="backward")
                    break
            bad = check_forward_after_backward(trace)
            if bad:
                result.fail(term=pretty(item), k=k, index=bad[0], kind="forward-after-backward")
        return result
