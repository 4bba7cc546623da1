"""
提升套件

在初始 tape 底部追加 𝗉·𝗉 和一个哑位置后，原运行的每一步仍然成立，
只是 tape 底部多出同样的后缀。
"""
from dataclasses import replace

from machine import LoggedPosition, Marker, Next, State, run, step
from suite_loader import ItemResult, SuiteBase, SuiteContext
from syntax import Term, pretty

SUFFIX = (Marker.P, Marker.P, LoggedPosition("dummy", (), (), ()))


def lift(s: State) -> State:
    return replace(s, tape=s.tape + SUFFIX)


class LiftingSuite(SuiteBase):

    @property
    def name(self) -> str:
        return "lifting"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "在 tape 底部追加后缀不改变运行前缀"

    def check(self, context: SuiteContext, item: Term) -> ItemResult:
        result = ItemResult()
        for k in context.ks:
            trace = run(item, k, context.fuel).trace
            for index in range(len(trace) - 1):
                result.checked += 1
                lifted = step(lift(trace[index]))
                if not isinstance(lifted, Next) or lifted.state != lift(trace[index + 1]):
                    result.fail(term=pretty(item), k=k, index=index)
                    break
        return result
