"""
单调性套件

|t|k ≤ |t|k+1（未终止记为 ∞）；k 处成功时，更大的 h 处同类成功且长度不变。
"""
from improvement import measure
from machine import is_success
from suite_loader import ItemResult, SuiteBase, SuiteContext
from syntax import Term, pretty


class MonotoneSuite(SuiteBase):

    @property
    def name(self) -> str:
        return "monotone"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "运行长度随 k 不减，成功在更大的 k 处保持"

    def check(self, context: SuiteContext, item: Term) -> ItemResult:
        result = ItemResult()
        measured = [measure(item, k, context.fuel) for k in range(context.kmax + 1)]
        for k in range(context.kmax):
            result.checked += 1
            (outcome, length), (_, following) = measured[k], measured[k + 1]
            if length is None and following is not None:
                result.fail(term=pretty(item), k=k, kind="length", detail=f"∞ > {following}")
            elif length is not None and following is not None and length > following:
                result.fail(term=pretty(item), k=k, kind="length", detail=f"{length} > {following}")
        success = next((k for k, (outcome, _) in enumerate(measured) if is_success(outcome)), None)
        if success is not None:
            outcome, length = measured[success]
            for h in range(success + 1, context.kmax + 1):
                other, other_length = measured[h]
                if type(other) is not type(outcome) or other_length != length:
                    result.fail(term=pretty(item), k=success, h=h, kind="success",
                                detail=f"{outcome} ({length}) vs {other} ({other_length})")
                    break
        return result
