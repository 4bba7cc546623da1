"""
可靠性套件：对每一步 t ⊸ u 与每个 k，⟦t⟧k = ⟦u⟧k 且 |t|k ≥ |u|k
"""
from improvement import check_soundness
from suite_loader import ItemResult, SuiteBase, SuiteContext
from syntax import Term, path_text, pretty


class SoundnessSuite(SuiteBase):

    @property
    def name(self) -> str:
        return "soundness"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "⊸ 步保持语义，终止的运行长度不增"

    def check(self, context: SuiteContext, item: Term) -> ItemResult:
        result = ItemResult()
        for k in context.ks:
            report = check_soundness(item, k, context.fuel)
            for entry in report.entries:
                result.checked += 1
                where = {"term": pretty(item), "k": k, "rule": entry.redex.rule.value,
                         "site": path_text(entry.redex.site)}
                if not entry.agree:
                    result.fail(kind="semantics", left=str(entry.left), right=str(entry.right), **where)
                elif not entry.length_ok:
                    result.fail(kind="length", left=entry.left_length, right=entry.right_length, **where)
                elif entry.both_timeout:
                    result.flag(kind="timeout", **where)
        return result
