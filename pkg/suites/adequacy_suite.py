"""
充分性套件

lhe_normalize 在燃料内终止当且仅当某个 k ≤ kmax 给出 Pair 或 OpenPair；
⊸-范式的脊与机器在 k = 绑定者个数处的回答一致；
闭项在 k = 0 处为 ⇓ 当且仅当展开后的项有弱头范式。
"""
from machine import HasAbs, OpenPair, Pair, Timeout, is_success, semantics
from reduction import lhe_normalize, spine, unfold, weak_head_normalize
from suite_loader import ItemResult, SuiteBase, SuiteContext
from syntax import Term, free_vars, pretty


class AdequacySuite(SuiteBase):

    @property
    def name(self) -> str:
        return "adequacy"

    @property
    def version(self) -> str:
        return "1.0.0"

    @property
    def description(self) -> str:
        return "⊸-范式存在当且仅当机器在某个深度成功"

    def check(self, context: SuiteContext, item: Term) -> ItemResult:
        result = ItemResult(checked=1)
        term = pretty(item)
        normalized = lhe_normalize(item, context.lhe_fuel, record=False)
        outcomes = [semantics(item, k, context.fuel) for k in range(context.kmax + 1)]
        success = next((k for k, outcome in enumerate(outcomes) if is_success(outcome)), None)
        timed_out = any(isinstance(outcome, Timeout) for outcome in outcomes)
        if not free_vars(item):
            self._check_weak_head(context, item, outcomes[0], result)

        if not normalized.normal:
            if success is not None:
                result.fail(term=term, kind="iff", detail=f"k={success} 成功但归约燃料 {context.lhe_fuel} 耗尽")
            else:
                result.flag(term=term, kind="diverges")
            return result

        shape = spine(normalized.term)
        if shape is None:
            result.fail(term=term, kind="spine", detail=f"范式 {pretty(normalized.term)} 读不出脊")
            return result
        depth = len(shape.binders)
        if depth > context.kmax:
            result.flag(term=term, kind="deep", binders=depth)
        elif success is None:
            if timed_out:
                result.flag(term=term, kind="timeout")
            else:
                result.fail(term=term, kind="iff", detail="有 ⊸-范式但机器在 kmax 内没有成功")
        else:
            expected = Pair(shape.index, shape.args) if shape.index is not None else OpenPair(shape.head, shape.args)
            if outcomes[depth] != expected:
                result.fail(term=term, kind="answer", k=depth, expected=str(expected), actual=str(outcomes[depth]))

        return result

    def _check_weak_head(self, context: SuiteContext, item: Term, outcome, result: ItemResult):
        result.checked += 1
        weak = weak_head_normalize(unfold(item), context.lhe_fuel)
        has_abs = outcome == HasAbs()
        if weak.normal == has_abs:
            return
        if isinstance(outcome, Timeout) or not weak.normal:
            result.flag(term=pretty(item), kind="weak-head-timeout", k=0, actual=str(outcome))
        else:
            result.fail(term=pretty(item), kind="weak-head", actual=str(outcome), whnf=weak.normal)
