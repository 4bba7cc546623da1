import pytest
from hypothesis import given, settings, strategies as st

from corpus import BACKTRACK_RUN, WORKED_RUN
from errors import GoiMismatch
from goi import (
    BOX, L, Pair, R, Stacks, GoiEncoder, aux_door, check_coherence, contraction, contraction_path,
    dereliction, encode_logged_position, encode_state, encoding_collisions, format_stack, goi_rows,
    logged_positions_of, micro_backtrack_expand, micro_var_expand, principal_in, principal_out, undo_aux_door,
    undo_contraction, undo_dereliction,
)
from machine import LoggedPosition, Marker, run
from syntax import Step
from term_strategies import corpus_terms

B, L_, R_ = Step.ABS_BODY, Step.APP_LEFT, Step.APP_RIGHT
P = Marker.P


@pytest.mark.parametrize("index,count,expected", [
    (0, 1, ()),
    (0, 2, ("l",)),
    (1, 2, ("r",)),
    (1, 3, ("r", "l")),
    (2, 3, ("r", "r")),
])
def test_contraction_path(index, count, expected):
    assert contraction_path(index, count) == expected


def test_encode_logged_positions():
    encoder = GoiEncoder(BACKTRACK_RUN)
    left = LoggedPosition("x", (L_,), (L_, B, L_), ())
    right = LoggedPosition("x", (L_,), (L_, B, R_), ())
    assert encoder.encode(left) == L(BOX)
    assert encoder.encode(right) == R(BOX)
    assert str(encoder.encode(right)) == "⟨r,□⟩"
    # 单个出现不经过收缩，log 中的每一项包一层 ⟨·,·⟩
    nested = LoggedPosition("y", (R_,), (R_, B), (left,))
    assert encoder.encode(nested) == Pair(L(BOX), BOX)
    assert str(encoder.encode(nested)) == "⟨⟨l,□⟩,□⟩"
    assert encode_logged_position(BACKTRACK_RUN, right) == R(BOX)


def test_encode_rejects_foreign_occurrence():
    encoder = GoiEncoder(BACKTRACK_RUN)
    with pytest.raises(GoiMismatch):
        encoder.encode(LoggedPosition("x", (L_,), (R_, B), ()))


def test_micro_rules_are_inverse():
    st_ = Stacks((BOX,), (L(BOX), P))
    moved = aux_door(st_)
    assert moved.same(Stacks((), (Pair(BOX, L(BOX)), P)))
    assert undo_aux_door(moved).same(st_)
    assert principal_out(principal_in(st_)).same(st_)
    assert undo_dereliction(dereliction(st_)).same(st_)
    assert undo_contraction("r", contraction("r", st_)).same(st_)


def test_micro_rules_reject_bad_stacks():
    with pytest.raises(GoiMismatch):
        aux_door(Stacks((), (BOX,)))
    with pytest.raises(GoiMismatch):
        principal_in(Stacks((), (P,)))
    with pytest.raises(GoiMismatch):
        undo_contraction("r", Stacks((), (L(BOX),)))
    with pytest.raises(GoiMismatch):
        undo_dereliction(Stacks((), (P,)))


def test_format_stack():
    assert format_stack(()) == "ε"
    assert format_stack((P, BOX)) == "𝗉·□"
    assert str(Stacks((), (P,))) == "B=ε S=𝗉"


def test_micro_var_expand():
    trace = run(BACKTRACK_RUN, 0, 100).trace
    expanded = micro_var_expand(trace[3])
    assert [st_.label for st_ in expanded] == ["start", "dereliction", "contraction-l"]
    assert expanded[-1].same(encode_state(trace[4]))
    assert expanded[-1].balancing == (L(BOX), P)


def test_micro_backtrack_expand():
    trace = run(BACKTRACK_RUN, 0, 100).trace
    expanded = micro_backtrack_expand(trace[8])
    assert expanded[0].label == "start"
    assert expanded[-1].label == "undo-dereliction"
    assert expanded[-1].same(encode_state(trace[9]))


def test_micro_expansions_need_the_right_state():
    start = run(BACKTRACK_RUN, 0, 100).trace[0]
    with pytest.raises(GoiMismatch):
        micro_var_expand(start)
    with pytest.raises(GoiMismatch):
        micro_backtrack_expand(start)


@pytest.mark.parametrize("t,k,exponential", [(WORKED_RUN, 1, 3), (BACKTRACK_RUN, 0, 4)])
def test_golden_runs_are_coherent(t, k, exponential):
    result = run(t, k, 100)
    report = check_coherence(result)
    assert report.ok, report.failures
    assert report.checked == result.steps
    assert report.exponential == exponential


def test_coherence_needs_trace():
    with pytest.raises(ValueError):
        check_coherence(run(WORKED_RUN, 1, 100, keep_trace=False))


def test_goi_rows():
    result = run(WORKED_RUN, 1, 100)
    rows = goi_rows(result)
    assert len(rows) == result.steps + 1
    assert rows[0] == {"i": 0, "dir": "down", "B": "ε", "S": "𝗉", "log_length": 0,
                       "tape_length": 1, "rule": "•1"}
    assert rows[-1]["rule"] is None


def test_golden_encodings_do_not_collide():
    for t, k in ((WORKED_RUN, 1), (BACKTRACK_RUN, 0)):
        result = run(t, k, 100)
        positions = logged_positions_of(result)
        assert positions
        assert encoding_collisions(t, positions) == []


@settings(max_examples=60, deadline=None)
@given(corpus_terms, st.integers(0, 2))
def test_generated_runs_are_coherent(t, k):
    report = check_coherence(run(t, k, 300))
    assert report.ok, report.failures
