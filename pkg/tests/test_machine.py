import pytest
from hypothesis import given, settings

import machine
from corpus import BACKTRACK_RUN, BIG_LAMBDA, OMEGA, WORKED_RUN
from errors import MachineViolation
from exhaustibility import check_run_invariants
from machine import (
    BoundSuccess, Direction, Failure, Final, HasAbs, LoggedPosition, Marker, OpenPair, Pair, Rule, RunResult, State,
    Timeout, Violation, classify, format_trace, initial_state, is_success, run, run_from, run_length, semantics, semantics_to_dict,
    step, step_backward, trace_record,
)
from syntax import Step, parse
from term_strategies import corpus_terms

B, L, R, S, D = Step.ABS_BODY, Step.APP_LEFT, Step.APP_RIGHT, Step.SUB_BODY, Step.SUB_DEFINIENS
P = Marker.P

WORKED_RULES = ["•1", "•1", "•2", "•2", "var", "•4", "•3", "arg", "•2", "var",
                "bt1", "•1", "•2", "bt2", "•4", "•4", "•3", "•3"]
BACKTRACK_RULES = ["•1", "•2", "•1", "var", "arg", "•2", "var", "bt1", "bt2", "arg", "var", "arg"]


def test_worked_run():
    result = run(WORKED_RUN, 1, 100)
    assert result.steps == 18
    assert [rule.value for rule in result.rules] == WORKED_RULES
    assert isinstance(result.outcome, Final)
    assert result.outcome.cls == BoundSuccess(0, 0)
    assert semantics(WORKED_RUN, 1, 100) == Pair(0, 0)


def test_worked_run_states():
    trace = run(WORKED_RUN, 1, 100).trace
    a = LoggedPosition("x", (L, L, B), (L, L, B, B), ())
    b = LoggedPosition("y", (R,), (R, B), ())
    assert trace[0] == State(WORKED_RUN, (), (), (P,), Direction.DOWN)
    assert trace[4] == State(WORKED_RUN, (L, L, B, B), (), (P,), Direction.DOWN)
    assert trace[5] == State(WORKED_RUN, (L, L, B), (), (a, P), Direction.UP)
    assert trace[8] == State(WORKED_RUN, (R,), (a,), (P,), Direction.DOWN)
    assert trace[11] == State(WORKED_RUN, (L,), (), (a, b), Direction.DOWN)
    assert trace[14] == State(WORKED_RUN, (L, L, B, B), (), (b,), Direction.UP)
    assert trace[18] == State(WORKED_RUN, (), (), (b,), Direction.UP)


def test_single_steps_follow_trace():
    result = run(WORKED_RUN, 1, 100)
    first = step(result.trace[0])
    assert first.rule is Rule.APP1
    assert first.state == result.trace[1]
    for before, after, rule in zip(result.trace, result.trace[1:], result.rules):
        moved = step(before)
        assert (moved.state, moved.rule) == (after, rule)
    assert isinstance(step(result.trace[-1]), Final)


def test_backtracking_run():
    result = run(BACKTRACK_RUN, 0, 100)
    assert result.steps == 12
    assert [rule.value for rule in result.rules] == BACKTRACK_RULES
    assert result.outcome.cls == Failure()
    x = LoggedPosition("x", (L,), (L, B, L), ())
    y = LoggedPosition("y", (R,), (R, B), ())
    x2 = LoggedPosition("x", (L,), (L, B, R), (y,))
    assert result.trace[8] == State(BACKTRACK_RUN, (L,), (), (x, y), Direction.DOWN)
    assert result.trace[9] == State(BACKTRACK_RUN, (L, B, L), (), (y,), Direction.UP)
    assert result.trace[12] == State(BACKTRACK_RUN, (R,), (x2,), (), Direction.DOWN)
    assert semantics(BACKTRACK_RUN, 0, 100) == HasAbs()


def test_format_trace():
    lines = format_trace(run(BACKTRACK_RUN, 0, 100))
    assert len(lines) == 15
    assert lines[0] == "i | subterm | context | log | tape | dir"
    assert lines[-1] == "FAILURE"
    assert lines[1].startswith(r"0 | (\x.x x) (\y.y) | ⟦·⟧ | ε | ε | ↓")


def test_trace_record():
    trace = run(BACKTRACK_RUN, 0, 100).trace
    record = trace_record(3, trace[3])
    assert record["i"] == 3
    assert record["dir"] == "down"
    assert record["sub"] == "x"
    assert record["path"] == ["AppLeft", "AbsBody", "AppLeft"]
    assert record["tape"] == ["p"]
    record = trace_record(4, trace[4])
    assert record["tape"][0] == {
        "var": "x", "binder_path": ["AppLeft"], "occ_path": ["AppLeft", "AbsBody", "AppLeft"], "log": [],
    }


@pytest.mark.parametrize("text, k, expected", [
    (r"\x.x", 0, HasAbs()),
    (r"\x.x", 1, Pair(0, 0)),
    (r"\x.x", 3, Pair(0, 2)),
    (r"\x.\y.x", 2, Pair(0, 0)),
    (r"\x.\y.y", 2, Pair(1, 0)),
    (r"x", 0, OpenPair("x", 0)),
    (r"x", 2, OpenPair("x", 2)),
    (r"x[x<-y]", 1, OpenPair("y", 1)),
    (r"\x.x[y<-z]", 1, Pair(0, 0)),
])
def test_semantics(text, k, expected):
    assert semantics(parse(text), k, 1000) == expected


def test_divergence():
    for k in range(5):
        assert semantics(OMEGA, k, 1000) == Timeout(1000)
    for k in range(9):
        assert semantics(BIG_LAMBDA, k, 10_000) == HasAbs()
    assert run_length(OMEGA, 0, 1000) is None


def test_run_length_raises_on_violation(monkeypatch):
    start = initial_state(WORKED_RUN, 0)
    monkeypatch.setattr(machine, "run", lambda t, k, fuel, keep_trace=True: RunResult(
        start, Violation(start, "无规则可用"), 0))
    with pytest.raises(MachineViolation, match="无规则可用"):
        run_length(WORKED_RUN, 0, 100)


def test_semantics_to_dict():
    assert semantics_to_dict(Pair(0, 1)) == {"outcome": "pair", "h": 0, "j": 1}
    assert semantics_to_dict(OpenPair("x", 2)) == {"outcome": "open", "var": "x", "h": 2}
    assert semantics_to_dict(Timeout(5)) == {"outcome": "timeout", "fuel": 5}
    assert str(Pair(0, 0)) == "pair 0 0"
    assert str(Timeout(5)) == "bottom (timeout)"
    assert is_success(Pair(0, 0)) and not is_success(HasAbs())


def test_bad_arguments():
    with pytest.raises(ValueError):
        initial_state(parse("x"), -1)
    with pytest.raises(ValueError):
        run_from(initial_state(parse("x"), 0), -1)


def test_run_without_trace():
    result = run(WORKED_RUN, 1, 100, keep_trace=False)
    assert result.trace is None
    assert result.steps == 18
    assert classify(result.outcome) == Pair(0, 0)


def test_golden_runs_are_reversible():
    for t, k in [(WORKED_RUN, 1), (BACKTRACK_RUN, 0)]:
        trace = run(t, k, 100).trace
        assert check_run_invariants(trace).ok
        for before, after in zip(trace, trace[1:]):
            assert step_backward(after) == before
        assert step_backward(trace[0]) is None


@settings(max_examples=60, deadline=None)
@given(corpus_terms)
def test_invariants_on_random_terms(t):
    for k in range(3):
        result = run(t, k, 500)
        report = check_run_invariants(result.trace)
        assert report.ok, report.first_failure


@settings(max_examples=60, deadline=None)
@given(corpus_terms)
def test_monotonicity(t):
    lengths = [run_length(t, k, 800) for k in range(4)]
    for shorter, longer in zip(lengths, lengths[1:]):
        if shorter is None:
            assert longer is None
        elif longer is not None:
            assert shorter <= longer
