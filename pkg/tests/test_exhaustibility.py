from dataclasses import replace

from hypothesis import given, settings

from corpus import BACKTRACK_RUN, WORKED_RUN
from exhaustibility import (
    LOG_TEST, TAPE_TEST, CounterExample, Exhaustible, Unknown, certificate_depth, certify,
    check_forward_after_backward, check_log_test_inclusion, check_log_test_invariance, check_run_invariants,
    check_state_balance, is_exhaustible, log_tests_of, run_test, surrounds, tests_of,
)
from machine import Direction, LoggedPosition, Marker, State, run
from syntax import Step
from term_strategies import corpus_terms

B, L, R, S, D = Step.ABS_BODY, Step.APP_LEFT, Step.APP_RIGHT, Step.SUB_BODY, Step.SUB_DEFINIENS


def test_initial_state_has_no_tests():
    assert tests_of(run(WORKED_RUN, 1, 100).trace[0]) == []


def test_tape_test_completes_by_backtracking():
    s = run(BACKTRACK_RUN, 0, 100).trace[4]
    tests = tests_of(s)
    assert [test.kind for test in tests] == [TAPE_TEST]
    test = tests[0]
    assert test.start.dir is Direction.DOWN
    assert test.start.tape == (test.focus,)
    reached, rule, reason = run_test(test, 100)
    assert reason == "ok"
    assert rule == "bt2"
    assert surrounds(reached, test.focus)


def test_log_tests():
    s = run(BACKTRACK_RUN, 0, 100).trace[10]
    assert s.path == (L, B, R)
    tests = log_tests_of(s)
    assert [test.kind for test in tests] == [LOG_TEST]
    assert tests[0].start.path == (L, B, R)
    assert tests[0].start.dir is Direction.UP
    assert tests[0].start.tape == ()


def test_golden_states_are_exhaustible():
    for t, k in [(WORKED_RUN, 1), (BACKTRACK_RUN, 0)]:
        memo = {}
        for s in run(t, k, 100).trace:
            verdict = is_exhaustible(s, 3, 2000, memo)
            assert isinstance(verdict, Exhaustible), verdict


def test_depth_zero_marks_truncation():
    s = run(BACKTRACK_RUN, 0, 100).trace[11]
    verdict = is_exhaustible(s, 0, 2000)
    assert isinstance(verdict, Exhaustible)
    assert verdict.truncated


def test_deepening_removes_truncation():
    s = run(BACKTRACK_RUN, 0, 100).trace[11]
    assert certificate_depth(s) >= 1
    verdict = certify(s, 0, 2000)
    assert isinstance(verdict, Exhaustible)
    assert not verdict.truncated


def test_out_of_fuel_is_unknown():
    s = run(BACKTRACK_RUN, 0, 100).trace[4]
    verdict = is_exhaustible(s, 3, 1)
    assert isinstance(verdict, Unknown)
    assert verdict.test.kind == TAPE_TEST


def test_blocked_position_is_a_counterexample():
    trace = run(BACKTRACK_RUN, 0, 100).trace
    s = trace[4]
    # 绑定者不是 λx.x x，测试在 bt2 处违例
    bogus = LoggedPosition("x", (R,), (R, B), ())
    blocked = replace(s, tape=(bogus, Marker.P))
    verdict = is_exhaustible(blocked, 1, 100)
    assert isinstance(verdict, CounterExample)


def test_log_test_invariance_and_inclusion():
    for t, k in [(WORKED_RUN, 1), (BACKTRACK_RUN, 0)]:
        for s in run(t, k, 100).trace:
            assert check_log_test_invariance(s) == []
            assert check_log_test_inclusion(s) == []


def test_balance_detects_tampering():
    trace = run(WORKED_RUN, 1, 100).trace
    s = trace[8]
    assert check_state_balance(s) is None
    broken = replace(s, log=())
    assert check_state_balance(broken) is not None
    report = check_run_invariants(trace[:8] + [broken] + trace[9:])
    assert not report.ok
    assert report.first_failure.index == 8
    assert report.first_failure.kind == "balance"


def test_up_state_needs_a_position():
    trace = run(WORKED_RUN, 1, 100).trace
    s = trace[6]
    assert s.dir is Direction.UP
    broken = State(s.code, s.path, s.log, (Marker.P,), Direction.UP)
    kinds = {failure.kind for failure in check_run_invariants([trace[0], broken], reversibility=False).failures}
    assert "up-tape" in kinds


@settings(max_examples=40, deadline=None)
@given(corpus_terms)
def test_forward_after_backward(t):
    for k in range(3):
        assert check_forward_after_backward(run(t, k, 300).trace) == []


@settings(max_examples=30, deadline=None)
@given(corpus_terms)
def test_reachable_states_are_exhaustible(t):
    result = run(t, 1, 200)
    memo = {}
    for s in result.trace:
        verdict = certify(s, 2, 2000, memo)
        assert isinstance(verdict, Exhaustible), verdict
        assert not verdict.truncated
