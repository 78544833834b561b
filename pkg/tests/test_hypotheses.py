import numpy as np
import pytest

from greencone.corpus import get_entry, names
from greencone.corpus.corpus import F1_BRANCHES, F2_BRANCHES
from greencone.envelope import envelope_closed_form
from greencone.hypotheses import (
    Nonlinearity,
    RectangleSampler,
    check_corollary24,
    check_H1,
    check_H1_star,
    check_H2,
    check_thm2,
    check_thm5,
    check_thm6,
    limit_ratios,
)
from greencone.model.models import HypothesisId, LimitKind, ProblemId, TheoremId, Verdict
from greencone.pipeline import ProblemRun, hypotheses_pass
from greencone.quadrature import cone_constants
from greencone.utils.errors import InvalidThreshold, ThresholdOrdering


def _f(*branches, **kwargs):
    return Nonlinearity.from_strings(list(branches), **kwargs)


def _corpus_f(branches):
    return _f(*[(b.get("upto"), b["expr"]) for b in branches])


@pytest.fixture(scope="module")
def b0():
    env = envelope_closed_form(ProblemId(n=2, k=1, B=0.0))
    return env, cone_constants(env)


@pytest.mark.parametrize("name", names())
def test_corpus_hypotheses_hold(name, time_tracker):
    run = ProblemRun(get_entry(name))
    reports = run.check()
    failed = [r.hypothesis.value for r in reports if not r.passed]
    assert failed == []
    for report in reports:
        if report.strict:
            assert report.strict_verdict is Verdict.PASS
            assert report.strict_margin > 0.0
    assert hypotheses_pass(run.theorem, reports)


def test_zero_nonlinearity_passes_H1_with_full_margin(b0):
    _, c = b0
    report = check_H1(Nonlinearity.constant(0), c, 0.5)
    assert report.passed
    assert report.margin == pytest.approx(c.c_h1 * 0.5)


def test_H1_equality_is_a_pass(b0):
    _, c = b0
    report = check_H1(_f((None, "6*u")), c, 1.0)
    assert report.passed
    assert abs(report.margin) < 1e-9
    assert report.witness_u == pytest.approx(1.0)


def test_H1_star_demands_strictness_at_p(b0):
    _, c = b0
    report = check_H1_star(_f((None, "6*u")), c, 1.0)
    assert report.strict_verdict is Verdict.FAIL
    assert not report.passed


def test_H2_rectangle_and_equality(b0):
    env, c = b0
    report = check_H2(_f((None, "3072/67*u")), c, env, 1.0)
    assert report.u_range == pytest.approx((0.25, 1.0))
    assert report.t_range == pytest.approx((0.25, 0.75))
    assert report.coefficient == pytest.approx(3072 / 67)
    assert report.passed
    assert abs(report.margin) < 1e-9


def test_H2_fails_below_the_line(b0):
    env, c = b0
    report = check_H2(_f((None, "40*u")), c, env, 1.0)
    assert not report.passed
    assert report.witness_u == pytest.approx(1.0)


def test_thresholds_must_be_positive(b0):
    env, c = b0
    f = Nonlinearity.constant(0)
    with pytest.raises(InvalidThreshold):
        check_H1(f, c, 0.0)
    with pytest.raises(InvalidThreshold):
        check_H2(f, c, env, -1.0)


def test_thm2_needs_distinct_thresholds(b0):
    env, c = b0
    with pytest.raises(ThresholdOrdering):
        check_thm2(Nonlinearity.constant(0), c, env, 1.0, 1.0)


def test_thm5_zero_nonlinearity(b0):
    env, c = b0
    first, second, third = check_thm5(Nonlinearity.constant(0), c, env, 1.0, 2.0, 3.0)
    assert first.hypothesis is HypothesisId.THM5_I and not first.passed and first.margin < 0.0
    assert second.passed
    assert third.hypothesis is HypothesisId.THM5_III and not third.passed and third.margin < 0.0
    assert not hypotheses_pass(TheoremId.THM5, [first, second, third])


def test_thm5_ordering(b0):
    env, c = b0
    with pytest.raises(ThresholdOrdering):
        check_thm5(Nonlinearity.constant(0), c, env, 2.0, 1.0, 3.0)


def test_thm5_relaxed_strictness_is_noted(b0):
    env, c = b0
    third = check_thm5(_f((None, "3072/67*u")), c, env, 1.0, 2.0, 3.0, strict_iii=False)[2]
    assert third.passed
    assert third.note is not None


def test_thm6_constant_at_the_bound_fails_b(b0):
    env, c = b0
    reports = check_thm6(_f((None, "6")), c, env, 1.0, 2.0, 8.0)
    b = next(r for r in reports if r.hypothesis is HypothesisId.THM6_B)
    assert b.margin == pytest.approx(0.0, abs=1e-9)
    assert b.strict_verdict is Verdict.FAIL
    assert not b.passed


def test_thm6_ordering(b0):
    env, c = b0
    with pytest.raises(ThresholdOrdering):
        check_thm6(Nonlinearity.constant(0), c, env, 1.0, 2.0, 7.0)


def test_refined_margin_agrees_with_a_dense_grid(b0):
    env, c = b0
    f = _corpus_f(F2_BRANCHES)
    report = check_thm6(f, c, env, 0.5, 4.0, 16384.0)[0]
    t = np.linspace(0.0, 1.0, 2000)
    u = np.linspace(0.0, 16384.0, 2000)
    brute = float(np.min(c.c_h1 * 16384.0 - f(t[:, None], u[None, :])))
    assert report.margin <= brute + 1e-9
    # f reaches 6r at t = 1, so both margins sit at zero up to rounding
    assert report.passed
    assert brute == pytest.approx(0.0, abs=1e-6)


def test_limit_ratios_of_the_examples():
    near_zero = limit_ratios(_corpus_f(F2_BRANCHES))
    assert near_zero.f0_plus.all_kind(LimitKind.VANISHES)

    f1 = limit_ratios(_corpus_f(F1_BRANCHES), t_samples=[0.0, 1.0])
    expected = [50000000 / 1190651 * 1007 / 88, 50000000 / 1190651 * (1007 + 225) / 88]
    assert f1.f0_minus.all_kind(LimitKind.FINITE)
    assert f1.f0_minus.values == pytest.approx(expected, rel=1e-9)

    square = limit_ratios(_f((None, "u^2")))
    assert square.finf_minus.all_kind(LimitKind.DIVERGES)
    assert square.f0_plus.all_kind(LimitKind.VANISHES)


def test_corollary_on_power_laws(b0):
    env, c = b0
    h3, h4 = check_corollary24(limit_ratios(_f((None, "u^2"))), c, env)
    assert h3.hypothesis is HypothesisId.H3 and h3.passed
    assert not h4.passed
    assert hypotheses_pass(TheoremId.COR24, [h3, h4])

    _, h4 = check_corollary24(limit_ratios(_f((None, "sqrt(u)"))), c, env)
    assert h4.passed


def test_corollary_fails_for_a_saturating_nonlinearity(b0):
    env, c = b0
    h3, h4 = check_corollary24(limit_ratios(_corpus_f(F2_BRANCHES)), c, env)
    assert not h3.passed
    assert not h4.passed
    assert not hypotheses_pass(TheoremId.COR24, [h3, h4])


def test_empty_report_list_never_passes():
    assert not hypotheses_pass(TheoremId.THM2, [])


def test_sampler_reads_a_jump_boundary_on_the_lower_branch():
    f = _f((1, "u"), (None, "3 - u/(1+u)"), allow_jumps=True)
    assert f.jumps and f.jumps[0][0] == 1.0
    sample = RectangleSampler(f).minimize(lambda t, u, fv: 2.5 - fv, (0.0, 1.0), (0.0, 2.0))
    # f(1) = 1, the upper branch only approaches 2.5 from below
    assert sample.value > 0.0
    assert sample.u > 1.0
