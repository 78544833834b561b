import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greencone.envelope import (
    build_envelope,
    catalog_regime,
    default_I1,
    envelope_closed_form,
    envelope_numeric,
    minus_two_pi_switch,
    minus_two_pi_switch_closed_form,
    normalized,
)
from greencone.kernels import kernel_for
from greencone.model.models import ProblemId
from greencone.utils import constants
from greencone.utils.errors import DomainError, UnsupportedProblem

B0 = ProblemId(n=2, k=1, B=0.0)
FOURTH = ProblemId(n=4, k=2)
GOLDEN = ProblemId(n=2, k=1, B=constants.B_GOLDEN_POS)
GOLDEN_NEG = ProblemId(n=2, k=1, B=constants.B_GOLDEN_NEG)
MINUS_TWO_PI = ProblemId(n=2, k=1, B=constants.B_MINUS_TWO_PI)


@pytest.fixture(scope="module")
def b0_envelope():
    return envelope_closed_form(B0)


@pytest.fixture(scope="module")
def fourth_envelope():
    return envelope_closed_form(FOURTH)


@pytest.fixture(scope="module")
def minus_two_pi_envelope():
    return envelope_closed_form(MINUS_TWO_PI)


def test_normalized_kernel_values():
    kernel = kernel_for(B0)
    assert normalized(kernel, 1 / 3, 2 / 3) == pytest.approx(0.5, abs=1e-15)
    assert normalized(kernel, 0.25, 0.0) == pytest.approx(0.75, abs=1e-15)
    assert normalized(kernel, 0.25, 1.0) == pytest.approx(0.25, abs=1e-15)


def test_fourth_order_endpoint_limit_matches_sampled_value():
    kernel = kernel_for(FOURTH)
    assert normalized(kernel, 0.5, 1.0) == pytest.approx(normalized(kernel, 0.5, 1.0 - 1e-6), abs=1e-4)


def test_normalized_rejects_points_outside_the_domain():
    kernel = kernel_for(B0)
    with pytest.raises(DomainError):
        normalized(kernel, 0.0, 0.5)
    with pytest.raises(DomainError):
        normalized(kernel, 0.5, 1.2)


def test_b0_constants(b0_envelope):
    assert b0_envelope.K1 == pytest.approx(0.5)
    assert b0_envelope.K2 == 1.0
    assert b0_envelope.I1 == (0.25, 0.75)
    assert b0_envelope.m1 == pytest.approx(0.25)
    assert b0_envelope.kinks == (0.5,)


def test_fourth_order_constants(fourth_envelope):
    assert fourth_envelope.K1 == pytest.approx(1 / 16)
    assert fourth_envelope.K2 == pytest.approx(1 / 12)
    assert fourth_envelope.I1 == pytest.approx((1 / 3, 2 / 3))
    assert fourth_envelope.m1 == pytest.approx(1 / 27)
    assert fourth_envelope.k1(1 / 3) == pytest.approx(1 / 27)
    assert fourth_envelope.k2(0.5) == pytest.approx(1 / 12)


@pytest.mark.parametrize("problem", [GOLDEN, GOLDEN_NEG])
def test_golden_drifts(problem):
    env = envelope_closed_form(problem)
    assert env.regime == "golden"
    assert env.K1 == pytest.approx(0.5, rel=1e-12)
    assert env.K2 == 1.0
    assert env.m1 == pytest.approx(0.25, rel=1e-12)


def test_minus_two_pi_switch(minus_two_pi_envelope):
    t3 = minus_two_pi_switch()
    assert t3 == pytest.approx(0.844992, abs=1e-5)
    assert t3 == pytest.approx(minus_two_pi_switch_closed_form(), abs=1e-10)
    assert 47 / 125 < minus_two_pi_envelope.K1 < 0.3765
    assert minus_two_pi_envelope.K2 == 1.0
    assert minus_two_pi_envelope.m1 == pytest.approx(0.25, rel=1e-9)
    assert minus_two_pi_envelope.certified_lower_bound


@pytest.mark.parametrize("problem", [B0, GOLDEN, GOLDEN_NEG, MINUS_TWO_PI, FOURTH])
def test_kernel_is_sandwiched_by_the_envelope(problem):
    env = envelope_closed_form(problem)
    t = np.linspace(0.0, 1.0, 51)[1:-1]
    s = np.linspace(0.0, 1.0, 101)
    table = normalized(env.kernel, t[:, None], s[None, :])
    assert np.all(table >= np.asarray(env.k1(t))[:, None] - 1e-9)
    assert np.all(table <= np.asarray(env.k2(t))[:, None] + 1e-9)
    assert np.all(np.asarray(env.k1(t)) > 0.0)


def test_b0_lower_profile_is_a_tent(b0_envelope):
    left = b0_envelope.k1(np.linspace(0.0, 0.5, 50))
    right = b0_envelope.k1(np.linspace(0.5, 1.0, 50))
    assert np.all(np.diff(left) > 0.0)
    assert np.all(np.diff(right) < 0.0)


@settings(max_examples=20, deadline=None)
@given(B=st.floats(min_value=1e-3, max_value=2.0))
def test_I1_containment_for_positive_drift(B):
    a1, b1 = default_I1(ProblemId(n=2, k=1, B=B))
    assert 3 / 25 <= a1 <= 1 / 4
    assert 13 / 25 <= b1 <= 3 / 4


@settings(max_examples=20, deadline=None)
@given(B=st.floats(min_value=-2.0, max_value=-1e-3))
def test_I1_containment_for_negative_drift(B):
    a1, b1 = default_I1(ProblemId(n=2, k=1, B=B))
    assert 1 / 4 <= a1 <= 12 / 25
    assert 3 / 4 <= b1 <= 22 / 25


def test_minus_two_pi_I1():
    a1, b1 = default_I1(MINUS_TWO_PI)
    assert a1 == pytest.approx(0.78, abs=5e-3)
    assert b1 == 0.9151


def test_catalog_regimes():
    assert catalog_regime(B0) == "b0"
    assert catalog_regime(FOURTH) == "fourth-order"
    assert catalog_regime(MINUS_TWO_PI) == "minus-two-pi"
    assert catalog_regime(ProblemId(n=2, k=1, B=1.0)) == "drift"
    assert catalog_regime(ProblemId(n=2, k=1, B=5.0)) is None
    with pytest.raises(UnsupportedProblem):
        envelope_closed_form(ProblemId(n=2, k=1, B=5.0))


def test_numeric_envelope_matches_closed_form(b0_envelope, time_tracker):
    numeric = envelope_numeric(kernel_for(B0), s_points=256, t_points=512, interval=(0.25, 0.75))
    assert numeric.K1 == pytest.approx(b0_envelope.K1, abs=1e-6)
    assert numeric.K2 == pytest.approx(b0_envelope.K2, abs=1e-6)
    assert numeric.m1 == pytest.approx(b0_envelope.m1, abs=1e-6)
    t = np.concatenate((np.linspace(0.05, 0.45, 41), np.linspace(0.55, 0.95, 41)))
    np.testing.assert_allclose(numeric.k1(t), b0_envelope.k1(t), atol=1e-6)
    np.testing.assert_allclose(numeric.k2(t), b0_envelope.k2(t), atol=1e-6)


def test_numeric_envelope_for_the_beam(fourth_envelope):
    numeric = envelope_numeric(kernel_for(FOURTH), s_points=256, t_points=256)
    assert numeric.K1 == pytest.approx(fourth_envelope.K1, abs=1e-5)
    assert numeric.K2 == pytest.approx(fourth_envelope.K2, abs=1e-5)
    assert numeric.source == "numeric"


def test_build_envelope_falls_back_to_sampling():
    env = build_envelope(ProblemId(n=2, k=1, B=4.0), s_points=128, t_points=128)
    assert env.source == "numeric"
    assert 0.0 < env.m1 <= env.K1 <= env.K2
    assert env.kernel.a < env.a1 < env.b1 < env.kernel.b


def test_restrict_recomputes_m1(b0_envelope):
    narrow = build_envelope(B0, interval=(0.4, 0.6))
    assert narrow.I1 == (0.4, 0.6)
    assert narrow.m1 == pytest.approx(0.4)
    with pytest.raises(DomainError):
        b0_envelope.restrict(0.0, 0.5)
    assert math.isclose(b0_envelope.m1, 0.25)
