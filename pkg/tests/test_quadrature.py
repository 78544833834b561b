from fractions import Fraction

import pytest

from greencone.envelope import envelope_closed_form
from greencone.model.models import ProblemId
from greencone.quadrature import cone_constants, integrate_piecewise, verify_rational
from greencone.utils import constants
from greencone.utils.errors import QuadratureFailure

B0 = ProblemId(n=2, k=1, B=0.0)
FOURTH = ProblemId(n=4, k=2)
GOLDEN = ProblemId(n=2, k=1, B=constants.B_GOLDEN_POS)
MINUS_TWO_PI = ProblemId(n=2, k=1, B=constants.B_MINUS_TWO_PI)


@pytest.fixture(scope="module")
def envelopes():
    return {name: envelope_closed_form(problem)
            for name, problem in [("b0", B0), ("fourth", FOURTH), ("golden", GOLDEN), ("minus-two-pi", MINUS_TWO_PI)]}


@pytest.mark.parametrize("name, key", [("b0", "second-order-b0"), ("fourth", "fourth-order")])
def test_polynomial_weights_integrate_exactly(envelopes, name, key):
    c = cone_constants(envelopes[name])
    exact = constants.EXACT_CONSTANTS[key]
    assert c.int_phi == pytest.approx(float(exact["int_phi"]), abs=1e-12)
    assert c.int_phi_i1 == pytest.approx(float(exact["int_phi_i1"]), abs=1e-12)
    assert c.int_k1_phi_i1 == pytest.approx(float(exact["int_k1_phi_i1"]), abs=1e-12)


def test_b0_coefficients(envelopes):
    c = cone_constants(envelopes["b0"])
    assert c.c_h1 == pytest.approx(6.0, rel=1e-12)
    assert c.c_h2 == pytest.approx(3072 / 67, rel=1e-10)
    assert c.c_thm5i == pytest.approx(384 / 11, rel=1e-10)
    assert c.ratio == pytest.approx(4.0)


def test_fourth_order_coefficients(envelopes):
    c = cone_constants(envelopes["fourth"])
    assert c.c_h1 == pytest.approx(360.0, rel=1e-10)
    assert c.c_thm5i == pytest.approx(65610 / 47, rel=1e-10)
    assert c.ratio == pytest.approx(27 / 12)


def test_fourth_order_numerator_digits(envelopes):
    c = cone_constants(envelopes["fourth"])
    assert verify_rational(c.int_k1_phi_i1, Fraction(462461, 470292480), 1e-12)
    assert not verify_rational(c.int_k1_phi_i1, Fraction(426461, 470292480), 1e-12)


def test_golden_integrals(envelopes):
    c = cone_constants(envelopes["golden"])
    assert c.int_k1_phi_i1 == pytest.approx(0.035872, abs=1e-6)
    assert c.int_phi_i1 == pytest.approx(0.095719, abs=1e-6)
    assert c.int_k1_phi_i1 > 3587 / 100000
    assert c.int_phi_i1 > 957 / 10000


def test_minus_two_pi_integrals(envelopes):
    c = cone_constants(envelopes["minus-two-pi"])
    assert c.int_phi_i1 == pytest.approx(0.0172072, abs=1e-6)
    assert c.int_k1_phi_i1 == pytest.approx(0.005393, abs=1e-6)
    assert c.int_phi_i1 > 43 / 2500
    assert c.int_k1_phi_i1 > 539 / 100000


def test_conservative_coefficients(envelopes):
    golden = cone_constants(envelopes["golden"], conservative=True)
    assert golden.conservative
    assert golden.c_h2 == pytest.approx(200000 / 3587, rel=1e-10)
    assert golden.c_thm5i == pytest.approx(40000 / 957, rel=1e-9)

    minus_two_pi = cone_constants(envelopes["minus-two-pi"], conservative=True)
    assert minus_two_pi.c_h2 == pytest.approx(12500000 / 25333, rel=1e-10)
    assert minus_two_pi.c_thm5i == pytest.approx(10000 / 43, rel=1e-9)

    # no certified floors for b0, the computed constants stay
    b0 = cone_constants(envelopes["b0"], conservative=True)
    assert not b0.conservative
    assert b0.c_h2 == pytest.approx(3072 / 67, rel=1e-10)


def test_constants_are_positive_and_ordered(envelopes):
    for env in envelopes.values():
        c = cone_constants(env)
        assert min(c.int_phi, c.int_phi_i1, c.int_k1_phi_i1, c.c_h1, c.c_h2, c.c_thm5i) > 0.0
        assert c.int_phi_i1 < c.int_phi
        assert c.int_k1_phi_i1 < c.K1 * c.int_phi_i1


def test_shrinking_I1_shrinks_the_integrals(envelopes):
    wide = cone_constants(envelopes["b0"])
    narrow = cone_constants(envelopes["b0"].restrict(0.3, 0.7))
    assert narrow.int_phi_i1 < wide.int_phi_i1
    assert narrow.int_k1_phi_i1 < wide.int_k1_phi_i1


def test_tolerance_range(envelopes):
    with pytest.raises(ValueError):
        cone_constants(envelopes["b0"], tol=1e-3)
    with pytest.raises(ValueError):
        cone_constants(envelopes["b0"], tol=1e-16)


def test_integrate_piecewise_splits_at_kinks():
    value = integrate_piecewise(lambda s: abs(s - 0.3), 0.0, 1.0, kinks=[0.3, 2.0])
    assert value == pytest.approx(0.29, abs=1e-13)


def test_integrate_piecewise_reports_stalls():
    with pytest.raises(QuadratureFailure):
        integrate_piecewise(lambda s: s ** -0.999, 0.0, 1.0, tol=1e-14)


@pytest.mark.parametrize("value, claimed, tol, expected", [
    (0.16666666668, Fraction(1, 6), 1e-9, True),
    (11 / 96 + 1e-3, Fraction(11, 96), 1e-9, False),
    (0.0172072, Fraction(43, 2500), 1e-4, True),
    (0.5, "1/2", 1e-15, True),
])
def test_verify_rational(value, claimed, tol, expected):
    assert verify_rational(value, claimed, tol) is expected


def test_verify_rational_needs_a_positive_tolerance():
    with pytest.raises(ValueError):
        verify_rational(1.0, 1, 0.0)
