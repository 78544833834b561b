import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greencone.kernels import kernel_for, phi
from greencone.model.models import ProblemId
from greencone.utils.errors import DomainError, UnsupportedProblem

SECOND_B0 = ProblemId(n=2, k=1, B=0.0)
FOURTH = ProblemId(n=4, k=2)
CATALOG_B = [0.0, np.log(np.sqrt(5.0) - 2.0), np.log(2.0 + np.sqrt(5.0)), -2.0 * np.pi, 45.0, -45.0]

drifts = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False).filter(lambda B: abs(B) > 1e-3)
interior = st.floats(min_value=0.05, max_value=0.95)


@pytest.fixture(scope="module")
def b0_kernel():
    return kernel_for(SECOND_B0)


@pytest.fixture(scope="module")
def beam_kernel():
    return kernel_for(FOURTH)


def test_second_order_b0_values(b0_kernel):
    assert b0_kernel.value(2 / 3, 1 / 3) == pytest.approx(1 / 9, abs=1e-15)
    assert b0_kernel.lower_branch(0.5, 0.5) == pytest.approx(0.25)
    assert b0_kernel.upper_branch(0.5, 0.5) == pytest.approx(0.25)
    assert b0_kernel.sigma == -1


def test_fourth_order_value_and_symmetry(beam_kernel):
    assert beam_kernel.value(0.5, 0.25) == pytest.approx(1 / 384, rel=1e-14)
    assert beam_kernel.value(0.25, 0.5) == pytest.approx(beam_kernel.value(0.5, 0.25), rel=1e-12)
    assert beam_kernel.sigma == 1


@pytest.mark.parametrize("problem", [SECOND_B0, FOURTH])
def test_symmetric_kernels(problem):
    kernel = kernel_for(problem)
    grid = np.linspace(0.0, 1.0, 100)
    G = kernel.value(grid[:, None], grid[None, :])
    np.testing.assert_allclose(G, G.T, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("B", CATALOG_B)
def test_nonnegative_and_vanishing_at_the_ends(B):
    kernel = kernel_for(ProblemId(n=2, k=1, B=B))
    grid = np.linspace(0.0, 1.0, 200)
    G = kernel.value(grid[:, None], grid[None, :])
    assert np.all(np.isfinite(G))
    assert G.min() >= -1e-14
    np.testing.assert_allclose(kernel.value(0.0, grid[1:-1]), 0.0, atol=1e-14)
    np.testing.assert_allclose(kernel.value(1.0, grid[1:-1]), 0.0, atol=1e-14)
    inner = grid[1:-1]
    assert np.all(kernel.value(inner[:, None], inner[None, :]) > 0.0)


def test_beam_clamped_ends(beam_kernel):
    s = np.linspace(0.05, 0.95, 19)
    h = 1e-7
    left = (beam_kernel.value(h, s) - beam_kernel.value(0.0, s)) / h
    right = (beam_kernel.value(1.0, s) - beam_kernel.value(1.0 - h, s)) / h
    assert np.max(np.abs(left)) < 1e-6
    assert np.max(np.abs(right)) < 1e-6


@settings(max_examples=200, deadline=None)
@given(B=drifts, t=interior)
def test_branches_agree_on_the_diagonal(B, t):
    kernel = kernel_for(ProblemId(n=2, k=1, B=B))
    lower = float(kernel.lower_branch(np.float64(t), np.float64(t)))
    upper = float(kernel.upper_branch(np.float64(t), np.float64(t)))
    assert lower == pytest.approx(upper, rel=1e-10)


def test_stable_forms_match_direct_formula_near_the_switch():
    near = kernel_for(ProblemId(n=2, k=1, B=29.9999))
    far = kernel_for(ProblemId(n=2, k=1, B=30.0001))
    t, s = np.meshgrid(np.linspace(0.1, 0.9, 9), np.linspace(0.1, 0.9, 9))
    np.testing.assert_allclose(near.value(t, s), far.value(t, s), rtol=1e-3)


def test_phi_values():
    assert phi(SECOND_B0, 0.5) == pytest.approx(0.25)
    assert phi(SECOND_B0, 0.0) == 0.0
    assert phi(FOURTH, 1 / 3) == pytest.approx(4 / 81)
    with pytest.raises(DomainError):
        phi(SECOND_B0, 1.5)


def test_unsupported_problems():
    with pytest.raises(UnsupportedProblem):
        kernel_for(ProblemId(n=3, k=1))
    with pytest.raises(UnsupportedProblem):
        kernel_for(ProblemId(n=2, k=1, B=0.0, a=0.0, b=2.0))
