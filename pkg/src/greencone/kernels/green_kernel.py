"""
Closed-form Green's kernels of the catalogued (k, n-k) problems.

Every kernel is stored with its sign applied, so `GreenKernel.value` is the nonnegative
sigma * g(t, s) with sigma = (-1)^(n-k).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from greencone.model.models import ProblemId
from greencone.utils import constants
from greencone.utils.errors import DomainError, UnsupportedProblem

Branch = Callable[[np.ndarray, np.ndarray], np.ndarray]

DIAGONAL_TOL = 1e-12


def _second_lower(B: float) -> Branch:
    """sigma*g on 0 <= s <= t <= 1 for u'' + B u' = -f, u(0) = u(1) = 0."""
    if abs(B) < constants.SMALL_DRIFT:
        return lambda t, s: s * (1.0 - t)
    if B > constants.STABLE_DRIFT:
        return lambda t, s: (np.exp(-B * (t - s)) * -np.expm1(-B * s) * -np.expm1(-B * (1.0 - t))
                             / (B * -np.expm1(-B)))
    if B < -constants.STABLE_DRIFT:
        b = -B
        return lambda t, s: -np.expm1(-b * s) * -np.expm1(-b * (1.0 - t)) / (b * -np.expm1(-b))
    return lambda t, s: np.expm1(B * s) * np.expm1(B * (1.0 - t)) / (B * np.expm1(B))


def _second_upper(B: float) -> Branch:
    """sigma*g on 0 < t < s <= 1."""
    if abs(B) < constants.SMALL_DRIFT:
        return lambda t, s: (1.0 - s) * t
    if B > constants.STABLE_DRIFT:
        return lambda t, s: -np.expm1(-B * (1.0 - s)) * -np.expm1(-B * t) / (B * -np.expm1(-B))
    if B < -constants.STABLE_DRIFT:
        b = -B
        return lambda t, s: (np.exp(-b * (s - t)) * -np.expm1(-b * (1.0 - s)) * -np.expm1(-b * t)
                             / (b * -np.expm1(-b)))
    return lambda t, s: (np.exp(B) - np.exp(B * s)) * -np.expm1(-B * t) / (B * np.expm1(B))


def _second_left_limit(B: float) -> Callable[[np.ndarray], np.ndarray]:
    """lim_{s->0+} sigma*g(t,s) / phi(s)."""
    if abs(B) < constants.SMALL_DRIFT:
        return lambda t: 1.0 - t
    if B > constants.STABLE_DRIFT:
        return lambda t: np.exp(-B * t) * -np.expm1(-B * (1.0 - t)) / -np.expm1(-B)
    return lambda t: np.expm1(B * (1.0 - t)) / np.expm1(B)


def _second_right_limit(B: float) -> Callable[[np.ndarray], np.ndarray]:
    """lim_{s->1-} sigma*g(t,s) / phi(s)."""
    if abs(B) < constants.SMALL_DRIFT:
        return lambda t: t
    if B > constants.STABLE_DRIFT:
        return lambda t: -np.expm1(-B * t) / -np.expm1(-B)
    if B < -constants.STABLE_DRIFT:
        b = -B
        return lambda t: np.exp(-b * (1.0 - t)) * -np.expm1(-b * t) / -np.expm1(-b)
    return lambda t: -np.expm1(-B * t) * np.exp(B) / np.expm1(B)


def _fourth_lower(t, s):
    return s ** 2 / 6.0 * (1.0 - t) ** 2 * (3.0 * t - s - 2.0 * s * t)


def _fourth_upper(t, s):
    return (1.0 - s) ** 2 / 6.0 * t ** 2 * (3.0 * s - t - 2.0 * s * t)


def _fourth_left_limit(t):
    return t * (1.0 - t) ** 2 / 2.0


def _fourth_right_limit(t):
    return t ** 2 * (1.0 - t) / 2.0


@dataclass(frozen=True)
class GreenKernel:
    problem: ProblemId
    family: str
    sigma: int
    phi_exponents: Tuple[int, int]
    lower_branch: Branch
    upper_branch: Branch
    left_limit: Callable[[np.ndarray], np.ndarray]
    right_limit: Callable[[np.ndarray], np.ndarray]

    @property
    def a(self) -> float:
        return self.problem.a

    @property
    def b(self) -> float:
        return self.problem.b

    @property
    def is_second_order(self) -> bool:
        return self.problem.n == 2

    def value(self, t, s):
        """sigma * g(t, s), broadcasting over array arguments."""
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            lower = self.lower_branch(t, s)
            upper = self.upper_branch(t, s)
        return np.where(s <= t + DIAGONAL_TOL, lower, upper)

    def phi(self, s):
        """(s-a)^(n-k) (b-s)^k without domain checking."""
        left, right = self.phi_exponents
        s = np.asarray(s, dtype=float)
        return (s - self.a) ** left * (self.b - s) ** right


def kernel_for(problem: ProblemId) -> GreenKernel:
    """Looks up the closed-form kernel of a supported problem.

    Args:
        problem: The (n, k, B) problem on [a, b].

    Returns:
        GreenKernel: Both branches, the sign and the weight exponents.

    Raises:
        UnsupportedProblem: If the problem is outside the catalog.
    """
    if (problem.a, problem.b) != (0.0, 1.0):
        raise UnsupportedProblem(f"catalogued kernels live on [0, 1], got [{problem.a}, {problem.b}]")
    weights = (problem.n - problem.k, problem.k)
    if (problem.n, problem.k) == (2, 1):
        B = problem.drift
        return GreenKernel(problem=problem, family="second-order", sigma=problem.sigma, phi_exponents=weights,
                           lower_branch=_second_lower(B), upper_branch=_second_upper(B),
                           left_limit=_second_left_limit(B), right_limit=_second_right_limit(B))
    if (problem.n, problem.k) == (4, 2):
        if problem.B not in (None, 0.0):
            raise UnsupportedProblem("the fourth-order clamped beam has no drift term")
        return GreenKernel(problem=problem, family="fourth-order", sigma=problem.sigma, phi_exponents=weights,
                           lower_branch=_fourth_lower, upper_branch=_fourth_upper,
                           left_limit=_fourth_left_limit, right_limit=_fourth_right_limit)
    raise UnsupportedProblem(f"no catalogued kernel for n={problem.n}, k={problem.k}")


def phi(problem: ProblemId, s):
    """Weight (s-a)^(n-k) (b-s)^k.

    Raises:
        DomainError: If any s lies outside [a, b].
    """
    values = np.asarray(s, dtype=float)
    if np.any(values < problem.a) or np.any(values > problem.b):
        raise DomainError(f"phi is defined on [{problem.a}, {problem.b}]")
    out = (values - problem.a) ** (problem.n - problem.k) * (problem.b - values) ** problem.k
    return float(out) if out.ndim == 0 else out
