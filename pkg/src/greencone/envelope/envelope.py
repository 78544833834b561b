"""
Normalized kernel, bounding functions k1 <= u~(t, s) <= k2 and the constants K1, K2, m1.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from greencone.kernels import GreenKernel, kernel_for
from greencone.model.models import ProblemId
from greencone.utils import constants
from greencone.utils.errors import DomainError, UnsupportedProblem
from greencone.utils.pretty import RichLog

Profile = Callable[[np.ndarray], np.ndarray]


def _scalar(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


@dataclass(frozen=True)
class Envelope:
    problem: ProblemId
    kernel: GreenKernel
    k1: Profile
    k2: Profile
    K1: float
    K2: float
    a1: float
    b1: float
    m1: float
    kinks: Tuple[float, ...] = ()
    regime: str = "numeric"
    source: str = "closed-form"
    # k1 is a certified lower bound rather than the exact minimum over s
    certified_lower_bound: bool = False

    @property
    def I1(self) -> Tuple[float, float]:
        return self.a1, self.b1

    def cone_lower(self, t):
        """k1(t) / K2, the cone's lower profile per unit sup-norm."""
        return _scalar(np.asarray(self.k1(t), dtype=float) / self.K2)

    def restrict(self, a1: float, b1: float) -> "Envelope":
        """Returns a copy working on I1 = [a1, b1] with m1 recomputed."""
        if not self.problem.a < a1 < b1 < self.problem.b:
            raise DomainError(f"I1 = [{a1}, {b1}] must be a proper subinterval of "
                              f"({self.problem.a}, {self.problem.b})")
        return dataclasses.replace(self, a1=a1, b1=b1, m1=_min_on(self.k1, a1, b1))


def _min_on(func: Profile, lo: float, hi: float, points: int = 2049) -> float:
    grid = np.linspace(lo, hi, points)
    values = np.asarray(func(grid), dtype=float)
    j = int(np.argmin(values))
    best = float(values[j])
    if 0 < j < points - 1:
        res = minimize_scalar(lambda x: float(func(x)), bounds=(grid[j - 1], grid[j + 1]),
                              method="bounded", options={"xatol": constants.GOLDEN_TOL})
        best = min(best, float(res.fun))
    return best


def normalized(kernel: GreenKernel, t, s):
    """u~(t, s) = sigma*g(t, s) / phi(s), continued to s in {a, b} by the closed-form limits.

    Args:
        kernel: Catalogued kernel.
        t: Points of the open interval (a, b).
        s: Points of the closed interval [a, b].

    Raises:
        DomainError: If some t is not interior or some s lies outside [a, b].
    """
    a, b = kernel.a, kernel.b
    t_arr = np.asarray(t, dtype=float)
    s_arr = np.asarray(s, dtype=float)
    if np.any(t_arr <= a) or np.any(t_arr >= b):
        raise DomainError(f"normalized kernel needs t in ({a}, {b})")
    if np.any(s_arr < a) or np.any(s_arr > b):
        raise DomainError(f"normalized kernel needs s in [{a}, {b}]")
    t_arr, s_arr = np.broadcast_arrays(t_arr, s_arr)
    weight = kernel.phi(s_arr)
    interior = weight > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(interior, kernel.value(t_arr, s_arr) / np.where(interior, weight, 1.0), 0.0)
    out = np.where(s_arr == a, kernel.left_limit(t_arr), out)
    out = np.where(s_arr == b, kernel.right_limit(t_arr), out)
    return _scalar(out)


def catalog_regime(problem: ProblemId) -> Optional[str]:
    """Names the closed-form regime of a problem, or None when only the numeric envelope applies."""
    if (problem.n, problem.k) == (4, 2):
        return "fourth-order"
    if (problem.n, problem.k) != (2, 1):
        return None
    B = problem.drift
    if abs(B) < constants.SMALL_DRIFT:
        return "b0"
    if math.isclose(abs(B), constants.B_GOLDEN_POS, rel_tol=constants.DRIFT_MATCH_RTOL):
        return "golden"
    if math.isclose(B, constants.B_MINUS_TWO_PI, rel_tol=constants.DRIFT_MATCH_RTOL):
        return "minus-two-pi"
    lo, hi = constants.CLOSED_FORM_DRIFT_RANGE
    if lo <= B <= hi:
        return "drift"
    return None


def _second_order_kink(B: float) -> float:
    if abs(B) < constants.SMALL_DRIFT:
        return 0.5
    return 1.0 - math.log((1.0 + math.exp(B)) / 2.0) / B


def _second_order_I1(B: float) -> Tuple[float, float]:
    if abs(B) < constants.SMALL_DRIFT:
        return 0.25, 0.75
    eB = math.exp(B)
    return 1.0 - math.log((1.0 + 3.0 * eB) / 4.0) / B, 1.0 - math.log((3.0 + eB) / 4.0) / B


def default_I1(problem: ProblemId) -> Tuple[float, float]:
    """Working interval I1 of a catalogued problem.

    Raises:
        UnsupportedProblem: If the problem has no closed-form envelope.
    """
    regime = catalog_regime(problem)
    if regime is None:
        raise UnsupportedProblem(f"no closed-form I1 for {problem.label()}")
    if regime == "fourth-order":
        return 1.0 / 3.0, 2.0 / 3.0
    if regime == "minus-two-pi":
        two_pi = 2.0 * math.pi
        return math.log((3.0 + math.exp(two_pi)) / 4.0) / two_pi, constants.MINUS_TWO_PI_B1
    return _second_order_I1(problem.drift)


def _diagonal(kernel: GreenKernel) -> Profile:
    """k2(t) = u~(t, t), equal to 1 at both ends."""

    def k2(t):
        t_arr = np.asarray(t, dtype=float)
        inner = (t_arr > kernel.a) & (t_arr < kernel.b)
        safe = np.where(inner, t_arr, 0.5)
        out = np.where(inner, kernel.value(safe, safe) / kernel.phi(safe), 1.0)
        return _scalar(out)

    return k2


def _second_order_envelope(kernel: GreenKernel, regime: str) -> Envelope:
    B = kernel.problem.drift
    left, right = kernel.left_limit, kernel.right_limit

    def k1(t):
        return _scalar(np.minimum(left(np.asarray(t, dtype=float)), right(np.asarray(t, dtype=float))))

    kink = _second_order_kink(B)
    a1, b1 = _second_order_I1(B)
    m1 = min(float(k1(a1)), float(k1(b1)))
    return Envelope(problem=kernel.problem, kernel=kernel, k1=k1, k2=_diagonal(kernel),
                    K1=float(k1(kink)), K2=1.0, a1=a1, b1=b1, m1=m1, kinks=(kink,), regime=regime)


def minus_two_pi_scale() -> float:
    """Constant c of the certified B = -2*pi lower envelope."""
    exponent = float(constants.MINUS_TWO_PI_EXPONENT) * math.pi
    return float(constants.MINUS_TWO_PI_SCALE) * -math.expm1(exponent)


def minus_two_pi_switch_closed_form() -> float:
    """t3 from the explicit logarithm."""
    c = minus_two_pi_scale()
    two_pi = 2.0 * math.pi
    return math.log((c * math.exp(two_pi) + two_pi) / (c + two_pi)) / two_pi


def _minus_two_pi_branches():
    c = minus_two_pi_scale()
    two_pi = 2.0 * math.pi
    denom = math.expm1(two_pi)

    def rising(t):
        return np.expm1(two_pi * np.asarray(t, dtype=float)) / denom

    def falling(t):
        return c * (math.exp(two_pi) - np.exp(two_pi * np.asarray(t, dtype=float))) / (two_pi * denom)

    return rising, falling


def minus_two_pi_switch() -> float:
    """t3 where the two pieces of the certified envelope meet, located by Brent's method."""
    rising, falling = _minus_two_pi_branches()
    return brentq(lambda t: float(rising(t) - falling(t)), 0.5, 0.99, xtol=constants.T3_TOL)


def _minus_two_pi_envelope(kernel: GreenKernel) -> Envelope:
    rising, falling = _minus_two_pi_branches()
    t3 = minus_two_pi_switch()

    def k1(t):
        t_arr = np.asarray(t, dtype=float)
        return _scalar(np.where(t_arr <= t3, rising(t_arr), falling(t_arr)))

    def k2(t):
        return _scalar(np.ones_like(np.asarray(t, dtype=float)))

    a1, b1 = default_I1(kernel.problem)
    m1 = min(float(k1(a1)), float(k1(b1)))
    RichLog.debug(f"B=-2pi envelope: t3={t3:.12f}, K1={float(k1(t3)):.9f}, m1={m1:.9f}")
    return Envelope(problem=kernel.problem, kernel=kernel, k1=k1, k2=k2, K1=float(k1(t3)), K2=1.0,
                    a1=a1, b1=b1, m1=m1, kinks=(t3,), regime="minus-two-pi", certified_lower_bound=True)


def _fourth_k1(t):
    t = np.asarray(t, dtype=float)
    return _scalar(np.minimum(t * (1.0 - t) ** 2 / 2.0, t ** 2 * (1.0 - t) / 2.0))


def _fourth_k2(t):
    t = np.asarray(t, dtype=float)
    out = np.select(
        [t <= 0.25, t <= 0.5, t <= 0.75],
        [t * (1.0 - t) ** 2 / 2.0, (1.0 - t) * (1.0 + 2.0 * t) ** 2 / 24.0, t * (3.0 - 2.0 * t) ** 2 / 24.0],
        default=t ** 2 * (1.0 - t) / 2.0,
    )
    return _scalar(out)


def envelope_closed_form(problem: ProblemId) -> Envelope:
    """Closed-form k1, k2, K1, K2, I1 and m1 of a catalogued problem.

    Second-order problems are covered for every B in [-2, 2], where the minimum of u~ over s sits
    at an endpoint, plus the certified lower envelope at B = -2*pi.

    Raises:
        UnsupportedProblem: If the problem has no closed-form envelope.
    """
    regime = catalog_regime(problem)
    if regime is None:
        raise UnsupportedProblem(f"no closed-form envelope for {problem.label()}")
    kernel = kernel_for(problem)
    if regime == "fourth-order":
        return Envelope(problem=problem, kernel=kernel, k1=_fourth_k1, k2=_fourth_k2,
                        K1=1.0 / 16.0, K2=1.0 / 12.0, a1=1.0 / 3.0, b1=2.0 / 3.0, m1=1.0 / 27.0,
                        kinks=(0.25, 0.5, 0.75), regime=regime)
    if regime == "minus-two-pi":
        return _minus_two_pi_envelope(kernel)
    return _second_order_envelope(kernel, regime)


def _row_extreme(kernel: GreenKernel, t: float, s_grid: np.ndarray, row: np.ndarray, maximize: bool) -> float:
    """Refines the discrete extremum of u~(t, .) with a bounded golden-section search."""
    sign = -1.0 if maximize else 1.0
    j = int(np.argmax(row) if maximize else np.argmin(row))
    best = float(row[j])
    if 0 < j < len(s_grid) - 1:
        res = minimize_scalar(lambda s: sign * float(normalized(kernel, t, s)),
                              bounds=(s_grid[j - 1], s_grid[j + 1]), method="bounded",
                              options={"xatol": constants.GOLDEN_TOL})
        candidate = sign * float(res.fun)
        best = max(best, candidate) if maximize else min(best, candidate)
    return best


def envelope_numeric(kernel: GreenKernel, s_points: int = constants.ENVELOPE_S_POINTS,
                     t_points: int = constants.ENVELOPE_T_POINTS,
                     interval: Optional[Tuple[float, float]] = None) -> Envelope:
    """Sampled envelope k1(t) = min_s u~(t, s), k2(t) = max_s u~(t, s).

    Args:
        kernel: Catalogued kernel.
        s_points: s-grid resolution per row, clamped to at least 64.
        t_points: interior t-grid resolution, clamped to at least 64.
        interval: Optional I1. Defaults to the superlevel set {k1 >= K1/2}.

    Returns:
        Envelope: Profiles interpolate the refined row extrema linearly.
    """
    s_points = max(int(s_points), constants.ENVELOPE_MIN_POINTS)
    t_points = max(int(t_points), constants.ENVELOPE_MIN_POINTS)
    a, b = kernel.a, kernel.b
    s_grid = np.linspace(a, b, s_points)
    t_inner = np.linspace(a, b, t_points + 2)[1:-1]
    table = normalized(kernel, t_inner[:, None], s_grid[None, :])

    lows = np.empty(t_points)
    highs = np.empty(t_points)
    for i, t in enumerate(t_inner):
        lows[i] = _row_extreme(kernel, float(t), s_grid, table[i], maximize=False)
        highs[i] = _row_extreme(kernel, float(t), s_grid, table[i], maximize=True)

    ends = np.array([a, b])
    left_end, right_end = kernel.left_limit(ends), kernel.right_limit(ends)
    t_all = np.concatenate(([a], t_inner, [b]))
    k1_all = np.concatenate(([min(left_end[0], right_end[0])], lows, [min(left_end[1], right_end[1])]))
    k2_all = np.concatenate(([max(left_end[0], right_end[0])], highs, [max(left_end[1], right_end[1])]))

    def k1(t):
        return _scalar(np.interp(np.asarray(t, dtype=float), t_all, k1_all))

    def k2(t):
        return _scalar(np.interp(np.asarray(t, dtype=float), t_all, k2_all))

    def exact_row(t: float, maximize: bool) -> float:
        row = normalized(kernel, t, s_grid)
        return _row_extreme(kernel, t, s_grid, row, maximize)

    def refine_peak(values: np.ndarray, maximize: bool) -> Tuple[float, float]:
        i = int(np.argmax(values))
        if i in (0, len(t_all) - 1):
            return float(t_all[i]), float(values[i])
        lo, hi = t_all[max(i - 1, 1)], t_all[min(i + 1, len(t_all) - 2)]
        res = minimize_scalar(lambda t: -exact_row(t, maximize), bounds=(lo, hi), method="bounded",
                              options={"xatol": constants.GOLDEN_TOL})
        if -float(res.fun) > values[i]:
            return float(res.x), -float(res.fun)
        return float(t_all[i]), float(values[i])

    peak_t, K1 = refine_peak(k1_all, maximize=False)
    _, K2 = refine_peak(k2_all, maximize=True)
    K2 = max(K2, float(np.max(k2_all)))

    if interval is None:
        above = t_all[k1_all >= K1 / 2.0]
        a1, b1 = float(above[0]), float(above[-1])
    else:
        a1, b1 = interval
    m1 = _min_on(k1, a1, b1)
    RichLog.debug(f"numeric envelope for {kernel.problem.label()}: K1={K1:.9f}, K2={K2:.9f}, "
                  f"I1=[{a1:.6f}, {b1:.6f}], m1={m1:.9f}")
    return Envelope(problem=kernel.problem, kernel=kernel, k1=k1, k2=k2, K1=K1, K2=K2, a1=a1, b1=b1,
                    m1=m1, kinks=(peak_t,), regime="numeric", source="numeric")


def build_envelope(problem: ProblemId, interval: Optional[Tuple[float, float]] = None,
                   s_points: int = constants.ENVELOPE_S_POINTS,
                   t_points: int = constants.ENVELOPE_T_POINTS) -> Envelope:
    """Closed-form envelope when one exists, the numeric one otherwise, optionally on a custom I1."""
    if catalog_regime(problem) is not None:
        env = envelope_closed_form(problem)
        return env.restrict(*interval) if interval is not None else env
    RichLog.warn(f"{problem.label()} has no closed-form envelope; sampling it numerically")
    return envelope_numeric(kernel_for(problem), s_points=s_points, t_points=t_points, interval=interval)
