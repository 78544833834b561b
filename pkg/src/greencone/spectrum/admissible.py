"""
Admissible M-intervals for which the catalogued Green's functions keep the (Pg1) sandwich.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from greencone.model.models import AdmissibleInterval, ProblemId
from greencone.utils import constants
from greencone.utils.errors import RootNotFound, UnsupportedProblem


def first_sign_change(func: Callable[[float], float], lo: float, hi: float, step: float) -> float:
    """Scans [lo, hi] with the given step and returns the root of the first sign change."""
    x_prev, f_prev = lo, func(lo)
    x = lo + step
    while x <= hi:
        f_x = func(x)
        if f_prev == 0.0:
            return x_prev
        if np.sign(f_x) != np.sign(f_prev):
            return brentq(func, x_prev, x, xtol=constants.ROOT_XTOL)
        x_prev, f_prev = x, f_x
        x += step
    raise RootNotFound(f"no sign change on [{lo}, {hi}]")


def beam_characteristic(lam: float) -> float:
    return math.cos(lam) * math.cosh(lam) - 1.0


def beam_second_characteristic(x: float) -> float:
    """tan(x) - tanh(x) with x = lambda / sqrt(2)."""
    return math.tan(x) - math.tanh(x)


def lambda1() -> float:
    """Least positive root of cos(l) cosh(l) = 1."""
    return first_sign_change(beam_characteristic, constants.LAMBDA1_SCAN_STEP, 10.0, constants.LAMBDA1_SCAN_STEP)


def lambda2() -> float:
    """Least positive root of tan(l/sqrt 2) = tanh(l/sqrt 2), solved in x = l/sqrt 2 on (pi, 3pi/2)."""
    eps = constants.LAMBDA2_BRACKET_EPS
    lo, hi = math.pi + eps, 1.5 * math.pi - eps
    if np.sign(beam_second_characteristic(lo)) == np.sign(beam_second_characteristic(hi)):
        raise RootNotFound("tan(x) - tanh(x) does not change sign on (pi, 3pi/2)")
    return math.sqrt(2.0) * brentq(beam_second_characteristic, lo, hi, xtol=constants.ROOT_XTOL)


def admissible_M_second_order(B: float) -> AdmissibleInterval:
    """(-inf, (B^2 + 4 pi^2)/4) for u'' + B u' + M u with Dirichlet conditions."""
    return AdmissibleInterval(lower=-math.inf, upper=(B * B + 4.0 * math.pi ** 2) / 4.0,
                              lower_open=True, upper_open=True)


def admissible_M_fourth_order() -> AdmissibleInterval:
    """(-lambda1^4, lambda2^4] for the clamped beam u'''' + M u."""
    return AdmissibleInterval(lower=-lambda1() ** 4, upper=lambda2() ** 4, lower_open=True, upper_open=False)


def admissible_M(problem: ProblemId) -> AdmissibleInterval:
    if (problem.n, problem.k) == (2, 1):
        return admissible_M_second_order(problem.drift)
    if (problem.n, problem.k) == (4, 2):
        return admissible_M_fourth_order()
    raise UnsupportedProblem(f"no admissible interval for {problem.label()}")


def _shoot(B: float, M: float) -> float:
    """u(1) for u'' + B u' + M u = 0, u(0) = 0, u'(0) = 1."""
    sol = solve_ivp(lambda t, y: [y[1], -B * y[1] - M * y[0]], (0.0, 1.0), [0.0, 1.0],
                    method="DOP853", rtol=1e-12, atol=1e-12)
    return float(sol.y[0, -1])


def dirichlet_eigenvalue_shooting(B: float, step: float = 1.0) -> float:
    """First M with a nontrivial Dirichlet solution, located by shooting and Brent's method."""
    start = B * B / 4.0
    return first_sign_change(lambda M: _shoot(B, M), start, start + 100.0, step)
