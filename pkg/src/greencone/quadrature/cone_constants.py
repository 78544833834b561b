"""
Weight integrals over [a, b] and I1 and the hypothesis coefficients built from them.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Union

import numpy as np
from scipy import integrate

from greencone.envelope import Envelope
from greencone.model.models import ConeConstants
from greencone.utils import constants
from greencone.utils.errors import QuadratureFailure
from greencone.utils.pretty import RichLog

MIN_TOL, MAX_TOL = 1e-14, 1e-6


def integrate_piecewise(func: Callable[[float], float], lo: float, hi: float,
                        kinks: Iterable[float] = (), tol: float = constants.QUADRATURE_TOL) -> float:
    """Adaptive Gauss-Kronrod integral of func over [lo, hi], pre-split at the kinks inside it.

    Raises:
        QuadratureFailure: If subdivision hits the limit before reaching tol.
    """
    points = sorted(k for k in kinks if lo < k < hi)
    result = integrate.quad(func, lo, hi, points=points or None, epsabs=tol, epsrel=0.0,
                            limit=constants.QUADRATURE_LIMIT, full_output=1)
    value, error = result[0], result[1]
    if len(result) > 3 and error > tol:
        raise QuadratureFailure(f"integral over [{lo}, {hi}] stalled at error {error:.3e}: {result[3]}")
    return float(value)


def cone_constants(envelope: Envelope, tol: float = constants.QUADRATURE_TOL,
                   conservative: bool = False) -> ConeConstants:
    """Computes int phi, int_{I1} phi, int_{I1} k1 phi and the derived coefficients.

    Args:
        envelope: Envelope supplying K1, K2, m1, I1 and k1.
        tol: Absolute quadrature tolerance, in [1e-14, 1e-6].
        conservative: Replace K1 and the I1 integrals by the certified rational floors of the regime.

    Returns:
        ConeConstants: cH1 = 1/(K2 int phi), cH2 = K2/(K1 int k1 phi), cThm5i = 1/(m1 int_{I1} phi).
    """
    if not MIN_TOL <= tol <= MAX_TOL:
        raise ValueError(f"quadrature tolerance must lie in [{MIN_TOL}, {MAX_TOL}], got {tol}")
    kernel = envelope.kernel
    a, b = envelope.problem.a, envelope.problem.b
    a1, b1 = envelope.I1

    def weight(s):
        return float(kernel.phi(s))

    def weighted_k1(s):
        return float(envelope.k1(s)) * float(kernel.phi(s))

    int_phi = integrate_piecewise(weight, a, b, tol=tol)
    int_phi_i1 = integrate_piecewise(weight, a1, b1, tol=tol)
    int_k1_phi_i1 = integrate_piecewise(weighted_k1, a1, b1, kinks=envelope.kinks, tol=tol)
    K1 = envelope.K1

    floors = constants.CERTIFIED_FLOORS.get(envelope.regime) if conservative else None
    if floors is not None:
        K1 = float(floors["K1"])
        int_phi_i1 = float(floors["int_phi_i1"])
        int_k1_phi_i1 = float(floors["int_k1_phi_i1"])
    elif conservative:
        RichLog.debug(f"no certified floors for regime '{envelope.regime}', keeping computed constants")

    K2, m1 = envelope.K2, envelope.m1
    result = ConeConstants(
        int_phi=int_phi,
        int_phi_i1=int_phi_i1,
        int_k1_phi_i1=int_k1_phi_i1,
        K1=K1,
        K2=K2,
        m1=m1,
        a1=a1,
        b1=b1,
        c_h1=1.0 / (K2 * int_phi),
        c_h2=K2 / (K1 * int_k1_phi_i1),
        c_thm5i=1.0 / (m1 * int_phi_i1),
        ratio=K2 / m1,
        conservative=floors is not None,
    )
    RichLog.debug(f"cone constants: int phi={int_phi:.12g}, int_I1 phi={int_phi_i1:.12g}, "
                  f"int_I1 k1 phi={int_k1_phi_i1:.12g}")
    return result


def verify_rational(value: float, claimed: Union[Fraction, str, int, float], tol: float) -> bool:
    """True when |value - claimed| <= tol."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    claimed = Fraction(claimed) if not isinstance(claimed, Fraction) else claimed
    return bool(np.abs(float(value) - float(claimed)) <= tol)
