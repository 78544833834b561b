"""
Grid-certified checks of the Krasnoselskii and Leggett-Williams hypothesis systems.

Every check reduces to the worst value of a margin m(t, u) over a rectangle: dense sampling of
each smooth branch piece followed by coordinate-wise bounded refinement around the worst sample.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from greencone.envelope import Envelope
from greencone.hypotheses.nonlinearity import Nonlinearity
from greencone.model.models import (
    ConeConstants,
    HypothesisId,
    HypothesisReport,
    LimitEstimate,
    LimitKind,
    LimitRatios,
    Verdict,
)
from greencone.utils import constants
from greencone.utils.errors import InvalidThreshold, ThresholdOrdering
from greencone.utils.pretty import RichLog

# margin(t, u, f(t, u)) -> signed slack of the inequality
Margin = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Sample:
    value: float
    t: float
    u: float
    # worst sampled margin over rows with t strictly inside the range
    interior_value: float


class RectangleSampler:
    def __init__(self, f: Nonlinearity, grid_points: int = constants.HYPOTHESIS_GRID_POINTS,
                 sweeps: int = constants.HYPOTHESIS_REFINE_SWEEPS):
        self.f = f
        self.grid_points = max(int(grid_points), 3)
        self.sweeps = sweeps

    def _refine(self, margin: Margin, branch: int, t: float, u: float, dt: float, du: float,
                t_range: Tuple[float, float], u_range: Tuple[float, float]) -> Tuple[float, float, float]:
        def value(tt, uu):
            fv = self.f.evaluate_branch(branch, tt, uu)
            out = float(margin(np.asarray(tt), np.asarray(uu), np.asarray(fv)))
            return out if math.isfinite(out) else -math.inf

        best = value(t, u)
        for _ in range(self.sweeps):
            lo, hi = max(u_range[0], u - du), min(u_range[1], u + du)
            if hi > lo:
                res = minimize_scalar(lambda x: value(t, x), bounds=(lo, hi), method="bounded",
                                      options={"xatol": constants.GOLDEN_TOL})
                if res.fun < best:
                    best, u = float(res.fun), float(res.x)
            lo, hi = max(t_range[0], t - dt), min(t_range[1], t + dt)
            if hi > lo:
                res = minimize_scalar(lambda x: value(x, u), bounds=(lo, hi), method="bounded",
                                      options={"xatol": constants.GOLDEN_TOL})
                if res.fun < best:
                    best, t = float(res.fun), float(res.x)
        return best, t, u

    def minimize(self, margin: Margin, t_range: Tuple[float, float], u_range: Tuple[float, float]) -> Sample:
        """Worst margin over t_range x u_range, sampled per branch piece and refined."""
        ts = np.linspace(t_range[0], t_range[1], self.grid_points)
        dt = ts[1] - ts[0]
        best: Optional[Sample] = None
        interior = math.inf
        jump_at = {beta for beta, _ in self.f.jumps}
        for seg in self.f.segments(*u_range):
            lo = seg.lo
            # at a jump the lower boundary value belongs to the branch below
            if seg.branch > 0 and float(self.f.boundaries[seg.branch - 1]) == lo and lo in jump_at:
                lo = min(lo + constants.JUMP_EDGE_RTOL * max(1.0, abs(lo)), seg.hi)
            us = np.linspace(lo, seg.hi, self.grid_points) if seg.hi > lo else np.array([lo])
            du = us[1] - us[0] if len(us) > 1 else 0.0
            T, U = np.meshgrid(ts, us, indexing="ij")
            fv = np.asarray(self.f.evaluate_branch(seg.branch, T, U), dtype=float)
            values = np.asarray(margin(T, U, fv), dtype=float)
            values = np.where(np.isfinite(values), values, -np.inf)
            interior = min(interior, float(np.min(values[1:-1, :])))
            i, j = np.unravel_index(int(np.argmin(values)), values.shape)
            value, t, u = self._refine(margin, seg.branch, float(ts[i]), float(us[j]), dt, du,
                                       t_range, (lo, seg.hi))
            value = min(value, float(values[i, j]))
            if best is None or value < best.value:
                best = Sample(value=value, t=t, u=u, interior_value=interior)
        return Sample(value=best.value, t=best.t, u=best.u, interior_value=interior)

    def pointwise(self, margin: Margin, t_range: Tuple[float, float], u: float) -> float:
        """Worst margin at a single u over the interior of t_range."""
        ts = np.linspace(t_range[0], t_range[1], self.grid_points)[1:-1]
        fv = np.asarray(self.f(ts, u), dtype=float)
        values = np.asarray(margin(ts, np.full_like(ts, u), fv), dtype=float)
        return float(np.min(np.where(np.isfinite(values), values, -np.inf)))


def _positive(**thresholds: float) -> None:
    for name, value in thresholds.items():
        if not value > 0:
            raise InvalidThreshold(f"threshold {name} must be positive, got {value}")


def _tolerance(scale: float) -> float:
    return constants.MARGIN_RTOL * max(1.0, abs(scale))


def _report(hypothesis: HypothesisId, sample: Sample, scale: float, thresholds: Dict[str, float],
            coefficient: float, t_range, u_range, strict: bool = False, strict_at_u: Optional[float] = None,
            strict_margin: Optional[float] = None, note: Optional[str] = None) -> HypothesisReport:
    tol = _tolerance(scale)
    passed = sample.value >= -tol
    strict_verdict = None
    if strict:
        strict_ok = strict_margin is not None and strict_margin > tol
        strict_verdict = Verdict.PASS if strict_ok else Verdict.FAIL
        passed = passed and strict_ok
    report = HypothesisReport(
        hypothesis=hypothesis,
        thresholds=thresholds,
        coefficient=coefficient,
        t_range=tuple(t_range),
        u_range=tuple(u_range),
        verdict=Verdict.PASS if passed else Verdict.FAIL,
        margin=sample.value,
        witness_t=sample.t,
        witness_u=sample.u,
        strict=strict,
        strict_at_u=strict_at_u,
        strict_margin=strict_margin,
        strict_verdict=strict_verdict,
        note=note,
    )
    log = RichLog.info if passed else RichLog.warn
    log(f"{hypothesis.value}: {'[green]pass' if passed else '[red]fail'}[/] "
        f"(margin {sample.value:.6g} at t={sample.t:.6g}, u={sample.u:.6g})")
    return report


def _upper_bound(f: Nonlinearity, sampler: RectangleSampler, hypothesis: HypothesisId, bound: float,
                 u_hi: float, thresholds: Dict[str, float], coefficient: float, strict_at_u: Optional[float] = None,
                 strict_everywhere: bool = False) -> HypothesisReport:
    """f(t, u) <= bound on [a, b] x [0, u_hi]."""
    t_range, u_range = (f.a, f.b), (0.0, u_hi)

    def margin(t, u, fv):
        return bound - fv

    sample = sampler.minimize(margin, t_range, u_range)
    strict_margin = None
    if strict_at_u is not None:
        strict_margin = sampler.pointwise(margin, t_range, strict_at_u)
    elif strict_everywhere:
        strict_margin = sample.interior_value
    return _report(hypothesis, sample, bound, thresholds, coefficient, t_range, u_range,
                   strict=strict_at_u is not None or strict_everywhere, strict_at_u=strict_at_u,
                   strict_margin=strict_margin)


def _linear_lower_bound(f: Nonlinearity, sampler: RectangleSampler, hypothesis: HypothesisId, slope: float,
                        t_range: Tuple[float, float], u_range: Tuple[float, float], thresholds: Dict[str, float],
                        strict_at_u: Optional[float] = None, strict_everywhere: bool = False) -> HypothesisReport:
    """f(t, u) >= slope * u on t_range x u_range."""

    def margin(t, u, fv):
        return fv - slope * u

    sample = sampler.minimize(margin, t_range, u_range)
    strict_margin = None
    if strict_at_u is not None:
        strict_margin = sampler.pointwise(margin, t_range, strict_at_u)
    elif strict_everywhere:
        strict_margin = sample.interior_value
    return _report(hypothesis, sample, slope * u_range[1], thresholds, slope, t_range, u_range,
                   strict=strict_at_u is not None or strict_everywhere, strict_at_u=strict_at_u,
                   strict_margin=strict_margin)


def check_H1(f: Nonlinearity, c: ConeConstants, p: float,
             sampler: Optional[RectangleSampler] = None) -> HypothesisReport:
    """f(t, u) <= cH1 p on [a, b] x [0, p]."""
    _positive(p=p)
    sampler = sampler or RectangleSampler(f)
    return _upper_bound(f, sampler, HypothesisId.H1, c.c_h1 * p, p, {"p": p}, c.c_h1)


def check_H2(f: Nonlinearity, c: ConeConstants, env: Envelope, q: float,
             sampler: Optional[RectangleSampler] = None) -> HypothesisReport:
    """f(t, u) >= cH2 u on I1 x [(m1/K2) q, q]."""
    _positive(q=q)
    sampler = sampler or RectangleSampler(f)
    return _linear_lower_bound(f, sampler, HypothesisId.H2, c.c_h2, env.I1, (c.m1 / c.K2 * q, q), {"q": q})


def check_H1_star(f: Nonlinearity, c: ConeConstants, p: float,
                  sampler: Optional[RectangleSampler] = None) -> HypothesisReport:
    """(H1) plus f(t, p) < cH1 p for every t."""
    _positive(p=p)
    sampler = sampler or RectangleSampler(f)
    return _upper_bound(f, sampler, HypothesisId.H1_STAR, c.c_h1 * p, p, {"p": p}, c.c_h1, strict_at_u=p)


def check_H2_star(f: Nonlinearity, c: ConeConstants, env: Envelope, q: float,
                  sampler: Optional[RectangleSampler] = None) -> HypothesisReport:
    """(H2) plus f(t, q) > cH2 q for every t in I1."""
    _positive(q=q)
    sampler = sampler or RectangleSampler(f)
    return _linear_lower_bound(f, sampler, HypothesisId.H2_STAR, c.c_h2, env.I1, (c.m1 / c.K2 * q, q), {"q": q},
                               strict_at_u=q)


def check_thm2(f: Nonlinearity, c: ConeConstants, env: Envelope, p: float, q: float,
               sampler: Optional[RectangleSampler] = None) -> List[HypothesisReport]:
    """(H1) at p and (H2) at q with p != q."""
    _positive(p=p, q=q)
    if p == q:
        raise ThresholdOrdering("the one-solution theorem needs p != q")
    sampler = sampler or RectangleSampler(f)
    return [check_H1(f, c, p, sampler), check_H2(f, c, env, q, sampler)]


def check_thm5(f: Nonlinearity, c: ConeConstants, env: Envelope, p: float, q: float, r: float,
               strict_iii: bool = True, sampler: Optional[RectangleSampler] = None) -> List[HypothesisReport]:
    """Conditions (i)-(iii) of the two-solution theorem.

    Args:
        strict_iii: Demand f > cH2 u on the whole (iii) rectangle rather than only f >= cH2 u.

    Raises:
        ThresholdOrdering: Unless 0 < p < q < r.
    """
    _positive(p=p, q=q, r=r)
    if not p < q < r:
        raise ThresholdOrdering(f"two-solution theorem needs p < q < r, got {p}, {q}, {r}")
    sampler = sampler or RectangleSampler(f)
    thresholds = {"p": p, "q": q, "r": r}
    stretch = c.K2 / c.m1
    first = _linear_lower_bound(f, sampler, HypothesisId.THM5_I, c.c_thm5i, env.I1, (r, stretch * r), thresholds,
                                strict_at_u=r)
    second = _upper_bound(f, sampler, HypothesisId.THM5_II, c.c_h1 * q, stretch * q, thresholds, c.c_h1,
                          strict_at_u=q)
    third = _linear_lower_bound(f, sampler, HypothesisId.THM5_III, c.c_h2, env.I1, (p / stretch, p), thresholds,
                                strict_everywhere=strict_iii)
    if not strict_iii:
        third = third.model_copy(update={"note": "strictness on the (iii) rectangle relaxed"})
    return [first, second, third]


def check_thm6(f: Nonlinearity, c: ConeConstants, env: Envelope, p: float, q: float, r: float,
               sampler: Optional[RectangleSampler] = None) -> List[HypothesisReport]:
    """Conditions (a)-(c) of the three-solution theorem.

    Raises:
        ThresholdOrdering: Unless 0 < p < q and (K2/m1) q <= r.
    """
    _positive(p=p, q=q, r=r)
    stretch = c.K2 / c.m1
    if not (p < q and stretch * q <= r * (1.0 + constants.MARGIN_RTOL)):
        raise ThresholdOrdering(f"three-solution theorem needs p < q and (K2/m1) q <= r, got {p}, {q}, {r}")
    sampler = sampler or RectangleSampler(f)
    thresholds = {"p": p, "q": q, "r": r}
    first = _upper_bound(f, sampler, HypothesisId.THM6_A, c.c_h1 * r, r, thresholds, c.c_h1)
    second = _upper_bound(f, sampler, HypothesisId.THM6_B, c.c_h1 * p, p, thresholds, c.c_h1,
                          strict_everywhere=True)
    third = _linear_lower_bound(f, sampler, HypothesisId.THM6_C, c.c_thm5i, env.I1, (q, stretch * q), thresholds,
                                strict_at_u=q)
    return [first, second, third]


def _trend(values: np.ndarray) -> str:
    diffs = np.diff(values)
    scale = max(1.0, float(np.max(np.abs(values))))
    if np.all(np.abs(diffs) <= 1e-12 * scale):
        return "constant"
    if np.all(diffs >= 0):
        return "increasing"
    if np.all(diffs <= 0):
        return "decreasing"
    return "oscillating"


def _kind(value: float) -> LimitKind:
    if value > constants.LIMIT_DIVERGENCE:
        return LimitKind.DIVERGES
    if value < constants.LIMIT_VANISHING:
        return LimitKind.VANISHES
    return LimitKind.FINITE


def _estimate(ratios: np.ndarray, upper: bool) -> LimitEstimate:
    tail = ratios[:, -constants.LIMIT_TAIL:]
    values = np.max(tail, axis=1) if upper else np.min(tail, axis=1)
    return LimitEstimate(values=[float(v) for v in values], kinds=[_kind(float(v)) for v in values],
                         trend=[_trend(row) for row in tail])


def limit_ratios(f: Nonlinearity, t_samples: Optional[Sequence[float]] = None,
                 probes: int = constants.LIMIT_PROBE_COUNT) -> LimitRatios:
    """Estimates limsup/liminf of f(t, u)/u at 0+ and at infinity along u = 2^(-j) and u = 2^j, j = 1..probes."""
    ts = np.asarray(t_samples if t_samples is not None
                    else np.linspace(f.a, f.b, constants.CONTINUITY_T_SAMPLES), dtype=float)
    exponents = np.arange(1, probes + 1, dtype=float)
    toward_zero = 2.0 ** -exponents
    toward_inf = 2.0 ** exponents
    with np.errstate(all="ignore"):
        near = np.asarray(f(ts[:, None], toward_zero[None, :]), dtype=float) / toward_zero[None, :]
        far = np.asarray(f(ts[:, None], toward_inf[None, :]), dtype=float) / toward_inf[None, :]
    near = np.where(np.isnan(near), np.inf, near)
    far = np.where(np.isnan(far), np.inf, far)
    return LimitRatios(t_samples=[float(t) for t in ts], f0_plus=_estimate(near, upper=True),
                       f0_minus=_estimate(near, upper=False), finf_plus=_estimate(far, upper=True),
                       finf_minus=_estimate(far, upper=False))


def _on(limits: LimitRatios, estimate: LimitEstimate, t_range: Tuple[float, float]) -> np.ndarray:
    ts = np.asarray(limits.t_samples)
    values = np.asarray(estimate.effective())
    mask = (ts >= t_range[0]) & (ts <= t_range[1])
    return values[mask] if np.any(mask) else values


def _limit_report(hypothesis: HypothesisId, margin: float, note: str,
                  thresholds: Optional[Dict[str, float]] = None) -> HypothesisReport:
    passed = margin > 0
    log = RichLog.info if passed else RichLog.warn
    log(f"{hypothesis.value}: {'[green]pass' if passed else '[red]fail'}[/] (margin {margin:.6g})")
    return HypothesisReport(hypothesis=hypothesis, thresholds=thresholds or {},
                            verdict=Verdict.PASS if passed else Verdict.FAIL, margin=margin, strict=True, note=note)


def check_corollary24(limits: LimitRatios, c: ConeConstants, env: Envelope) -> List[HypothesisReport]:
    """(H3) and (H4) on the estimated limits; the corollary holds when either passes."""
    whole = (env.problem.a, env.problem.b)
    ceiling, floor = c.c_h1, c.c_limit
    h3 = min(float(np.min(ceiling - _on(limits, limits.f0_plus, whole))),
             float(np.min(_on(limits, limits.finf_minus, env.I1) - floor)))
    h4 = min(float(np.min(ceiling - _on(limits, limits.finf_plus, whole))),
             float(np.min(_on(limits, limits.f0_minus, env.I1) - floor)))
    coefficients = {"c_h1": ceiling, "c_limit": floor}
    return [
        _limit_report(HypothesisId.H3, h3, "f0+ < cH1 on [a, b] and finf- > K2^2/(K1 m1 int k1 phi) on I1",
                      coefficients),
        _limit_report(HypothesisId.H4, h4, "finf+ < cH1 on [a, b] and f0- > K2^2/(K1 m1 int k1 phi) on I1",
                      coefficients),
    ]


def check_thm3(f: Nonlinearity, c: ConeConstants, p: float, limits: Optional[LimitRatios] = None,
               sampler: Optional[RectangleSampler] = None) -> List[HypothesisReport]:
    """f0- = finf- = infinity on [a, b] and (H1*) at p."""
    limits = limits or limit_ratios(f)
    values = np.concatenate((limits.f0_minus.effective(), limits.finf_minus.effective()))
    margin = float(np.min(values)) - constants.LIMIT_DIVERGENCE
    report = _limit_report(HypothesisId.LIMITS_INFINITE, margin, "f0- and finf- diverge at every t sample")
    return [report, check_H1_star(f, c, p, sampler)]


def check_thm4(f: Nonlinearity, c: ConeConstants, env: Envelope, q: float, limits: Optional[LimitRatios] = None,
               sampler: Optional[RectangleSampler] = None) -> List[HypothesisReport]:
    """f0+ = finf+ = 0 on [a, b] and (H2*) at q."""
    limits = limits or limit_ratios(f)
    values = np.concatenate((limits.f0_plus.effective(), limits.finf_plus.effective()))
    margin = constants.LIMIT_VANISHING - float(np.max(values))
    report = _limit_report(HypothesisId.LIMITS_ZERO, margin, "f0+ and finf+ vanish at every t sample")
    return [report, check_H2_star(f, c, env, q, sampler)]
