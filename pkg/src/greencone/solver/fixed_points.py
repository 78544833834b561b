"""
Multi-start search for fixed points of the discrete operator and their residual certificates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from greencone.envelope import Envelope, build_envelope
from greencone.hypotheses.nonlinearity import Nonlinearity
from greencone.model.models import BvpSolution
from greencone.solver.discretization import (
    Discretization,
    apply_L,
    discretize,
    evaluate_operator,
    interpolate_nodal,
    load,
)
from greencone.utils import constants
from greencone.utils.errors import NoConvergence
from greencone.utils.pretty import ProgressBarFactory, RichLog


def seed_amplitudes(low: float, high: float, count: int = constants.SOLVER_SEEDS) -> List[float]:
    """Geometrically spaced seed norms covering [low, high]."""
    return [float(x) for x in np.geomspace(low, high, max(int(count), 1))]


def band_amplitudes(levels: Sequence[float], per_band: int = constants.BAND_SEEDS) -> List[float]:
    """Seed norms spread geometrically over each band between consecutive positive levels."""
    levels = sorted({float(x) for x in levels if x > 0.0})
    out: List[float] = []
    for lo, hi in zip(levels, levels[1:]):
        out.extend(seed_amplitudes(lo, hi, per_band))
    return sorted(set(out))


def _norm(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if len(x) else 0.0


@dataclass
class _Candidate:
    d: Discretization
    u: np.ndarray
    seed: float
    iterations: int
    method: str

    def on(self, t: np.ndarray) -> np.ndarray:
        return interpolate_nodal(self.d, self.u, t)


class FixedPointSearch:
    """Runs damped Newton from every seed, refines at branch crossings and deduplicates.

    A second, deflated pass restarts Newton from a subset of the seeds with every solution found so far
    deflated away, which reaches solutions whose basins none of the plain seeds fall into.

    Attributes:
        failures: (seed amplitude, reason) for every plain seed that did not converge.
    """

    def __init__(self, d: Discretization, f: Nonlinearity, envelope: Envelope, tol: float = constants.SOLVER_TOL,
                 refine_branches: bool = True, show_progress: bool = False,
                 deflation_seeds: int = constants.DEFLATION_SEEDS):
        if not 1e-12 <= tol <= 1e-6:
            raise ValueError(f"solver tolerance must lie in [1e-12, 1e-6], got {tol}")
        self.d = d
        self.f = f
        self.envelope = envelope
        self.tol = tol
        self.refine_branches = refine_branches and len(f.boundaries) > 0
        self.show_progress = show_progress
        self.deflation_seeds = max(int(deflation_seeds), 0)
        self.failures: List[Tuple[float, str]] = []

    def _residual(self, d: Discretization, u: np.ndarray) -> np.ndarray:
        return u - apply_L(d, self.f, u)

    def _converged(self, residual: float) -> bool:
        """Absolute test on ||u - L u||_inf, whatever the size of u."""
        return residual <= self.tol

    @staticmethod
    def _distances(d: Discretization, u: np.ndarray, known: Sequence[np.ndarray]) -> List[Tuple[float, np.ndarray]]:
        """(q, e) per known solution: e = u - u_k and q its weighted L2 norm squared relative to u_k."""
        out = []
        for k in known:
            e = u - k
            out.append((float(np.sum(d.weights * e * e)) / (1.0 + _norm(k)) ** 2, e / (1.0 + _norm(k)) ** 2))
        return out

    def _merit(self, d: Discretization, u: np.ndarray, r: float, known: Sequence[np.ndarray]) -> float:
        """r times the deflation factor prod_k (1/q_k + shift); infinite on a known solution."""
        factor = 1.0
        for q, _ in self._distances(d, u, known):
            if q <= 0.0:
                return math.inf
            factor *= 1.0 / q + constants.DEFLATION_SHIFT
        return factor * r

    def _deflated_step(self, d: Discretization, u: np.ndarray, delta: np.ndarray,
                       known: Sequence[np.ndarray]) -> np.ndarray:
        """Newton step for the deflated residual, a rescaling of the plain step delta."""
        slope = 0.0
        for q, e in self._distances(d, u, known):
            if q <= 0.0:
                return delta
            # d/du log(1/q + shift) along delta
            slope += -2.0 * float(np.sum(d.weights * e * delta)) / (q * q * (1.0 / q + constants.DEFLATION_SHIFT))
        denom = 1.0 - slope
        if not math.isfinite(denom) or abs(denom) < 1e-12:
            return delta
        return delta / denom

    def _jacobian(self, d: Discretization, u: np.ndarray) -> np.ndarray:
        step = constants.JACOBIAN_STEP * (1.0 + np.abs(u))
        slope = (load(d, self.f, u + step) - load(d, self.f, u)) / step
        return np.eye(d.size) - d.operator * slope[None, :]

    def _picard(self, d: Discretization, u: np.ndarray) -> np.ndarray:
        for _ in range(constants.PICARD_ITER):
            nxt = np.maximum(apply_L(d, self.f, u), 0.0)
            if not np.all(np.isfinite(nxt)) or _norm(nxt) > constants.DIVERGENCE_CAP:
                raise NoConvergence("Picard iteration diverged")
            if _norm(nxt - u) <= self.tol:
                return nxt
            u = nxt
        return u

    def solve_from(self, d: Discretization, u0: np.ndarray,
                   deflate: Sequence[np.ndarray] = ()) -> Tuple[np.ndarray, int, str]:
        """Damped Newton on u - L u = 0 with iterates clamped at 0 and one Picard fallback.

        Args:
            d: Discretization the nodal values live on.
            u0: Starting nodal values.
            deflate: Known solutions on the nodes of d. When given, the step and the line search work on the
                deflated residual and there is no Picard fallback, since Picard would slide back to them.

        Raises:
            NoConvergence: If Newton stalls twice, an iterate blows up or the iteration budget runs out.
        """
        known = [np.asarray(k, dtype=float) for k in deflate]
        u = np.maximum(np.asarray(u0, dtype=float), 0.0)
        F = self._residual(d, u)
        r = _norm(F)
        merit = self._merit(d, u, r, known)
        method = "deflated newton" if known else "newton"
        fallback_used = False
        for iteration in range(constants.NEWTON_MAX_ITER):
            if self._converged(r):
                return u, iteration, method
            if not np.isfinite(r) or _norm(u) > constants.DIVERGENCE_CAP:
                raise NoConvergence("iterates diverged")
            accepted = False
            try:
                delta = np.linalg.solve(self._jacobian(d, u), -F)
            except np.linalg.LinAlgError:
                delta = None
            if delta is not None and np.all(np.isfinite(delta)):
                if known:
                    delta = self._deflated_step(d, u, delta, known)
                lam = 1.0
                for _ in range(constants.NEWTON_HALVINGS):
                    trial = np.maximum(u + lam * delta, 0.0)
                    F_trial = self._residual(d, trial)
                    r_trial = _norm(F_trial)
                    merit_trial = self._merit(d, trial, r_trial, known)
                    if merit_trial < merit:
                        u, F, r, merit = trial, F_trial, r_trial, merit_trial
                        accepted = True
                        break
                    lam /= 2.0
            if not accepted:
                if fallback_used or known:
                    raise NoConvergence(f"Newton stalled at residual {r:.3e}")
                fallback_used = True
                method = "newton+picard"
                u = self._picard(d, u)
                F = self._residual(d, u)
                r = merit = _norm(F)
        if self._converged(r):
            return u, constants.NEWTON_MAX_ITER, method
        raise NoConvergence(f"no convergence after {constants.NEWTON_MAX_ITER} iterations (residual {r:.3e})")

    def _crossings(self, d: Discretization, u: np.ndarray) -> List[float]:
        a, b = d.kernel.a, d.kernel.b
        ts = np.union1d(np.linspace(a, b, 8 * d.size), d.nodes)
        values = interpolate_nodal(d, u, ts)
        found = []
        for beta in self.f.boundaries:
            shifted = values - beta
            for i in np.nonzero(np.sign(shifted[:-1]) * np.sign(shifted[1:]) < 0)[0]:
                found.append(brentq(lambda t: interpolate_nodal(d, u, t) - beta, ts[i], ts[i + 1],
                                    xtol=constants.ROOT_XTOL))
        return sorted(found)

    def _refine(self, candidate: _Candidate) -> _Candidate:
        """Re-solves with panel breakpoints at the points where u crosses a branch boundary of f."""
        previous: List[float] = []
        for _ in range(constants.BRANCH_REFINE_ROUNDS):
            crossings = self._crossings(candidate.d, candidate.u)
            if not crossings:
                break
            if len(crossings) == len(previous) and np.allclose(crossings, previous, rtol=0.0, atol=1e-10):
                break
            d = discretize(self.d.kernel, N=self.d.size, breakpoints=(*self.d.anchors, *crossings),
                           scheme=self.d.scheme, panel_order=self.d.panel_order)
            u, iterations, method = self.solve_from(d, candidate.on(d.nodes))
            RichLog.debug(f"refined at {len(crossings)} branch crossing(s), gamma={_norm(u):.6g}")
            candidate = _Candidate(d=d, u=u, seed=candidate.seed, iterations=candidate.iterations + iterations,
                                   method=f"{method}+refined")
            previous = crossings
        return candidate

    def _distinct(self, candidates: List[_Candidate]) -> List[_Candidate]:
        a, b = self.d.kernel.a, self.d.kernel.b
        grid = np.linspace(a, b, 513)
        kept: List[Tuple[_Candidate, np.ndarray]] = []
        for cand in candidates:
            values = cand.on(grid)
            gamma = _norm(values)
            duplicate = False
            for other, other_values in kept:
                threshold = constants.DEDUP_RTOL * (1.0 + max(gamma, _norm(other_values)))
                if _norm(values - other_values) <= threshold:
                    duplicate = True
                    break
            if not duplicate:
                kept.append((cand, values))
        return [cand for cand, _ in kept]

    def _deflate(self, found: List[_Candidate], seeds: List[float], shape: np.ndarray) -> List[_Candidate]:
        """Deflated restarts from evenly spread seeds until a round adds no new solution."""
        if not found or self.deflation_seeds == 0:
            return found
        picks = np.unique(np.linspace(0, len(seeds) - 1, min(self.deflation_seeds, len(seeds))).round().astype(int))
        for round_ in range(constants.DEFLATION_ROUNDS):
            added = 0
            for i in picks:
                amplitude = seeds[i]
                known = [c.on(self.d.nodes) for c in found]
                try:
                    u, iterations, method = self.solve_from(self.d, amplitude * shape, deflate=known)
                except NoConvergence as exc:
                    RichLog.debug(f"deflated seed {amplitude:.4g}: {exc}")
                    continue
                cand = _Candidate(d=self.d, u=u, seed=float(amplitude), iterations=iterations, method=method)
                if self.refine_branches:
                    try:
                        cand = self._refine(cand)
                    except NoConvergence as exc:
                        RichLog.debug(f"deflated seed {amplitude:.4g} lost on refinement: {exc}")
                        continue
                merged = self._distinct(found + [cand])
                if len(merged) > len(found):
                    RichLog.debug(f"deflation round {round_ + 1}: new solution gamma={_norm(cand.u):.6g}")
                    found = merged
                    added += 1
            if added == 0:
                break
        return found

    def run(self, seeds: Sequence[float]) -> List[BvpSolution]:
        """Accepted, pairwise distinct solutions sorted by sup-norm."""
        if not seeds:
            raise ValueError("at least one seed amplitude is required")
        self.failures = []
        shape = np.asarray(self.envelope.k1(self.d.nodes), dtype=float) / self.envelope.K1
        candidates: List[_Candidate] = []
        for amplitude in ProgressBarFactory.track(list(seeds), "Solving from seeds", "seeds",
                                                  disable=not self.show_progress):
            try:
                u, iterations, method = self.solve_from(self.d, amplitude * shape)
                cand = _Candidate(d=self.d, u=u, seed=float(amplitude), iterations=iterations, method=method)
                if self.refine_branches:
                    cand = self._refine(cand)
                candidates.append(cand)
                RichLog.debug(f"seed {amplitude:.4g}: gamma={_norm(cand.u):.6g} after {cand.iterations} "
                              f"iterations ({cand.method})")
            except NoConvergence as exc:
                RichLog.warn(f"seed {amplitude:.4g} did not converge: {exc}")
                self.failures.append((float(amplitude), str(exc)))
        distinct = self._deflate(self._distinct(candidates), list(seeds), shape)
        solutions = sorted((describe_solution(c.d, self.f, self.envelope, c.u, c.seed, c.iterations, c.method)
                            for c in distinct), key=lambda s: s.gamma)
        RichLog.info(f"found {len(solutions)} distinct fixed point(s) from {len(seeds)} seed(s)")
        return solutions


def find_fixed_points(d: Discretization, f: Nonlinearity, seeds: Sequence[float], tol: float = constants.SOLVER_TOL,
                      envelope: Optional[Envelope] = None) -> List[BvpSolution]:
    """Distinct fixed points of the discrete operator reached from seeds A k1(t)/K1."""
    if envelope is None:
        envelope = build_envelope(d.kernel.problem)
    return FixedPointSearch(d, f, envelope, tol=tol).run(seeds)


def _gamma(d: Discretization, u: np.ndarray) -> float:
    """Max over nodes, improved by the vertex of the parabola through the peak triple."""
    i = int(np.argmax(u))
    peak = float(u[i])
    if 0 < i < len(u) - 1:
        t3, u3 = d.nodes[i - 1:i + 2], u[i - 1:i + 2]
        c2, c1, c0 = np.polyfit(t3, u3, 2)
        if c2 < 0:
            vertex = -c1 / (2.0 * c2)
            if t3[0] <= vertex <= t3[2]:
                peak = max(peak, float(c0 + c1 * vertex + c2 * vertex ** 2))
    return max(peak, 0.0)


def _ode_residual(d: Discretization, f: Nonlinearity, u: np.ndarray) -> float:
    problem = d.kernel.problem
    second = problem.n == 2
    h = constants.ODE_STEP_SECOND if second else constants.ODE_STEP_FOURTH
    a, b = problem.a, problem.b
    ts = np.linspace(a + 3 * h, b - 3 * h, constants.ODE_SAMPLES)
    if d.anchors:
        ts = ts[np.min(np.abs(ts[:, None] - np.asarray(d.anchors)[None, :]), axis=1) > 2.5 * h]
    if len(ts) == 0:
        return 0.0
    offsets = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * h
    U = evaluate_operator(d, f, u, (ts[:, None] + offsets[None, :]).ravel()).reshape(len(ts), 5)
    load_values = np.asarray(f(ts, U[:, 2]), dtype=float)
    if second:
        u2 = (-U[:, 4] + 16 * U[:, 3] - 30 * U[:, 2] + 16 * U[:, 1] - U[:, 0]) / (12 * h * h)
        u1 = (-U[:, 4] + 8 * U[:, 3] - 8 * U[:, 1] + U[:, 0]) / (12 * h)
        residual = u2 + problem.drift * u1 + load_values
    else:
        u4 = (U[:, 4] - 4 * U[:, 3] + 6 * U[:, 2] - 4 * U[:, 1] + U[:, 0]) / h ** 4
        residual = u4 - load_values
    return _norm(residual) / (1.0 + _norm(load_values))


def _bc_residual(d: Discretization, f: Nonlinearity, u: np.ndarray, gamma: float) -> float:
    problem = d.kernel.problem
    a, b, h = problem.a, problem.b, constants.BC_STEP
    U = evaluate_operator(d, f, u, np.array([a, a + h, a + 2 * h, b - 2 * h, b - h, b]))
    worst = max(abs(U[0]), abs(U[5]))
    if problem.n == 4:
        left = (-3 * U[0] + 4 * U[1] - U[2]) / (2 * h)
        right = (3 * U[5] - 4 * U[4] + U[3]) / (2 * h)
        worst = max(worst, abs(left), abs(right))
    return float(worst) / (1.0 + gamma)


def describe_solution(d: Discretization, f: Nonlinearity, envelope: Envelope, u: np.ndarray,
                      seed: float = 0.0, iterations: int = 0, method: str = "newton") -> BvpSolution:
    """Functionals alpha, theta, gamma and the residual certificates of nodal values u."""
    gamma = _gamma(d, u)
    a1, b1 = envelope.I1
    on_I1 = interpolate_nodal(d, u, np.linspace(a1, b1, 1025))
    cone = float(np.min(u - np.asarray(envelope.k1(d.nodes), dtype=float) / envelope.K2 * gamma))
    return BvpSolution(
        nodes=d.nodes.tolist(),
        values=u.tolist(),
        panel_edges=d.panel_edges.tolist(),
        gamma=gamma,
        alpha=float(np.min(on_I1)),
        theta=float(np.max(on_I1)),
        fixed_point_residual=_norm(u - apply_L(d, f, u)),
        ode_residual=_ode_residual(d, f, u),
        bc_residual=_bc_residual(d, f, u, gamma),
        cone_margin=cone,
        seed_amplitude=seed,
        iterations=iterations,
        method=method,
    )
