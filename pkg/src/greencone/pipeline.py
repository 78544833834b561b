"""
The envelope -> constants -> hypotheses -> solve -> certify chain behind every CLI command.
"""
from __future__ import annotations

import time
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional

import numpy as np
import pandas as pd

from greencone.config.config import Config
from greencone.config.problem_config import ProblemConfig
from greencone.envelope import Envelope, build_envelope, normalized
from greencone.hypotheses import (
    RectangleSampler,
    check_corollary24,
    check_thm2,
    check_thm3,
    check_thm4,
    check_thm5,
    check_thm6,
    limit_ratios,
)
from greencone.hypotheses.nonlinearity import Nonlinearity
from greencone.model.models import (
    ConeConstants,
    HypothesisReport,
    LimitRatios,
    MultiplicityCertificate,
    RunReport,
    TheoremId,
    Verdict,
)
from greencone.quadrature import cone_constants
from greencone.solver import FixedPointSearch, band_amplitudes, certify, discretize, seed_amplitudes
from greencone.spectrum import admissible_M
from greencone.utils import constants
from greencone.utils.errors import (
    GreenConeError,
    NoConvergence,
    QuadratureFailure,
    RootNotFound,
    SlotUnfilled,
)
from greencone.utils.pretty import RichLog

EXIT_PASS = 0
EXIT_HYPOTHESIS = 1
EXIT_SOLVER = 2
EXIT_CONFIG = 3


def hypotheses_pass(theorem: TheoremId, reports: List[HypothesisReport]) -> bool:
    """The corollary needs one of (H3), (H4); every other theorem needs all of its conditions."""
    if not reports:
        return False
    if theorem is TheoremId.COR24:
        return any(r.passed for r in reports)
    return all(r.passed for r in reports)


class ProblemRun:
    """One problem taken through the pipeline; every stage is computed once and cached.

    Args:
        config: Validated problem file.
        quadrature_tol: Overrides the settings' quadrature tolerance.
        solver_tol: Overrides the problem's solver tolerance.
        nodes: Overrides the problem's node count.
        show_progress: Show a progress bar over the solver seeds.
    """

    def __init__(self, config: ProblemConfig, quadrature_tol: Optional[float] = None,
                 solver_tol: Optional[float] = None, nodes: Optional[int] = None, show_progress: bool = False):
        settings = Config()
        self.config = config
        self.problem = config.problem_id()
        self.theorem = config.theorem
        self.thresholds = config.threshold_values()
        self.quadrature_tol = quadrature_tol or settings.get("quadrature", "tol")
        self.solver_tol = solver_tol or config.solver.tol
        self.nodes = nodes or config.solver.nodes
        self.show_progress = show_progress
        self.timing: Dict[str, float] = {}
        self._settings = settings
        self._f: Optional[Nonlinearity] = None
        self._envelope: Optional[Envelope] = None
        self._constants: Optional[ConeConstants] = None
        self._limits: Optional[LimitRatios] = None
        self.hypotheses: List[HypothesisReport] = []
        self.certificate: Optional[MultiplicityCertificate] = None
        self.seed_failures = 0

    @contextmanager
    def _timed(self, stage: str) -> Iterator[None]:
        start = time.perf_counter()
        yield
        self.timing[stage] = self.timing.get(stage, 0.0) + time.perf_counter() - start

    @property
    def f(self) -> Nonlinearity:
        if self._f is None:
            self._f = self.config.build_nonlinearity()
        return self._f

    @property
    def envelope(self) -> Envelope:
        if self._envelope is None:
            with self._timed("envelope"):
                self._envelope = build_envelope(self.problem, interval=self.config.I1(),
                                                s_points=self._settings.get("envelope", "s_points"),
                                                t_points=self._settings.get("envelope", "t_points"))
        return self._envelope

    @property
    def constants(self) -> ConeConstants:
        if self._constants is None:
            env = self.envelope
            with self._timed("constants"):
                self._constants = cone_constants(env, tol=self.quadrature_tol,
                                                 conservative=self.config.check.conservative)
            c = self._constants
            RichLog.info(f"{self.config.name}: cH1={c.c_h1:.8g}, cH2={c.c_h2:.8g}, cThm5i={c.c_thm5i:.8g}, "
                         f"K2/m1={c.ratio:.6g}")
        return self._constants

    @property
    def limits(self) -> LimitRatios:
        if self._limits is None:
            self._limits = limit_ratios(self.f, probes=self._settings.get("hypotheses", "limit_probes"))
        return self._limits

    def check(self) -> List[HypothesisReport]:
        """Runs the hypothesis checks of the configured theorem."""
        f, c, env, th = self.f, self.constants, self.envelope, self.thresholds
        with self._timed("hypotheses"):
            sampler = RectangleSampler(f, grid_points=self._settings.get("hypotheses", "grid_points"),
                                       sweeps=self._settings.get("hypotheses", "sweeps"))
            if self.theorem is TheoremId.THM2:
                reports = check_thm2(f, c, env, th["p"], th["q"], sampler=sampler)
            elif self.theorem is TheoremId.THM3:
                reports = check_thm3(f, c, th["p"], limits=self.limits, sampler=sampler)
            elif self.theorem is TheoremId.THM4:
                reports = check_thm4(f, c, env, th["q"], limits=self.limits, sampler=sampler)
            elif self.theorem is TheoremId.THM5:
                reports = check_thm5(f, c, env, th["p"], th["q"], th["r"],
                                     strict_iii=self.config.check.strict_iii, sampler=sampler)
            elif self.theorem is TheoremId.THM6:
                reports = check_thm6(f, c, env, th["p"], th["q"], th["r"], sampler=sampler)
            else:
                reports = check_corollary24(self.limits, c, env)
        self.hypotheses = reports
        return reports

    def seeds(self) -> List[float]:
        """Global geometric seeds plus a dense set inside every band between consecutive thresholds.

        The top band ends at the largest sup-norm an alpha-threshold allows, max * K2 / m1.
        """
        values = list(self.thresholds.values())
        if not values:
            return seed_amplitudes(1e-3, 1e3, self.config.solver.seeds)
        env = self.envelope
        seeds = seed_amplitudes(min(values) / 10.0, 10.0 * max(values), self.config.solver.seeds)
        seeds += band_amplitudes([*values, max(values) * env.K2 / env.m1])
        return sorted(set(seeds))

    def solve(self) -> MultiplicityCertificate:
        """Finds the fixed points and certifies them against the theorem's slots."""
        env = self.envelope
        breakpoints = (*env.I1, *env.kinks)
        with self._timed("solve"):
            d = discretize(env.kernel, N=self.nodes, breakpoints=breakpoints, scheme=self.config.solver.scheme,
                           panel_order=self._settings.get("solver", "panel_order"))
            search = FixedPointSearch(d, self.f, env, tol=self.solver_tol,
                                      refine_branches=self.config.solver.refine_branches,
                                      show_progress=self.show_progress,
                                      deflation_seeds=constants.DEFLATION_SEEDS if self.config.solver.deflation else 0)
            solutions = search.run(self.seeds())
            self.seed_failures = len(search.failures)
        with self._timed("certify"):
            self.certificate = certify(solutions, self.thresholds, self.theorem)
        return self.certificate

    def exit_code(self) -> int:
        if self.certificate is not None and self.certificate.verdict is Verdict.FAIL:
            return EXIT_SOLVER
        if self.hypotheses and not hypotheses_pass(self.theorem, self.hypotheses):
            return EXIT_HYPOTHESIS
        return EXIT_PASS

    def report(self) -> RunReport:
        return RunReport(
            config=self.config.to_dict(),
            constants=self._constants,
            admissible_M=admissible_M(self.problem),
            hypotheses=self.hypotheses,
            limits=self._limits,
            certificate=self.certificate,
            seed_failures=self.seed_failures,
            timing=dict(self.timing),
            tool_version=constants.TOOL_VERSION,
            exit_code=self.exit_code(),
        )

    def envelope_table(self, grid: int = 101, t0: Optional[float] = None,
                       s0: Optional[float] = None) -> pd.DataFrame:
        """Samples u~(t, s), k1(t) and k2(t).

        Without a section the table covers the grid x grid product of interior t and s in [a, b]; t0 fixes t
        and s0 fixes s.
        """
        env = self.envelope
        a, b = self.problem.a, self.problem.b
        t_grid = np.linspace(a, b, grid + 2)[1:-1]
        s_grid = np.linspace(a, b, grid)
        if t0 is not None:
            t, s = np.full_like(s_grid, float(t0)), s_grid
        elif s0 is not None:
            t, s = t_grid, np.full_like(t_grid, float(s0))
        else:
            tt, ss = np.meshgrid(t_grid, s_grid, indexing="ij")
            t, s = tt.ravel(), ss.ravel()
        return pd.DataFrame({
            "t": t,
            "s": s,
            "u_tilde": np.asarray(normalized(env.kernel, t, s), dtype=float),
            "k1": np.asarray(env.k1(t), dtype=float),
            "k2": np.asarray(env.k2(t), dtype=float),
        })


def exit_code_for(exc: GreenConeError) -> int:
    """Exit code of a library failure: input problems are config errors, numerical ones solver errors."""
    if isinstance(exc, (NoConvergence, SlotUnfilled, QuadratureFailure, RootNotFound)):
        return EXIT_SOLVER
    return EXIT_CONFIG


def run_problem(data: dict, command: str, settings: Optional[str] = None) -> RunReport:
    """Runs one problem from its dict form; the unit of work of corpus fan-out."""
    if settings is not None:
        Config(settings)
    run = ProblemRun(ProblemConfig.from_dict(data))
    run.check()
    if command == "solve":
        run.solve()
    return run.report()
