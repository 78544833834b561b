"""
Piecewise nonlinearity f(t, u) >= 0 assembled from expression branches.

Branch i covers (upto_{i-1}, upto_i]; the first branch starts at u = 0 (closed) and the last one
has no upper bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from greencone.expression import CompiledExpression, compile_expression, evaluate_number
from greencone.utils import constants
from greencone.utils.errors import NonlinearityError
from greencone.utils.pretty import RichLog


@dataclass(frozen=True)
class Branch:
    expr: CompiledExpression
    upto: Optional[float] = None

    @property
    def text(self) -> str:
        return self.expr.text


@dataclass(frozen=True)
class Segment:
    """Closure [lo, hi] of the part of a branch inside a u-range."""

    branch: int
    lo: float
    hi: float


@dataclass
class Nonlinearity:
    branches: List[Branch]
    a: float = 0.0
    b: float = 1.0
    allow_jumps: bool = False
    jumps: List[Tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        if not self.branches:
            raise NonlinearityError("a nonlinearity needs at least one branch")
        bounds = [br.upto for br in self.branches[:-1]]
        if any(bound is None for bound in bounds):
            raise NonlinearityError("only the last branch may omit its upper bound")
        if self.branches[-1].upto is not None:
            raise NonlinearityError("the last branch must extend to infinity (omit 'upto')")
        if bounds and (bounds[0] <= 0 or any(lo >= hi for lo, hi in zip(bounds, bounds[1:]))):
            raise NonlinearityError(f"branch bounds must be positive and strictly increasing, got {bounds}")
        self.boundaries = np.asarray(bounds, dtype=float)

    @classmethod
    def from_strings(cls, branches: Sequence[Tuple[Optional[Union[str, float]], str]], a: float = 0.0,
                     b: float = 1.0, allow_jumps: bool = False, validate: bool = True) -> "Nonlinearity":
        """Builds f from (upto, expression) pairs, upto None on the last branch."""
        compiled = [Branch(expr=compile_expression(expr), upto=None if upto is None else evaluate_number(upto))
                    for upto, expr in branches]
        f = cls(branches=compiled, a=a, b=b, allow_jumps=allow_jumps)
        if validate:
            f.validate()
        return f

    @classmethod
    def constant(cls, value: Union[str, float], a: float = 0.0, b: float = 1.0) -> "Nonlinearity":
        return cls.from_strings([(None, str(value))], a=a, b=b)

    def branch_index(self, u):
        """Index of the branch whose u-range contains u (upper bounds inclusive)."""
        return np.searchsorted(self.boundaries, np.asarray(u, dtype=float), side="left")

    def evaluate_branch(self, index: int, t, u):
        return self.branches[index].expr(t, u)

    def __call__(self, t, u):
        """f(t, max(u, 0)), broadcasting over arrays."""
        t_arr = np.asarray(t, dtype=float)
        u_arr = np.maximum(np.asarray(u, dtype=float), 0.0)
        t_arr, u_arr = np.broadcast_arrays(t_arr, u_arr)
        if len(self.branches) == 1:
            out = np.asarray(self.evaluate_branch(0, t_arr, u_arr), dtype=float)
        else:
            index = self.branch_index(u_arr)
            out = np.zeros(u_arr.shape)
            for i in np.unique(index):
                mask = index == i
                out[mask] = self.evaluate_branch(int(i), t_arr[mask], u_arr[mask])
        return float(out) if out.ndim == 0 else out

    def segments(self, lo: float, hi: float) -> List[Segment]:
        """Splits [lo, hi] into per-branch closures."""
        out = []
        start = lo
        for i, branch in enumerate(self.branches):
            upper = np.inf if branch.upto is None else branch.upto
            if upper < start:
                continue
            end = min(hi, upper)
            out.append(Segment(branch=i, lo=start, hi=end))
            if end >= hi:
                break
            start = end
        return out

    def validate(self, u_max: Optional[float] = None) -> None:
        """Checks continuity at branch boundaries, finiteness and nonnegativity on a sample grid.

        Raises:
            NonlinearityError: On a negative or non-finite sample, or on a jump when allow_jumps is off.
        """
        ts = np.linspace(self.a, self.b, constants.CONTINUITY_T_SAMPLES)
        self.jumps = []
        for i, beta in enumerate(self.boundaries):
            left = np.asarray(self.evaluate_branch(i, ts, beta), dtype=float)
            right = np.asarray(self.evaluate_branch(i + 1, ts, beta), dtype=float)
            gap = np.abs(left - right)
            scale = np.maximum(1.0, np.maximum(np.abs(left), np.abs(right)))
            worst = float(np.max(gap / scale))
            if worst > constants.CONTINUITY_RTOL:
                jump = float(np.max(gap))
                if not self.allow_jumps:
                    raise NonlinearityError(f"f jumps by {jump:.6g} at u = {beta:.6g} "
                                            f"(branches {i} and {i + 1}); set allow_jumps to accept it")
                RichLog.warn(f"accepting a jump of {jump:.6g} in f at u = {beta:.6g}")
                self.jumps.append((float(beta), jump))

        top = u_max
        if top is None:
            top = max(1.0, 10.0 * float(self.boundaries[-1])) if len(self.boundaries) else 1.0
        us = np.unique(np.concatenate((np.linspace(0.0, top, constants.HYPOTHESIS_GRID_POINTS),
                                       np.geomspace(1e-12, top, 64), self.boundaries)))
        values = self(ts[:, None], us[None, :])
        if not np.all(np.isfinite(values)):
            raise NonlinearityError("f is not finite on the sampled rectangle")
        worst = float(np.min(values))
        if worst < 0.0:
            idx = np.unravel_index(np.argmin(values), values.shape)
            raise NonlinearityError(f"f is negative ({worst:.6g}) at t = {ts[idx[0]]:.6g}, u = {us[idx[1]]:.6g}")

    def describe(self) -> List[Tuple[Optional[float], str]]:
        return [(br.upto, br.text) for br in self.branches]
