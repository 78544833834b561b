"""
Nystrom discretization of L u(t) = int_a^b G(t, s) f(s, u(s)) ds on composite Gauss-Legendre panels.

Two schemes share the nodes:

* ``product``: W_ij = int G(t_i, s) l_j(s) ds, with l_j the Lagrange basis of node j on its panel.
  The kernel is integrated piece by piece on each side of the diagonal, so polynomial kernels
  are handled exactly.
* ``nystrom``: W_ij = w_j G(t_i, s_j), which preserves the cone exactly at the nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from greencone.hypotheses.nonlinearity import Nonlinearity
from greencone.kernels import GreenKernel
from greencone.model.models import BvpSolution
from greencone.utils import constants

SCHEMES = ("product", "nystrom")


@dataclass(frozen=True)
class Discretization:
    kernel: GreenKernel
    nodes: np.ndarray
    weights: np.ndarray
    # kernel values G_ij = sigma*g(t_i, s_j)
    matrix: np.ndarray
    # discrete operator, (L u)_i = sum_j operator_ij f(s_j, u_j)
    operator: np.ndarray
    panel_edges: np.ndarray
    panel_order: int
    scheme: str = "product"
    # requested breakpoints the panels were built around
    anchors: Tuple[float, ...] = ()

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(float(e) for e in self.panel_edges[1:-1])

    def panel_nodes(self, panel: int) -> np.ndarray:
        m = self.panel_order
        return self.nodes[panel * m:(panel + 1) * m]


def _panel_edges(a: float, b: float, breakpoints: Iterable[float], panels: int) -> np.ndarray:
    """Splits [a, b] at the breakpoints and spreads the panels over the pieces by length."""
    cuts = sorted({float(x) for x in breakpoints if a < x < b})
    fences = np.array([a, *cuts, b])
    lengths = np.diff(fences)
    keep = lengths > 1e-12 * (b - a)
    fences = np.concatenate(([a], fences[1:][keep]))
    fences[-1] = b
    lengths = np.diff(fences)
    counts = np.maximum(1, np.round(panels * lengths / (b - a)).astype(int))
    edges = [a]
    for lo, hi, count in zip(fences[:-1], fences[1:], counts):
        edges.extend(np.linspace(lo, hi, count + 1)[1:])
    return np.asarray(edges)


def _gauss_nodes(edges: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2.0
    nodes = (lo + hi) / 2.0 + half * x[None, :]
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


def _lagrange(x: np.ndarray, panel_nodes: np.ndarray) -> np.ndarray:
    """Lagrange basis of panel_nodes evaluated at x; output has a trailing axis of len(panel_nodes)."""
    diff = x[..., None] - panel_nodes
    m = len(panel_nodes)
    out = np.empty(x.shape + (m,))
    for j in range(m):
        others = np.delete(np.arange(m), j)
        denom = np.prod(panel_nodes[j] - panel_nodes[others])
        out[..., j] = np.prod(diff[..., others], axis=-1) / denom
    return out


def _product_rows(kernel: GreenKernel, edges: np.ndarray, nodes: np.ndarray, order: int,
                  targets: np.ndarray, piece_order: int = constants.SOLVER_PIECE_ORDER) -> np.ndarray:
    """Rows int G(t, s) l_j(s) ds for every target t, one column per node."""
    x, w = leggauss(piece_order)
    targets = np.asarray(targets, dtype=float)
    rows = np.zeros((len(targets), len(nodes)))
    for p in range(len(edges) - 1):
        lo, hi = edges[p], edges[p + 1]
        inside = (targets > lo) & (targets < hi)
        cut = np.where(inside, targets, (lo + hi) / 2.0)
        # two pieces per target: [lo, cut] and [cut, hi]
        left_half = (cut - lo) / 2.0
        right_half = (hi - cut) / 2.0
        points = np.concatenate(((lo + cut)[:, None] / 2.0 + left_half[:, None] * x,
                                 (cut + hi)[:, None] / 2.0 + right_half[:, None] * x), axis=1)
        qweights = np.concatenate((left_half[:, None] * w, right_half[:, None] * w), axis=1)
        g = kernel.value(targets[:, None], points)
        basis = _lagrange(points, nodes[p * order:(p + 1) * order])
        rows[:, p * order:(p + 1) * order] = np.einsum("ik,ik,ikj->ij", qweights, g, basis)
    return rows


def discretize(kernel: GreenKernel, N: int = constants.SOLVER_NODES, breakpoints: Iterable[float] = (),
               scheme: str = "product", panel_order: int = constants.SOLVER_PANEL_ORDER) -> Discretization:
    """Assembles nodes, weights, kernel matrix and the discrete operator.

    Args:
        kernel: Catalogued kernel.
        N: Requested node count, raised to at least 32 and rounded up to whole panels.
        breakpoints: Panel edges to honour, typically I1 endpoints, envelope kinks and branch crossings.
        scheme: "product" (default) or "nystrom".
        panel_order: Gauss-Legendre points per panel.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme '{scheme}', expected one of {SCHEMES}")
    breakpoints = tuple(breakpoints)
    N = max(int(N), constants.SOLVER_MIN_NODES)
    panels = math.ceil(N / panel_order)
    edges = _panel_edges(kernel.a, kernel.b, breakpoints, panels)
    nodes, weights = _gauss_nodes(edges, panel_order)
    matrix = kernel.value(nodes[:, None], nodes[None, :])
    if scheme == "nystrom":
        operator = matrix * weights[None, :]
    else:
        operator = _product_rows(kernel, edges, nodes, panel_order, nodes)
    return Discretization(kernel=kernel, nodes=nodes, weights=weights, matrix=matrix, operator=operator,
                          panel_edges=edges, panel_order=panel_order, scheme=scheme,
                          anchors=tuple(sorted({float(x) for x in breakpoints if kernel.a < x < kernel.b})))


def load(d: Discretization, f: Nonlinearity, u: np.ndarray) -> np.ndarray:
    """f(s_j, max(u_j, 0))."""
    return np.asarray(f(d.nodes, np.maximum(u, 0.0)), dtype=float)


def apply_L(d: Discretization, f: Nonlinearity, u: np.ndarray) -> np.ndarray:
    """Discrete operator applied to nodal values u."""
    return d.operator @ load(d, f, np.asarray(u, dtype=float))


def interpolate_nodal(d: Discretization, values: np.ndarray, t) -> np.ndarray:
    """Panel-wise Lagrange interpolant of nodal values at arbitrary t in [a, b]."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    panel = np.clip(np.searchsorted(d.panel_edges, t_arr, side="right") - 1, 0, len(d.panel_edges) - 2)
    out = np.empty_like(t_arr)
    m = d.panel_order
    for p in np.unique(panel):
        mask = panel == p
        basis = _lagrange(t_arr[mask], d.panel_nodes(int(p)))
        out[mask] = basis @ values[p * m:(p + 1) * m]
    return out if np.ndim(t) else float(out[0])


def evaluate_operator(d: Discretization, f: Nonlinearity, u: np.ndarray, t) -> np.ndarray:
    """(L u)(t) at arbitrary t using the scheme's own quadrature."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    loads = load(d, f, np.asarray(u, dtype=float))
    if d.scheme == "nystrom":
        rows = d.kernel.value(t_arr[:, None], d.nodes[None, :]) * d.weights[None, :]
    else:
        rows = _product_rows(d.kernel, d.panel_edges, d.nodes, d.panel_order, t_arr)
    out = rows @ loads
    return out if np.ndim(t) else float(out[0])


def evaluate_solution(solution: BvpSolution, t) -> np.ndarray:
    """Panel-wise Lagrange interpolant of an accepted solution, usable across meshes."""
    nodes = np.asarray(solution.nodes, dtype=float)
    values = np.asarray(solution.values, dtype=float)
    edges = np.asarray(solution.panel_edges, dtype=float)
    m = len(nodes) // (len(edges) - 1)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    panel = np.clip(np.searchsorted(edges, t_arr, side="right") - 1, 0, len(edges) - 2)
    out = np.empty_like(t_arr)
    for p in np.unique(panel):
        mask = panel == p
        out[mask] = _lagrange(t_arr[mask], nodes[p * m:(p + 1) * m]) @ values[p * m:(p + 1) * m]
    return out if np.ndim(t) else float(out[0])
