import numpy as np
import pytest

from greencone.corpus import get_entry, names
from greencone.envelope import envelope_closed_form
from greencone.hypotheses import Nonlinearity
from greencone.kernels import kernel_for
from greencone.model.models import ProblemId, TheoremId, Verdict
from greencone.pipeline import ProblemRun
from greencone.utils.errors import NoConvergence
from greencone.solver import (
    FixedPointSearch,
    apply_L,
    band_amplitudes,
    discretize,
    evaluate_operator,
    evaluate_solution,
    find_fixed_points,
    interpolate_nodal,
    seed_amplitudes,
)

B0 = ProblemId(n=2, k=1, B=0.0)
FOURTH = ProblemId(n=4, k=2)


def _spectral_radius(d, slope):
    return float(np.max(np.abs(np.linalg.eigvals(slope * d.operator))))


@pytest.fixture(scope="module")
def b0_grid():
    return discretize(kernel_for(B0), N=64)


@pytest.fixture(scope="module")
def unit_load():
    return Nonlinearity.constant(1)


def test_weights_sum_to_the_interval_length(b0_grid):
    assert b0_grid.weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert b0_grid.size == 64
    assert np.all(np.diff(b0_grid.nodes) > 0.0)


def test_node_count_is_raised_and_rounded_to_panels():
    d = discretize(kernel_for(B0), N=10, panel_order=8)
    assert d.size == 32
    assert d.size % d.panel_order == 0


def test_breakpoints_become_panel_edges():
    d = discretize(kernel_for(B0), N=64, breakpoints=(0.25, 0.75, 2.0))
    assert 0.25 in d.breakpoints and 0.75 in d.breakpoints
    assert d.anchors == (0.25, 0.75)


def test_unknown_scheme():
    with pytest.raises(ValueError):
        discretize(kernel_for(B0), scheme="trapezoid")


def test_constant_load_second_order(b0_grid, unit_load):
    t = b0_grid.nodes
    np.testing.assert_allclose(apply_L(b0_grid, unit_load, np.zeros_like(t)), t * (1.0 - t) / 2.0, atol=1e-10)


def test_constant_load_is_mesh_independent(b0_grid, unit_load):
    fine = discretize(kernel_for(B0), N=128)
    t = np.linspace(0.0, 1.0, 33)
    coarse_values = evaluate_operator(b0_grid, unit_load, np.zeros(b0_grid.size), t)
    fine_values = evaluate_operator(fine, unit_load, np.zeros(fine.size), t)
    np.testing.assert_allclose(coarse_values, fine_values, atol=1e-10)


def test_beam_deflection(unit_load):
    d = discretize(kernel_for(FOURTH), N=64)
    t = d.nodes
    np.testing.assert_allclose(apply_L(d, unit_load, np.zeros_like(t)), t ** 2 * (1.0 - t) ** 2 / 24.0, atol=1e-12)


def test_zero_load(b0_grid):
    out = apply_L(b0_grid, Nonlinearity.constant(0), np.linspace(0.0, 3.0, b0_grid.size))
    np.testing.assert_array_equal(out, np.zeros(b0_grid.size))


@pytest.mark.parametrize("scheme", ["product", "nystrom"])
@pytest.mark.parametrize("B", [0.0, 2.0, -2.0])
def test_operator_preserves_the_cone(scheme, B):
    env = envelope_closed_form(ProblemId(n=2, k=1, B=B))
    d = discretize(env.kernel, N=64, scheme=scheme)
    f = Nonlinearity.from_strings([(None, "u + t")])
    rng = np.random.default_rng(7)
    t = d.nodes
    lower = np.asarray(env.k1(t)) / env.K2
    worst = np.inf
    for _ in range(20):
        c = rng.uniform(0.0, 5.0, 4)
        u = c[0] + c[1] * t + c[2] * np.sin(np.pi * t) + c[3] * t ** 2 * (1.0 - t)
        Lu = apply_L(d, f, u)
        worst = min(worst, float(np.min(Lu - lower * np.max(Lu))) / max(1.0, float(np.max(Lu))))
    assert worst >= -1e-8


def test_interpolation_reproduces_polynomials(b0_grid):
    values = b0_grid.nodes ** 3
    t = np.linspace(0.0, 1.0, 57)
    np.testing.assert_allclose(interpolate_nodal(b0_grid, values, t), t ** 3, atol=1e-12)
    assert isinstance(interpolate_nodal(b0_grid, values, 0.5), float)


def test_seed_amplitudes():
    seeds = seed_amplitudes(0.1, 1000.0, 5)
    assert seeds == pytest.approx([0.1, 1.0, 10.0, 100.0, 1000.0])


def test_band_amplitudes_cover_every_band():
    seeds = band_amplitudes([100.0, 1.0, 10.0, -3.0, 10.0], per_band=3)
    assert seeds == pytest.approx([1.0, 10.0 ** 0.5, 10.0, 1000.0 ** 0.5, 100.0])
    assert band_amplitudes([5.0]) == []


def test_zero_load_has_only_the_trivial_fixed_point(b0_grid):
    solutions = find_fixed_points(b0_grid, Nonlinearity.constant(0), seeds=[0.5, 5.0, 50.0])
    assert len(solutions) == 1
    assert solutions[0].is_trivial
    assert solutions[0].fixed_point_residual == 0.0


def test_contraction_regime_finds_only_zero(b0_grid):
    f = Nonlinearity.from_strings([(None, "5*u")])
    assert _spectral_radius(b0_grid, 5.0) < 1.0
    solutions = find_fixed_points(b0_grid, f, seeds=seed_amplitudes(0.01, 100.0, 6))
    assert len(solutions) == 1
    assert solutions[0].gamma < 1e-8


def test_solver_tolerance_range(b0_grid):
    env = envelope_closed_form(B0)
    with pytest.raises(ValueError):
        FixedPointSearch(b0_grid, Nonlinearity.constant(0), env, tol=1e-3)
    with pytest.raises(ValueError):
        FixedPointSearch(b0_grid, Nonlinearity.constant(0), env).run([])


def test_constant_load_fixed_point_is_the_load_response(b0_grid):
    env = envelope_closed_form(B0)
    solutions = FixedPointSearch(b0_grid, Nonlinearity.constant(8), env).run([0.1, 1.0])
    assert len(solutions) == 1
    solution = solutions[0]
    assert solution.gamma == pytest.approx(1.0, rel=1e-8)
    assert solution.theta == pytest.approx(1.0, rel=1e-6)
    assert solution.alpha == pytest.approx(8 * 0.25 * 0.75 / 2, rel=1e-6)
    assert solution.bc_residual <= 1e-9
    assert solution.ode_residual <= 1e-3
    assert solution.cone_margin >= -1e-8


def test_three_solutions_for_the_saturating_example(time_tracker):
    run = ProblemRun(get_entry("F2-b0"), show_progress=False)
    certificate = run.solve()
    assert certificate.verdict is Verdict.PASS
    assert len(certificate.solutions) >= 3
    by_slot = {slot.slot: certificate.solutions[slot.solution_index] for slot in certificate.slots}
    assert by_slot["u1"].theta < 0.5
    assert by_slot["u2"].alpha > 4.0
    assert 0.5 < by_slot["u3"].theta and by_slot["u3"].alpha < 4.0
    for solution in certificate.solutions:
        assert solution.bc_residual <= 1e-9
        assert solution.cone_margin >= -1e-8
        assert min(solution.values) >= 0.0


def test_three_solutions_for_the_beam(time_tracker):
    certificate = ProblemRun(get_entry("fourth-thm6")).solve()
    assert certificate.verdict is Verdict.PASS
    assert [slot.slot for slot in certificate.slots] == ["u1", "u2", "u3"]


def test_deflating_the_only_solution_leaves_nothing_to_find(b0_grid):
    env = envelope_closed_form(B0)
    f = Nonlinearity.constant(8)
    search = FixedPointSearch(b0_grid, f, env)
    u, _, method = search.solve_from(b0_grid, np.full(b0_grid.size, 0.3))
    assert method == "newton"
    with pytest.raises(NoConvergence):
        search.solve_from(b0_grid, np.full(b0_grid.size, 0.3), deflate=[u])


def test_deflation_keeps_the_plain_solutions():
    plain = ProblemRun(get_entry("F2-b0"))
    plain.config.solver.deflation = False
    deflated = ProblemRun(get_entry("F2-b0"))
    found = [s.gamma for s in plain.solve().solutions]
    assert len(deflated.solve().solutions) >= len(found)
    for gamma in found:
        assert min(abs(s.gamma - gamma) for s in deflated.certificate.solutions) <= 1e-4 * (1.0 + gamma)


@pytest.mark.parametrize("name", names())
def test_corpus_entry_is_certified(name, time_tracker):
    run = ProblemRun(get_entry(name))
    certificate = run.solve()
    assert certificate.verdict is Verdict.PASS, certificate.missing_slot
    assert len(certificate.solutions) >= (3 if run.theorem is TheoremId.THM6 else 2)
    for solution in certificate.solutions:
        # absolute, however large gamma is
        assert solution.fixed_point_residual <= 1e-9
        assert solution.ode_residual <= 1e-3
        assert solution.cone_margin >= -1e-8
        assert solution.bc_residual <= 1e-6


def test_halving_the_mesh_barely_moves_the_solutions(time_tracker):
    coarse = ProblemRun(get_entry("F1-b0"), nodes=256).solve()
    fine = ProblemRun(get_entry("F1-b0"), nodes=512).solve()
    t = np.linspace(0.0, 1.0, 201)
    fine_slots = {slot.slot: slot.solution_index for slot in fine.slots}
    for slot in coarse.slots:
        a = coarse.solutions[slot.solution_index]
        b = fine.solutions[fine_slots[slot.slot]]
        change = float(np.max(np.abs(evaluate_solution(a, t) - evaluate_solution(b, t))))
        assert change <= 1e-6 * (1.0 + a.gamma)
        assert abs(a.gamma - b.gamma) <= 1e-6 * (1.0 + a.gamma)
