import numpy as np
import pytest

from laguerre_bie.forward import CauchyData, example_exterior_data, simulate_cauchy_data
from laguerre_bie.geometry import TrigPolynomial, circle, hausdorff_distance, update_radial
from laguerre_bie.inverse import (
    CONVERGED,
    InverseConfig,
    assemble_linearized_system,
    data_residual,
    linearized_operator,
    reconstruct,
    regularized_update,
    sobolev_weights,
    solve_field_and_data,
    tikhonov_solve,
)
from laguerre_bie.kernels import KernelContext
from laguerre_bie.quadrature import QuadratureGrid

M = 64
J = 13


def simulate(fs, inner, outer, M_inv=M):
    fine = KernelContext(fs, inner, outer, QuadratureGrid(2 * M_inv))
    f2 = np.array([[example_exterior_data(n)] * (2 * M_inv) for n in range(fs.N + 1)])
    return simulate_cauchy_data(fine, np.zeros_like(f2), f2, M_inv)


@pytest.fixture(scope="module")
def rect_data(fs, rect_cavity, unit_circle):
    return simulate(fs, rect_cavity, unit_circle)


@pytest.fixture(scope="module")
def circle_setup(fs, unit_circle):
    truth = circle(0.5, degree=J)
    return truth, simulate(fs, truth, unit_circle)


def test_config_validation():
    for kwargs in (dict(trig_degree=-1), dict(reg_lambda=0), dict(reg_decay=0), dict(reg_decay=1.5),
                   dict(stop_update_tol=0), dict(max_iterations=0), dict(initial_radius=-1)):
        with pytest.raises(ValueError):
            InverseConfig(**kwargs)


def test_tikhonov_small_cases():
    A = np.eye(3)
    b = np.array([1.0, -2.0, 4.0])
    assert np.allclose(tikhonov_solve(A, b, 1.0), b / 2)
    assert np.all(tikhonov_solve(A, np.zeros(3), 0.5) == 0)
    with pytest.raises(ValueError):
        tikhonov_solve(A, b, 0.0)


def test_tikhonov_bounds_and_monotonicity():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((40, 9))
    b = rng.standard_normal(40)
    norms = []
    for lam in (1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e3):
        q = tikhonov_solve(A, b, lam)
        norms.append(np.linalg.norm(q))
        assert np.linalg.norm(q) <= np.linalg.norm(A.T @ b) / lam + 1e-12
        q2 = tikhonov_solve(A, b, 2 * lam)
        assert np.linalg.norm(q2) <= np.linalg.norm(q)
    assert all(a >= b for a, b in zip(norms, norms[1:]))
    # matches the least-squares form
    lam = 0.3
    ref = np.linalg.lstsq(np.vstack([A, np.sqrt(lam) * np.eye(9)]), np.concatenate([b, np.zeros(9)]), rcond=None)[0]
    assert np.allclose(tikhonov_solve(A, b, lam), ref, atol=1e-12)


def test_sobolev_weights():
    assert sobolev_weights(2).tolist() == [1.0, 2.0, 5.0, 2.0, 5.0]


def test_step1_consistency_at_truth(fs, unit_circle, circle_setup):
    truth, data = circle_setup
    ctx = KernelContext(fs, truth, unit_circle, QuadratureGrid(M))
    b = data_residual(ctx, solve_field_and_data(ctx, data), data)
    assert np.max(np.abs(b)) <= 1e-6


def test_step1_rectangle_residual_at_discretization_level(fs, rect_cavity, unit_circle, rect_data):
    ctx = KernelContext(fs, rect_cavity, unit_circle, QuadratureGrid(M))
    b = data_residual(ctx, solve_field_and_data(ctx, rect_data), rect_data)
    assert np.max(np.abs(b)) <= 1e-5


def test_step1_zero_data(fs, rect_cavity, unit_circle):
    ctx = KernelContext(fs, rect_cavity, unit_circle, QuadratureGrid(M))
    z = np.zeros((11, M))
    dens = solve_field_and_data(ctx, CauchyData(z, z, ctx.grid.nodes))
    assert np.all(dens.stacked() == 0)


def test_step1_grid_mismatch(fs, rect_cavity, unit_circle, rect_data):
    ctx = KernelContext(fs, rect_cavity, unit_circle, QuadratureGrid(32))
    with pytest.raises(ValueError):
        solve_field_and_data(ctx, rect_data)


def test_linearized_operator_is_linear_in_densities(fs, unit_circle, rect_data):
    ctx = KernelContext(fs, circle(0.8, degree=J), unit_circle, QuadratureGrid(M))
    dens = solve_field_and_data(ctx, rect_data)
    A = linearized_operator(ctx, dens, J)
    assert A.shape == (11 * M, 2 * J + 1)
    dens.inner *= 2
    assert np.allclose(linearized_operator(ctx, dens, J), 2 * A, rtol=1e-14, atol=0)


def test_linearized_columns_match_fd(fs, unit_circle, rect_data):
    cur = circle(0.8, degree=J)
    ctx = KernelContext(fs, cur, unit_circle, QuadratureGrid(M))
    dens = solve_field_and_data(ctx, rect_data)
    A, b = assemble_linearized_system(ctx, dens, rect_data, J)
    eps = 1e-5
    rng = np.random.default_rng(4)
    for j in rng.choice(2 * J + 1, 8, replace=False):
        e = np.zeros(2 * J + 1)
        e[j] = eps
        plus = data_residual(ctx.with_inner(update_radial(cur, TrigPolynomial(e))), dens, rect_data).ravel()
        minus = data_residual(ctx.with_inner(update_radial(cur, TrigPolynomial(-e))), dens, rect_data).ravel()
        fd = -(plus - minus) / (2 * eps)
        assert np.max(np.abs(fd - A[:, j])) <= 1e-4
        # shrinking and growing predict opposite data changes
        assert np.allclose(-(plus - b), (minus - b), rtol=1e-3, atol=1e-9)


def test_fixed_point(fs, unit_circle, circle_setup):
    truth, data = circle_setup
    ctx = KernelContext(fs, truth, unit_circle, QuadratureGrid(M))
    dens = solve_field_and_data(ctx, data)
    q, residual = regularized_update(ctx, dens, data, J, 0.01)
    assert q.l2_norm() <= 1e-5
    assert q.l2_norm() <= 10 * max(residual, 1e-16)
    cfg = InverseConfig(trig_degree=J, initial_radius=0.5)
    result = reconstruct(cfg, data, unit_circle, fs, QuadratureGrid(M), initial=truth)
    assert result.status == CONVERGED
    assert result.iterations <= 1


def test_circle_recovered_from_other_radius(fs, unit_circle, circle_setup):
    truth, data = circle_setup
    cfg = InverseConfig(trig_degree=4, initial_radius=0.7, reg_lambda=0.01)
    result = reconstruct(cfg, data, unit_circle, fs, QuadratureGrid(M))
    assert result.status == CONVERGED
    assert hausdorff_distance(result.curve, truth) <= 0.01


def test_history_records(example1_exact):
    _, _, _, result = example1_exact
    hist = result.history
    assert [r.iteration for r in hist] == list(range(1, len(hist) + 1))
    assert all(r.residual >= 0 and r.update_norm >= 0 for r in hist)
    lams = [r.reg_lambda for r in hist]
    assert lams[0] == 0.01
    assert np.allclose(np.array(lams[1:]) / np.array(lams[:-1]), 0.9)
    for r in hist:
        assert r.update_norm == pytest.approx(TrigPolynomial(r.update).l2_norm(), rel=1e-12, abs=1e-300)


def test_residual_monotone_first_iterations(example1_exact):
    res = [r.residual for r in example1_exact[3].history[:6]]
    assert all(b <= 1.05 * a for a, b in zip(res, res[1:]))


def test_radius_stays_positive(example1_noisy, example2_noisy):
    s = np.linspace(0, 2 * np.pi, 1024, endpoint=False)
    for run in (example1_noisy, example2_noisy):
        for rec in run[3].history:
            assert np.min(TrigPolynomial(rec.coefficients)(s)) > 0.05


def test_max_iterations_status(fs, unit_circle, rect_data):
    cfg = InverseConfig(trig_degree=J, max_iterations=2)
    result = reconstruct(cfg, rect_data, unit_circle, fs, QuadratureGrid(M))
    assert result.status == "max_iterations" and result.iterations == 2


def test_callback_called(fs, unit_circle, rect_data):
    seen = []
    cfg = InverseConfig(trig_degree=J, max_iterations=3)
    reconstruct(cfg, rect_data, unit_circle, fs, QuadratureGrid(M), callback=lambda rec, c: seen.append(rec.iteration))
    assert seen == [1, 2, 3]


def test_line_search_disabled_runs(fs, unit_circle, rect_data):
    cfg = InverseConfig(trig_degree=J, max_iterations=5, line_search=False)
    result = reconstruct(cfg, rect_data, unit_circle, fs, QuadratureGrid(M))
    assert result.iterations == 5
    assert all(r.step_factor == 1.0 for r in result.history)


def test_sobolev_penalty_runs(fs, unit_circle, rect_data):
    cfg = InverseConfig(trig_degree=J, max_iterations=3, sobolev_penalty=True)
    result = reconstruct(cfg, rect_data, unit_circle, fs, QuadratureGrid(M))
    assert result.iterations == 3
    assert result.history[-1].residual < result.history[0].residual
