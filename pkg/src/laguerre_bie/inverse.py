"""Iterative reconstruction of the cavity boundary from Cauchy data.

Each iteration has two steps:

1. With the current cavity curve fixed, solve the well-posed field + data
   equations (u_n = 0 on the cavity, normal derivative g_n on the exterior
   curve) for the densities of all Laguerre indices.
2. With the densities fixed, linearize the remaining Dirichlet equation on the
   exterior curve with respect to a radial update q, collocate at the nodes,
   stack all indices into one least-squares problem and solve it with
   Tikhonov regularization. The cavity radius is updated as r + q.
"""

from dataclasses import dataclass, field
import logging

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .forward import CauchyData, DensitySequence, SolverError, _solve_sequence
from .fundamental import FundamentalSequence
from .geometry import (
    InvalidUpdateError,
    ParametricCurve,
    RadialCurve,
    TrigPolynomial,
    circle,
    point_in_curve,
    trig_basis,
    update_radial,
)
from .kernels import KernelContext
from .quadrature import QuadratureGrid

logger = logging.getLogger(__name__)

CONVERGED = "converged"
MAX_ITERATIONS = "max_iterations"
FAILED = "failed"


@dataclass(frozen=True)
class InverseConfig:
    trig_degree: int = 13
    reg_lambda: float = 0.01
    reg_decay: float = 0.9
    max_iterations: int = 50
    stop_update_tol: float = 1e-4
    stop_residual_tol: float = 1e-10
    initial_radius: float = 0.8
    min_radius: float = 0.05
    max_halvings: int = 20
    line_search: bool = True
    residual_slack: float = 0.0
    sobolev_penalty: bool = False

    def __post_init__(self):
        if self.trig_degree < 0:
            raise ValueError("trig_degree must be >= 0")
        if not self.reg_lambda > 0:
            raise ValueError("reg_lambda must be positive")
        if not 0 < self.reg_decay <= 1:
            raise ValueError("reg_decay must lie in (0, 1]")
        if not (self.stop_update_tol > 0 and self.stop_residual_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.initial_radius > 0:
            raise ValueError("initial_radius must be positive")


@dataclass
class IterationRecord:
    iteration: int
    coefficients: np.ndarray
    residual: float
    update_norm: float
    reg_lambda: float
    step_factor: float = 1.0
    update: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass
class ReconstructionResult:
    curve: RadialCurve
    history: list = field(default_factory=list)
    status: str = MAX_ITERATIONS
    message: str = ""

    @property
    def iterations(self) -> int:
        return len(self.history)


def _l2_nodes(values, M):
    """Discrete L2 norm on [0, 2pi) over the last axis (flattened over the rest)."""
    return float(np.sqrt(2.0 * np.pi / M * np.sum(np.asarray(values) ** 2)))


def _mixed_operators(ctx: KernelContext) -> np.ndarray:
    """Rows ``[H^{1,.}_k ; Q^{2,.}_k + jump]``, shape (N+1, 2M, 2M).

    The jump ``phi^2_m / |x_2'|`` enters with the same weight for every index
    difference, so it appears in all blocks.
    """
    jump = np.zeros((ctx.M, 2 * ctx.M))
    jump[:, ctx.M :] = np.diag(1.0 / ctx.speed(2))
    Q = ctx.Q_rows() + jump[None]
    return np.concatenate([ctx.H_rows(1), Q], axis=1)


def solve_field_and_data(ctx: KernelContext, cauchy: CauchyData) -> DensitySequence:
    """Step 1: densities with u_n = 0 on the cavity and normal derivative g_n on the exterior curve."""
    if cauchy.n_nodes != ctx.M:
        raise ValueError(f"data on {cauchy.n_nodes} nodes, grid has {ctx.M}")
    n_terms = min(cauchy.n_terms, ctx.N + 1)
    ops = _mixed_operators(ctx)
    rhs = np.concatenate([np.zeros((n_terms, ctx.M)), cauchy.g[:n_terms]], axis=1)
    phi = _solve_sequence(ops[0], ops, rhs)
    return DensitySequence.from_stacked(phi)


def data_residual(ctx: KernelContext, densities: DensitySequence, cauchy: CauchyData) -> np.ndarray:
    """``f_n - (1/2pi) sum_l sum_{m<=n} int phi^l_m H^{2,l}_{n-m}`` at the nodes, shape (N+1, M)."""
    ops = ctx.H_rows(2)
    phi = densities.stacked()
    n_terms = phi.shape[0]
    return np.array(
        [cauchy.f[n] - sum(ops[n - m] @ phi[m] for m in range(n + 1)) for n in range(n_terms)]
    )


def linearized_operator(ctx: KernelContext, densities: DensitySequence, degree: int) -> np.ndarray:
    """Matrix of ``q -> sum_{m<=n} D_{n-m}[phi^1_m; q](s_k)``, shape ((N+1) M, 2J+1)."""
    D = ctx.D_block()
    T = trig_basis(degree, ctx.grid.nodes)
    phi1 = densities.inner
    n_terms = phi1.shape[0]
    blocks = []
    for n in range(n_terms):
        blocks.append(sum(D[n - m] @ (phi1[m][:, None] * T) for m in range(n + 1)))
    return np.concatenate(blocks, axis=0)


def assemble_linearized_system(ctx: KernelContext, densities: DensitySequence,
                               cauchy: CauchyData, degree: int):
    """Step 2 system ``A q = b`` stacked over all Laguerre indices."""
    A = linearized_operator(ctx, densities, degree)
    b = data_residual(ctx, densities, cauchy).ravel()
    return A, b


def tikhonov_solve(A, b, reg_lambda: float, penalty=None) -> np.ndarray:
    """``argmin |A q - b|^2 + lambda q^T W q`` via the regularized normal equations.

    ``penalty`` is the diagonal of W (identity by default).
    """
    if not reg_lambda > 0:
        raise ValueError("regularization parameter must be positive")
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    w = np.ones(A.shape[1]) if penalty is None else np.asarray(penalty, dtype=float)
    G = A.T @ A + reg_lambda * np.diag(w)
    return cho_solve(cho_factor(G), A.T @ b)


def sobolev_weights(degree: int) -> np.ndarray:
    """Diagonal ``1 + j^2`` for the basis cos(js), sin(js)."""
    j = np.concatenate([np.arange(degree + 1), np.arange(1, degree + 1)])
    return 1.0 + j.astype(float) ** 2


def regularized_update(ctx: KernelContext, densities: DensitySequence, cauchy: CauchyData,
                       degree: int, reg_lambda: float, penalty=None):
    """Step 2: Tikhonov solution of the stacked linearized system.

    Rows are scaled by ``1/sqrt((N+1) M)`` so the misfit is a mean over all
    collocation equations and ``reg_lambda`` does not depend on the grid.
    Returns ``(q, residual)`` with ``residual`` the discrete L2 norm of the data misfit.
    """
    A, b = assemble_linearized_system(ctx, densities, cauchy, degree)
    row_scale = 1.0 / np.sqrt(b.size)
    q = TrigPolynomial(tikhonov_solve(row_scale * A, row_scale * b, reg_lambda, penalty))
    return q, _l2_nodes(b, ctx.M)


def reconstruct(config: InverseConfig, cauchy: CauchyData, outer: ParametricCurve,
                fundamental: FundamentalSequence, grid: QuadratureGrid | None = None,
                initial: RadialCurve | None = None, callback=None) -> ReconstructionResult:
    """Run the two-step iteration from a circle of radius ``config.initial_radius``.

    Each update is halved until the new cavity is admissible (positive
    radius, inside the exterior curve) and, with ``line_search``, the data
    residual does not grow. Stops when the accepted update norm falls below
    ``stop_update_tol``, the data residual below ``stop_residual_tol``, or
    after ``max_iterations``.
    """
    grid = grid or QuadratureGrid(cauchy.n_nodes)
    J = config.trig_degree
    curve = initial if initial is not None else circle(config.initial_radius, degree=J)
    if isinstance(curve.radial, TrigPolynomial) and curve.radial.degree < J:
        curve = RadialCurve(radial=curve.radial.padded(J), center=curve.center,
                            orientation=curve.orientation, name=curve.name)
    penalty = sobolev_weights(J) if config.sobolev_penalty else None
    result = ReconstructionResult(curve=curve)
    ctx = KernelContext(fundamental, curve, outer, grid)
    lam = config.reg_lambda
    try:
        dens = solve_field_and_data(ctx, cauchy)
    except SolverError as exc:
        result.status, result.message = FAILED, f"step 1 failed on the initial guess: {exc}"
        return result
    for it in range(1, config.max_iterations + 1):
        q, residual = regularized_update(ctx, dens, cauchy, J, lam, penalty)
        if residual < config.stop_residual_tol:
            result.status = CONVERGED
            result.message = f"residual {residual:.3e} below tolerance"
            return result
        step = _line_search(config, ctx, cauchy, outer, curve, q, residual)
        if step is None:
            factor, update_norm = 0.0, 0.0
        else:
            factor, curve, ctx, dens = step
            update_norm = q.l2_norm() * factor
        rec = IterationRecord(it, curve.radial.coeffs.copy(), residual, update_norm, lam, factor,
                              factor * q.coeffs)
        result.history.append(rec)
        result.curve = curve
        logger.info("iter %d: residual %.3e, |q| %.3e, step %.3g, lambda %.3e",
                    it, residual, update_norm, factor, lam)
        if callback is not None:
            callback(rec, curve)
        if step is None:
            result.status = CONVERGED
            result.message = "no admissible step reducing the residual above the update tolerance"
            return result
        if update_norm < config.stop_update_tol:
            result.status = CONVERGED
            result.message = f"update norm {update_norm:.3e} below tolerance"
            return result
        lam *= config.reg_decay
    result.status = MAX_ITERATIONS
    result.message = f"no convergence after {config.max_iterations} iterations"
    return result


def _line_search(config, ctx, cauchy, outer, curve, q, residual):
    """Scale ``q`` by 1, 1/2, 1/4, ... until the new curve is admissible and
    (with ``config.line_search``) the data residual does not grow.

    Returns ``(factor, curve, ctx, densities)`` or None when no admissible step
    larger than ``stop_update_tol`` exists.
    """
    q_norm = q.l2_norm()
    factor = 1.0
    for _ in range(config.max_halvings + 1):
        if factor * q_norm < config.stop_update_tol:
            return None
        try:
            trial = update_radial(curve, factor * q, ctx.grid.nodes, config.min_radius)
            if not np.all(point_in_curve(outer, trial.point(ctx.grid.nodes))):
                raise InvalidUpdateError("updated cavity leaves the exterior curve")
            trial_ctx = ctx.with_inner(trial)
            trial_dens = solve_field_and_data(trial_ctx, cauchy)
        except (InvalidUpdateError, SolverError) as exc:
            logger.debug("step %.3g rejected: %s", factor, exc)
            factor *= 0.5
            continue
        if not config.line_search:
            return factor, trial, trial_ctx, trial_dens
        trial_res = _l2_nodes(data_residual(trial_ctx, trial_dens, cauchy), ctx.M)
        if trial_res <= residual * (1.0 + config.residual_slack):
            return factor, trial, trial_ctx, trial_dens
        factor *= 0.5
    return None

