"""Direct problem: Dirichlet data on both curves to Cauchy data on the exterior curve.

The Laguerre coefficients are represented as single-layer potentials

    u_n(x) = (1/2pi) sum_l sum_{m<=n} int phi^l_m(sig) 2 Phi_{n-m}(x, x_l(sig)) dsig

with parametrized densities ``phi^l_m(sig) = density(x_l(sig)) |x_l'(sig)|``.
The system matrix is the same for every n; only the right-hand sides carry
the lower-index densities, so one LU factorization serves the whole sequence.
"""

from dataclasses import dataclass, field, replace
import logging
import math
import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .kernels import KernelContext
from .quadrature import QuadratureGrid

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-13


class SolverError(RuntimeError):
    """Nystrom system is numerically singular."""


@dataclass
class DensitySequence:
    """Parametrized densities at the grid nodes, arrays of shape (N+1, M)."""

    inner: np.ndarray
    outer: np.ndarray

    @property
    def n_terms(self) -> int:
        return self.inner.shape[0]

    def stacked(self) -> np.ndarray:
        """Shape (N+1, 2M), cavity nodes first."""
        return np.concatenate([self.inner, self.outer], axis=1)

    @classmethod
    def from_stacked(cls, phi: np.ndarray) -> "DensitySequence":
        M = phi.shape[1] // 2
        return cls(phi[:, :M].copy(), phi[:, M:].copy())


@dataclass
class CauchyData:
    """Laguerre coefficients of the Dirichlet (f) and Neumann (g) traces on the exterior curve.

    ``f`` and ``g`` have shape (N+1, M) with values at the nodes ``s``.
    """

    f: np.ndarray
    g: np.ndarray
    s: np.ndarray
    noise_level: float = 0.0
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=float)
        self.g = np.asarray(self.g, dtype=float)
        self.s = np.asarray(self.s, dtype=float)
        if self.f.shape != self.g.shape or self.f.shape[1] != len(self.s):
            raise ValueError(f"inconsistent shapes f{self.f.shape} g{self.g.shape} s{self.s.shape}")

    @property
    def n_terms(self) -> int:
        return self.f.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.f.shape[1]


def example_exterior_data(n: int, kappa: float = 1.0) -> float:
    """``e (2 + kappa n (kappa (n-1) - 4)) / (4 (kappa+1)^(n+3))``, constant on the exterior curve."""
    return math.e * (2.0 + kappa * n * (kappa * (n - 1) - 4.0)) / (4.0 * (kappa + 1.0) ** (n + 3))


def _factor(A):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)  # singularity is reported via the pivot check
        lu, piv = lu_factor(A, check_finite=True)
    u = np.abs(np.diag(lu))
    if u.min() <= PIVOT_TOL * u.max():
        raise SolverError(f"system is numerically singular (pivot ratio {u.min() / u.max():.2e})")
    return lu, piv


def _memory(ops, phi, n):
    """``sum_{m<n} ops[n-m] @ phi[m]``."""
    out = np.zeros(ops.shape[1])
    for m in range(n):
        out += ops[n - m] @ phi[m]
    return out


def _solve_sequence(A, rows_ops, rhs, extra_memory=None):
    """Solve ``A phi_n = rhs[n] - sum_{m<n} rows_ops[n-m] phi_m (- extra_memory)`` for all n."""
    lu = _factor(A)
    n_terms = rhs.shape[0]
    phi = np.zeros((n_terms, A.shape[1]))
    for n in range(n_terms):
        b = rhs[n] - _memory(rows_ops, phi, n)
        if extra_memory is not None:
            b = b - extra_memory(phi, n)
        phi[n] = lu_solve(lu, b)
    return phi


def solve_dirichlet_sequence(ctx: KernelContext, f1, f2) -> DensitySequence:
    """Densities for ``u_n = f1[n]`` on the cavity and ``u_n = f2[n]`` on the exterior curve.

    ``f1``, ``f2`` are arrays of shape (N+1, M) of node values.
    """
    N1 = ctx.N + 1
    f1 = np.broadcast_to(np.asarray(f1, float), (N1, ctx.M))
    f2 = np.broadcast_to(np.asarray(f2, float), (N1, ctx.M))
    ops = np.concatenate([ctx.H_rows(1), ctx.H_rows(2)], axis=1)
    phi = _solve_sequence(ops[0], ops, np.concatenate([f1, f2], axis=1))
    return DensitySequence.from_stacked(phi)


def dirichlet_trace(ctx: KernelContext, densities: DensitySequence, k: int = 2) -> np.ndarray:
    """``u_n`` on curve ``k`` at the nodes, shape (N+1, M)."""
    ops = ctx.H_rows(k)
    phi = densities.stacked()
    return np.array([sum(ops[n - m] @ phi[m] for m in range(n + 1)) for n in range(phi.shape[0])])


def neumann_trace(ctx: KernelContext, densities: DensitySequence) -> np.ndarray:
    """Normal derivative of ``u_n`` on the exterior curve, shape (N+1, M).

    ``g_n = sum_{m<=n} [phi^2_m / |x_2'| + (1/2pi) sum_l int phi^l_m Q^{2,l}_{n-m}]``.
    """
    ops = ctx.Q_rows()
    phi = densities.stacked()
    speed = ctx.speed(2)
    out = np.empty((phi.shape[0], ctx.M))
    for n in range(phi.shape[0]):
        jump = densities.outer[: n + 1].sum(axis=0) / speed
        out[n] = jump + sum(ops[n - m] @ phi[m] for m in range(n + 1))
    return out


def evaluate_field(ctx: KernelContext, densities: DensitySequence, x) -> np.ndarray:
    """``u_n(x)`` for n = 0..N at points ``x`` (shape (2,) or (P, 2)); result (N+1,) or (N+1, P)."""
    pts = np.atleast_2d(np.asarray(x, float))
    h = 2.0 * np.pi / ctx.M
    out = np.zeros((ctx.N + 1, len(pts)))
    for k, dens in ((1, densities.inner), (2, densities.outer)):
        y = ctx.geometry(k)[0]
        d = np.linalg.norm(pts[:, None, :] - y[None, :, :], axis=-1)
        if np.any(d.min(axis=1) < h * np.linalg.norm(ctx.geometry(k)[1], axis=-1).max()):
            warnings.warn("evaluation point close to the boundary; accuracy degrades", stacklevel=2)
        phi_k, _ = ctx.fundamental.evaluate_all(d)  # (N+1, P, M)
        for n in range(ctx.N + 1):
            for m in range(n + 1):
                out[n] += 2.0 * phi_k[n - m] @ dens[m] / ctx.M
    return out[:, 0] if np.ndim(x) == 1 else out


def add_noise(data: CauchyData, level: float, seed: int, perturb_g: bool = True) -> CauchyData:
    """Relative L2 noise per Laguerre index: ``f_n + level ||f_n|| eta / ||eta||``."""
    if level < 0:
        raise ValueError("noise level must be nonnegative")
    if level == 0:
        return replace(data, f=data.f.copy(), g=data.g.copy(), noise_level=0.0, seed=seed)
    rng = np.random.default_rng(seed)
    h = 2.0 * np.pi / data.n_nodes

    def perturb(values):
        out = values.copy()
        for n in range(values.shape[0]):
            eta = rng.standard_normal(values.shape[1])
            norm_f = np.sqrt(h * np.sum(values[n] ** 2))
            norm_eta = np.sqrt(h * np.sum(eta**2))
            out[n] = values[n] + level * norm_f * eta / norm_eta
        return out

    f = perturb(data.f)
    g = perturb(data.g) if perturb_g else data.g.copy()
    return replace(data, f=f, g=g, noise_level=level, seed=seed)


def simulation_grid(inverse_grid: QuadratureGrid, factor: int = 2) -> QuadratureGrid:
    """Finer grid for data simulation (twice the nodes by default)."""
    return QuadratureGrid(factor * inverse_grid.n_nodes)


def resample(values, n_target: int) -> np.ndarray:
    """Restrict node values (last axis) to an equispaced grid of ``n_target`` nodes.

    Nested grids are subsampled; otherwise trigonometric interpolation is used.
    """
    values = np.asarray(values, dtype=float)
    n_src = values.shape[-1]
    if n_src == n_target:
        return values.copy()
    if n_src % n_target == 0:
        return values[..., :: n_src // n_target].copy()
    return trig_interpolate(values, n_target)


def trig_interpolate(values, n_target: int) -> np.ndarray:
    """Evaluate the trigonometric interpolant of equispaced samples on a new equispaced grid."""
    values = np.asarray(values, dtype=float)
    n_src = values.shape[-1]
    c = np.fft.rfft(values, axis=-1)
    if n_src % 2 == 0:
        c[..., -1] *= 0.5  # split Nyquist mode symmetrically
    t = 2.0 * np.pi * np.arange(n_target) / n_target
    k = np.arange(c.shape[-1])
    wk = np.full(k.shape, 2.0)
    wk[0] = 1.0
    basis = np.exp(1j * np.multiply.outer(k, t))
    return np.real((c * wk) @ basis) / n_src


def simulate_cauchy_data(ctx_fine: KernelContext, f1, f2, n_target: int | None = None) -> CauchyData:
    """Solve the Dirichlet sequence on ``ctx_fine`` and return Cauchy data on the exterior curve.

    With ``n_target`` the traces are restricted to a coarser grid (inverse-crime avoidance).
    """
    dens = solve_dirichlet_sequence(ctx_fine, f1, f2)
    f = dirichlet_trace(ctx_fine, dens, 2)
    g = neumann_trace(ctx_fine, dens)
    s = ctx_fine.grid.nodes
    if n_target is not None and n_target != ctx_fine.M:
        f, g = resample(f, n_target), resample(g, n_target)
        s = 2.0 * np.pi * np.arange(n_target) / n_target
    return CauchyData(f=f, g=g, s=s)
