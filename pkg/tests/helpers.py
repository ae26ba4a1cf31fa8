"""Shared oracles for the solver tests."""

import warnings

import mpmath as mp
import numpy as np

from laguerre_bie.forward import evaluate_field, neumann_trace, solve_dirichlet_sequence
from laguerre_bie.geometry import outward_normal
from laguerre_bie.kernels import KernelContext
from laguerre_bie.quadrature import QuadratureGrid

SOURCE = np.zeros(2)
TEST_POINT = np.array([0.75, 0.0])


def manufactured_errors(fs, inner, outer, M, source=SOURCE, point=TEST_POINT):
    """Max errors of the field at ``point`` and of the exterior Neumann trace.

    The exact solution is ``u_n(x) = Phi_n(|x - source|)`` with the source inside the cavity.
    """
    ctx = KernelContext(fs, inner, outer, QuadratureGrid(M))
    N1 = fs.N + 1
    x1 = ctx.geometry(1)[0]
    x2 = ctx.geometry(2)[0]
    d1 = np.linalg.norm(x1 - source, axis=1)
    d2 = np.linalg.norm(x2 - source, axis=1)
    f1 = np.array([fs.phi(n, d1) for n in range(N1)])
    f2 = np.array([fs.phi(n, d2) for n in range(N1)])
    dens = solve_dirichlet_sequence(ctx, f1, f2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        u = evaluate_field(ctx, dens, point)
    u_exact = np.array([fs.phi(n, np.linalg.norm(point - source)) for n in range(N1)])
    nu = outward_normal(outer, ctx.grid.nodes)
    proj = np.sum((x2 - source) * nu, axis=1) / d2
    g_exact = np.array([-fs.phi_tilde(n, d2) * proj for n in range(N1)])
    g = neumann_trace(ctx, dens)
    return float(np.max(np.abs(u - u_exact))), float(np.max(np.abs(g - g_exact)))


def series_oracle(z, terms=80, dps=60):
    """Log-series for I0, I1, K0, K1 summed in 60-digit arithmetic."""
    with mp.workdps(dps):
        z = mp.mpf(z)
        x = z / 2
        i0 = i1 = s0 = s1 = mp.mpf(0)
        psi = mp.mpf(0)
        for n in range(terms):
            if n:
                psi += mp.mpf(1) / n
            t0 = x ** (2 * n) / mp.factorial(n) ** 2
            t1 = x ** (2 * n + 1) / (mp.factorial(n) * mp.factorial(n + 1))
            i0 += t0
            i1 += t1
            s0 += psi * t0
            s1 += (2 * psi + mp.mpf(1) / (n + 1)) * t1
        c = mp.euler
        k0 = -(mp.log(x) + c) * i0 + s0
        k1 = 1 / z + (mp.log(x) + c) * i1 - s1 / 2
        return [float(v) for v in (i0, i1, k0, k1)]


STENCIL = {-2: -1.0 / 12, -1: 16.0 / 12, 0: -30.0 / 12, 1: 16.0 / 12, 2: -1.0 / 12}


def pde_residual(fs, n, d, h=1e-3):
    """FD Laplacian of Phi_n(x, 0) at |x| = d minus sum_m beta_{n-m} Phi_m, relative to |Phi_n|.

    Five-point second difference along each axis (fourth order).
    """
    x = np.array([d, 0.0])

    def phi(m, p):
        return fs.phi(m, np.linalg.norm(p))

    lap = sum(c * phi(n, x + j * h * e) for e in np.eye(2) for j, c in STENCIL.items()) / h**2
    rhs = sum(fs.params.beta(n - m) * phi(m, x) for m in range(n + 1))
    return abs(lap - rhs) / abs(phi(n, x))
