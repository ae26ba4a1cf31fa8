"""Laguerre polynomials and the scaled Fourier-Laguerre transform in time.

A causal signal u(t) is represented as

    u(t) = kappa * sum_{n=0..N} u_n L_n(kappa t),
    u_n  = int_0^inf exp(-kappa t) L_n(kappa t) u(t) dt,

which turns the wave equation into the recursive sequence of stationary
problems solved by the rest of the package.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import roots_laguerre


@dataclass(frozen=True)
class LaguerreParams:
    """Transform scale ``kappa``, wave speed ``a`` and number of coefficients.

    ``n_terms`` counts coefficients, so indices run over ``0..n_terms-1``
    (``N = n_terms - 1`` in the usual notation).
    """

    kappa: float = 1.0
    wave_speed: float = 1.0
    n_terms: int = 11

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not self.wave_speed > 0:
            raise ValueError(f"wave_speed must be positive, got {self.wave_speed}")
        if int(self.n_terms) != self.n_terms or self.n_terms < 1:
            raise ValueError(f"n_terms must be a positive integer, got {self.n_terms}")

    @property
    def N(self) -> int:
        return self.n_terms - 1

    def beta(self, k: int) -> float:
        """``beta_k = (k + 1) kappa^2 / a^2``."""
        if k < 0:
            raise ValueError("k must be nonnegative")
        return (k + 1) * self.kappa**2 / self.wave_speed**2

    @property
    def gamma(self) -> float:
        """``gamma = sqrt(beta_0) = kappa / a``."""
        return self.kappa / self.wave_speed


def beta(params: LaguerreParams, k: int) -> float:
    return params.beta(k)


def laguerre_poly(n: int, x):
    """L_n(x) by the three-term recurrence; ``x`` may be an array."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def laguerre_table(n_max: int, x) -> np.ndarray:
    """Rows ``L_0(x) .. L_{n_max}(x)`` stacked along axis 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 - x
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1 - x) * out[k] - k * out[k - 1]) / (k + 1)
    return out


def default_quad_order(params: LaguerreParams) -> int:
    return max(40, 2 * params.n_terms)


def laguerre_coefficients(signal, params: LaguerreParams, quad_order=None) -> np.ndarray:
    """Fourier-Laguerre coefficients ``u_0..u_N`` of a time signal.

    Uses Gauss-Laguerre quadrature after the substitution tau = kappa t:
    u_n = (1/kappa) int_0^inf exp(-tau) L_n(tau) u(tau/kappa) dtau.

    ``signal`` is a vectorized callable of time.
    """
    if quad_order is None:
        quad_order = default_quad_order(params)
    if quad_order < params.n_terms:
        raise ValueError(
            f"quad_order={quad_order} cannot resolve L_{params.N}; need at least {params.n_terms}"
        )
    tau, w = roots_laguerre(quad_order)
    values = np.asarray(signal(tau / params.kappa), dtype=float)
    if values.shape != tau.shape:
        values = np.broadcast_to(values, tau.shape)
    table = laguerre_table(params.N, tau)
    return table @ (w * values) / params.kappa


def laguerre_expand(coeffs, params: LaguerreParams, t):
    """Evaluate ``kappa * sum_n coeffs[n] L_n(kappa t)`` at times ``t >= 0``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    coeffs = np.asarray(coeffs, dtype=float)
    table = laguerre_table(len(coeffs) - 1, params.kappa * t)
    out = params.kappa * np.tensordot(coeffs, table, axes=1)
    return out if out.ndim else float(out)


def laguerre_poly_explicit(n: int, x: float) -> float:
    """Explicit sum ``sum_k C(n,k) (-x)^k / k!`` (reference form, slow)."""
    return math.fsum(math.comb(n, k) * (-x) ** k / math.factorial(k) for k in range(n + 1))
