"""Fundamental solution sequence of the Laguerre-transformed wave equation.

The functions

    Phi_n(r) = K0(gamma r) v_n(r) + K1(gamma r) w_n(r)

satisfy  Lap Phi_n - sum_{m=0..n} beta_{n-m} Phi_m = -delta  in the plane,
where v_n and w_n are the even and odd parts of a polynomial whose
coefficients ``a[n, k]`` follow a triangular recurrence. ``Phi~_n`` denotes
``-d Phi_n / dr``, which is what normal derivatives and the shape derivative
are built from.
"""

from dataclasses import dataclass, field

import numpy as np

from .laguerre import LaguerreParams
from .special_functions import bessel_all


def build_coefficient_table(params: LaguerreParams) -> np.ndarray:
    """Triangular table ``a[n, k]`` (zero above the diagonal), shape (N+1, N+2).

    The extra column keeps ``a[n, n+1] = 0`` addressable by the recurrence.
    """
    N = params.N
    g = params.gamma
    betas = np.array([params.beta(k) for k in range(N + 1)])
    a = np.zeros((N + 1, N + 2))
    a[:, 0] = 1.0
    for n in range(1, N + 1):
        a[n, n] = -betas[1] * a[n - 1, n - 1] / (2.0 * g * n)
        for k in range(n - 1, 0, -1):
            memory = sum(betas[n - m] * a[m, k - 1] for m in range(k - 1, n))
            a[n, k] = (4.0 * ((k + 1) // 2) ** 2 * a[n, k + 1] - memory) / (2.0 * g * k)
    return a


def _horner_sq(coeffs, r2):
    """Evaluate ``sum_j coeffs[j] * r2**j`` by Horner's scheme."""
    out = np.zeros_like(r2)
    for c in coeffs[::-1]:
        out = out * r2 + c
    return out


@dataclass(frozen=True)
class FundamentalSequence:
    """Coefficient table plus evaluators for v_n, w_n, their tilde companions and Phi_n."""

    params: LaguerreParams
    table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "table", build_coefficient_table(self.params))

    @property
    def gamma(self) -> float:
        return self.params.gamma

    @property
    def N(self) -> int:
        return self.params.N

    def _check(self, n):
        if not 0 <= n <= self.N:
            raise IndexError(f"index {n} outside 0..{self.N}")

    # Even coefficients a[n, 0], a[n, 2], ... and odd a[n, 1], a[n, 3], ...
    def _even(self, n):
        return self.table[n, 0 : n + 1 : 2]

    def _odd(self, n):
        return self.table[n, 1 : n + 1 : 2]

    def v(self, n, r):
        self._check(n)
        r = np.asarray(r, dtype=float)
        return _horner_sq(self._even(n), r * r)

    def w(self, n, r):
        self._check(n)
        r = np.asarray(r, dtype=float)
        return r * _horner_sq(self._odd(n), r * r)

    def v_tilde(self, n, r):
        """``gamma sum a[n,2m] r^2m - 2 sum_{m>=1} m a[n,2m+1] r^2m``."""
        self._check(n)
        r = np.asarray(r, dtype=float)
        odd = self._odd(n)
        m = np.arange(len(odd))
        return self.gamma * _horner_sq(self._even(n), r * r) - 2.0 * _horner_sq(m * odd, r * r)

    def w_tilde(self, n, r):
        """``gamma sum a[n,2m+1] r^(2m+1) - 2 sum_{m>=1} m a[n,2m] r^(2m-1)``."""
        self._check(n)
        r = np.asarray(r, dtype=float)
        r2 = r * r
        even = self._even(n)
        m = np.arange(len(even))
        # sum_{m>=1} m a[n,2m] r^(2m-1) = r * sum_{j>=0} (j+1) a[n,2j+2] r^(2j)
        deriv = r * _horner_sq((m * even)[1:], r2)
        return self.gamma * r * _horner_sq(self._odd(n), r2) - 2.0 * deriv

    def phi(self, n, dist):
        """Phi_n as a function of the distance ``dist > 0``."""
        _, _, k0, k1 = bessel_all(self.gamma * np.asarray(dist, dtype=float))
        out = k0 * self.v(n, dist) + k1 * self.w(n, dist)
        return out if np.ndim(out) else float(out)

    def phi_tilde(self, n, dist):
        """Phi~_n = -d Phi_n / dr."""
        _, _, k0, k1 = bessel_all(self.gamma * np.asarray(dist, dtype=float))
        out = k1 * self.v_tilde(n, dist) + k0 * self.w_tilde(n, dist)
        return out if np.ndim(out) else float(out)

    def phi_points(self, n, x, y):
        """Phi_n(x, y) for planar points (last axis of length 2)."""
        d = np.linalg.norm(np.asarray(x, float) - np.asarray(y, float), axis=-1)
        return self.phi(n, d)

    def evaluate_all(self, dist):
        """All Phi_n and Phi~_n, n = 0..N, on an array of distances.

        Returns two arrays of shape ``(N+1,) + dist.shape``; the Bessel values
        are computed once and shared across n.
        """
        dist = np.asarray(dist, dtype=float)
        _, _, k0, k1 = bessel_all(self.gamma * dist)
        phi = np.empty((self.N + 1,) + dist.shape)
        phit = np.empty_like(phi)
        for n in range(self.N + 1):
            phi[n] = k0 * self.v(n, dist) + k1 * self.w(n, dist)
            phit[n] = k1 * self.v_tilde(n, dist) + k0 * self.w_tilde(n, dist)
        return phi, phit
