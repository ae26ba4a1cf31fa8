"""Modified Bessel functions of order zero and one.

All functions accept scalars or numpy arrays and broadcast elementwise.

I0 and I1 come from their power series, and K0 and K1 (the Macdonald
functions) from the logarithmic series

    K0(z) = -(ln(z/2) + C) I0(z) + sum_{n>=1} psi(n) (z/2)^{2n} / (n!)^2
    K1(z) = 1/z + (ln(z/2) + C) I1(z)
            - 1/2 sum_{n>=0} (psi(n+1) + psi(n)) (z/2)^{2n+1} / (n!(n+1)!)

Series are accumulated in extended precision (``np.longdouble``) until every
term drops below ``REL_TOL`` times the partial sum or ``MAX_TERMS`` terms have
been added. The K series cancels catastrophically as z grows, so above
``K_SERIES_MAX`` the Macdonald functions are taken from the integral
representation

    K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt,

integrated with the trapezoidal rule, which converges double-exponentially for
this analytic, rapidly decaying integrand.
"""

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
REL_TOL = 1e-16
MAX_TERMS = 200
K_SERIES_MAX = 2.0

# trapezoid on [0, T]: exp(-z cosh T) < 1e-300 for z > K_SERIES_MAX
_K_STEP = 0.05
_K_NODES = np.arange(0.0, 7.0 + _K_STEP, _K_STEP)


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


def _as_array(z, strictly_positive):
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise DomainError("argument must be finite")
    if strictly_positive:
        if np.any(z <= 0.0):
            raise DomainError("argument must be strictly positive (logarithmic singularity at 0)")
    elif np.any(z < 0.0):
        raise DomainError("argument must be nonnegative")
    return z


def _ret(z, value):
    return float(value) if np.ndim(z) == 0 else value


def harmonic_psi(n: int) -> float:
    """Harmonic number ``sum_{m=1..n} 1/m`` with ``psi(0) = 0``."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    return math.fsum(1.0 / m for m in range(1, n + 1))


def _series(z, max_terms=MAX_TERMS):
    """Sum the four power series sharing the powers of z/2, in long double.

    Returns (I0, I1, S0, S1) where
    S0 = sum_{n>=1} psi(n) (z/2)^{2n} / (n!)^2 and
    S1 = sum_{n>=0} (psi(n+1) + psi(n)) (z/2)^{2n+1} / (n! (n+1)!).
    """
    x = 0.5 * np.asarray(z, dtype=np.longdouble)
    x2 = x * x
    t0 = np.ones_like(x)  # (z/2)^{2n} / (n!)^2
    t1 = x.copy()  # (z/2)^{2n+1} / (n!(n+1)!)
    i0 = t0.copy()
    i1 = t1.copy()
    s0 = np.zeros_like(x)
    s1 = t1.copy()  # psi(1) + psi(0) = 1
    psi = np.longdouble(0.0)
    one = np.longdouble(1.0)
    for n in range(1, max_terms):
        psi += one / n
        t0 = t0 * x2 / (n * n)
        t1 = t1 * x2 / (n * (n + 1))
        i0 += t0
        i1 += t1
        s0 += psi * t0
        s1 += (2 * psi + one / (n + 1)) * t1
        if np.all((t0 <= REL_TOL * i0) & (t1 <= REL_TOL * np.maximum(i1, 1e-300))):
            break
    return i0, i1, s0, s1


def _k_integral(z):
    """K0, K1 by the trapezoidal rule on the cosh integral representation."""
    t = _K_NODES
    w = np.full(t.shape, _K_STEP)
    w[0] *= 0.5
    e = np.exp(-np.multiply.outer(z, np.cosh(t)))
    return e @ w, e @ (w * np.cosh(t))


def _all(z):
    flat = np.atleast_1d(z).ravel()
    i0, i1, s0, s1 = _series(flat)
    k0 = np.empty(flat.shape)
    k1 = np.empty(flat.shape)
    small = flat <= K_SERIES_MAX
    if np.any(small):
        zs = flat[small].astype(np.longdouble)
        log_term = np.log(0.5 * zs) + np.longdouble(EULER_GAMMA)
        k0[small] = -log_term * i0[small] + s0[small]
        k1[small] = 1 / zs + log_term * i1[small] - s1[small] / 2
    if np.any(~small):
        k0[~small], k1[~small] = _k_integral(flat[~small])
    shape = np.shape(z)
    return (
        i0.astype(float).reshape(shape),
        i1.astype(float).reshape(shape),
        k0.reshape(shape),
        k1.reshape(shape),
    )


def bessel_i0(z):
    """Modified Bessel function I0 for ``z >= 0``."""
    z = _as_array(z, strictly_positive=False)
    return _ret(z, _series(np.atleast_1d(z))[0].astype(float).reshape(z.shape))


def bessel_i1(z):
    """Modified Bessel function I1 for ``z >= 0``."""
    z = _as_array(z, strictly_positive=False)
    return _ret(z, _series(np.atleast_1d(z))[1].astype(float).reshape(z.shape))


def bessel_k0(z):
    """Macdonald function K0 for ``z > 0``."""
    z = _as_array(z, strictly_positive=True)
    return _ret(z, _all(z)[2])


def bessel_k1(z):
    """Macdonald function K1 for ``z > 0``."""
    z = _as_array(z, strictly_positive=True)
    return _ret(z, _all(z)[3])


def bessel_all(z):
    """Return ``(I0, I1, K0, K1)`` at positive arguments in one pass.

    Kernel assembly needs all four on the same distance matrix.
    """
    z = _as_array(z, strictly_positive=True)
    return _all(z)
