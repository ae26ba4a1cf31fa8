"""Parametrized boundary kernels and their Nystrom matrices.

For curves ``x_k`` (collocation) and ``x_l`` (integration)::

    H^{k,l}_n(s, sig) = 2 Phi_n(|x_k(s) - x_l(sig)|)
    Q^{k,l}_n(s, sig) = 2 d/dnu(x) Phi_n = -2 Phi~_n(d) (x - y).nu(x) / d

On a single curve both kernels are split as
``K = K1(s, sig) ln((4/e) sin^2((s - sig)/2)) + K2(s, sig)`` with smooth
``K1``, ``K2`` so the logarithmic part can be integrated with the weights of
:mod:`laguerre_bie.quadrature`.

``D_n`` is the derivative of ``H^{2,1}_n`` with respect to a radial
perturbation ``q(sig) (cos sig, sin sig)`` of the cavity boundary:

    D_n(s, sig) = 2 Phi~_n(d) (x_2(s) - x_1(sig)).(cos sig, sin sig) / d

All operator matrices include the 1/(2pi) prefactor of the integral
equations, i.e. ``(1/2pi) int K(s_i, sig) phi(sig) dsig ~ (A @ phi)[i]``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .fundamental import FundamentalSequence
from .geometry import ParametricCurve
from .quadrature import QuadratureGrid, log_weight_matrix
from .special_functions import EULER_GAMMA, bessel_all


class SingularKernelError(ValueError):
    """Kernel evaluated at coincident points; use the split form instead."""


def log_factor(s, sig):
    """``ln((4/e) sin^2((s - sig)/2))``."""
    with np.errstate(divide="ignore"):
        return np.log(4.0 * np.sin(0.5 * (np.asarray(s) - np.asarray(sig))) ** 2) - 1.0


def _pairs(curve_x, s, curve_y, sig):
    """Broadcast geometry for point pairs x = curve_x(s), y = curve_y(sig)."""
    x, dx, ddx = curve_x.derivatives(s)
    y, _, _ = curve_y.derivatives(sig)
    diff = x - y
    d = np.linalg.norm(diff, axis=-1)
    return x, dx, ddx, diff, d


def _normal_factor(curve, dx, diff, d):
    """``(x - y).nu(x) / d`` with nu the domain-outward normal at x."""
    speed = np.linalg.norm(dx, axis=-1)
    return curve.orientation * (diff[..., 0] * dx[..., 1] - diff[..., 1] * dx[..., 0]) / (speed * d)


def kernel_h(curve_l: ParametricCurve, curve_k: ParametricCurve, s, sig):
    """``[(x_l1(s) - x_k1(sig)) x_l2'(s) - (x_l2(s) - x_k2(sig)) x_l1'(s)] / |x_k(sig) - x_l(s)|``."""
    _, dx, _, diff, d = _pairs(curve_l, np.asarray(s, float), curve_k, np.asarray(sig, float))
    if np.any(d == 0.0):
        raise SingularKernelError("h is undefined at coincident points")
    return (diff[..., 0] * dx[..., 1] - diff[..., 1] * dx[..., 0]) / d


def kernel_H(fs: FundamentalSequence, n, curve_k, curve_l, s, sig):
    """``H^{k,l}_n(s, sig) = 2 Phi_n(|x_k(s) - x_l(sig)|)``."""
    s, sig = np.broadcast_arrays(np.asarray(s, float), np.asarray(sig, float))
    _, _, _, _, d = _pairs(curve_k, s, curve_l, sig)
    if np.any(d == 0.0):
        raise SingularKernelError("coincident points: use split_H")
    return 2.0 * fs.phi(n, d)


def kernel_Q(fs: FundamentalSequence, n, curve_k, curve_l, s, sig):
    """``Q^{k,l}_n(s, sig)``: twice the normal derivative of Phi_n at x_k(s)."""
    s, sig = np.broadcast_arrays(np.asarray(s, float), np.asarray(sig, float))
    _, dx, _, diff, d = _pairs(curve_k, s, curve_l, sig)
    if np.any(d == 0.0):
        raise SingularKernelError("coincident points: use split_Q")
    return -2.0 * fs.phi_tilde(n, d) * _normal_factor(curve_k, dx, diff, d)


def _split_H_values(fs, d, speed, L, diag):
    """Return (H, H1, H2) for all n on arrays; ``diag`` marks s == sig."""
    g = fs.gamma
    dd = np.where(diag, 1.0, d)
    i0, i1, k0, k1 = bessel_all(g * dd)
    N = fs.N
    H = np.empty((N + 1,) + d.shape)
    H1 = np.empty_like(H)
    H2 = np.empty_like(H)
    Lsafe = np.where(diag, 0.0, L)
    for n in range(N + 1):
        v, w = fs.v(n, dd), fs.w(n, dd)
        H[n] = 2.0 * (k0 * v + k1 * w)
        H1[n] = np.where(diag, -1.0, -i0 * v + i1 * w)
        diag_val = -2.0 * EULER_GAMMA - 1.0 - 2.0 * np.log(g * speed / 2.0) + 2.0 * fs.table[n, 1] / g
        H2[n] = np.where(diag, diag_val, H[n] - H1[n] * Lsafe)
        H[n] = np.where(diag, np.nan, H[n])
    return H, H1, H2


def _split_Q_values(fs, curve, dx, ddx, diff, d, L, diag):
    """Return (Q, Q1, Q2) for all n on arrays; ``diag`` marks s == sig."""
    g = fs.gamma
    dd = np.where(diag, 1.0, d)
    i0, i1, k0, k1 = bessel_all(g * dd)
    speed = np.linalg.norm(dx, axis=-1)
    h = (diff[..., 0] * dx[..., 1] - diff[..., 1] * dx[..., 0]) / dd
    nf = curve.orientation * h / speed
    curv = curve.orientation * (dx[..., 1] * ddx[..., 0] - dx[..., 0] * ddx[..., 1]) / speed**3
    Lsafe = np.where(diag, 0.0, L)
    N = fs.N
    Q = np.empty((N + 1,) + d.shape)
    Q1 = np.empty_like(Q)
    Q2 = np.empty_like(Q)
    for n in range(N + 1):
        vt, wt = fs.v_tilde(n, dd), fs.w_tilde(n, dd)
        Q[n] = -2.0 * (k1 * vt + k0 * wt) * nf
        Q1[n] = np.where(diag, 0.0, -nf * (i1 * vt - i0 * wt))
        Q2[n] = np.where(diag, curv, Q[n] - Q1[n] * Lsafe)
        Q[n] = np.where(diag, np.nan, Q[n])
    return Q, Q1, Q2


def split_H(fs: FundamentalSequence, n, curve, s, sig):
    """``(H1, H2)`` of the logarithmic splitting of ``H^{l,l}_n``.

    ``H1 = -I0(g d) v_n(d) + I1(g d) w_n(d)``; on the diagonal
    ``H2 = -2C - 1 - 2 ln(g |x'|/2) + 2 a[n,1]/g`` (with ``a[0,1] = 0``).
    """
    s, sig = np.broadcast_arrays(np.asarray(s, float), np.asarray(sig, float))
    _, dx, _, _, d = _pairs(curve, s, curve, sig)
    diag = _coincident(s, sig)
    _, H1, H2 = _split_H_values(fs, d, np.linalg.norm(dx, axis=-1), log_factor(s, sig), diag)
    return _scalar(H1[n]), _scalar(H2[n])


def split_Q(fs: FundamentalSequence, n, curve, s, sig):
    """``(Q1, Q2)`` of the logarithmic splitting of ``Q^{l,l}_n``.

    On the diagonal ``Q2`` is the signed curvature term
    ``(x2' x1'' - x1' x2'') / |x'|^3`` (times the orientation sign), for every n.
    """
    s, sig = np.broadcast_arrays(np.asarray(s, float), np.asarray(sig, float))
    _, dx, ddx, diff, d = _pairs(curve, s, curve, sig)
    diag = _coincident(s, sig)
    _, Q1, Q2 = _split_Q_values(fs, curve, dx, ddx, diff, d, log_factor(s, sig), diag)
    return _scalar(Q1[n]), _scalar(Q2[n])


def frechet_kernel_D(fs: FundamentalSequence, n, outer, inner, s, sig):
    """Kernel of the derivative of ``H^{2,1}_n`` with respect to radial perturbations of ``inner``."""
    s, sig = np.broadcast_arrays(np.asarray(s, float), np.asarray(sig, float))
    _, _, _, diff, d = _pairs(outer, s, inner, sig)
    proj = (diff[..., 0] * np.cos(sig) + diff[..., 1] * np.sin(sig)) / d
    return _scalar(2.0 * fs.phi_tilde(n, d) * proj)


def _coincident(s, sig):
    return np.isclose(np.mod(s - sig + np.pi, 2 * np.pi) - np.pi, 0.0, atol=1e-14)


def _scalar(a):
    return float(a) if np.ndim(a) == 0 else a


@dataclass
class KernelContext:
    """Nystrom matrices for one geometry, all Laguerre indices, cached on first use.

    Unknowns are ordered ``[phi^1 (cavity nodes), phi^2 (exterior nodes)]``.
    """

    fundamental: FundamentalSequence
    inner: ParametricCurve
    outer: ParametricCurve
    grid: QuadratureGrid
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def M(self) -> int:
        return self.grid.n_nodes

    @property
    def N(self) -> int:
        return self.fundamental.N

    @cached_property
    def log_weights(self) -> np.ndarray:
        return log_weight_matrix(self.grid)

    @cached_property
    def _diag(self):
        return np.eye(self.M, dtype=bool)

    @cached_property
    def _L(self):
        s = self.grid.nodes
        with np.errstate(divide="ignore"):
            return np.where(self._diag, 0.0, log_factor(s[:, None], s[None, :]))

    def curve(self, k):
        return self.inner if k == 1 else self.outer

    def geometry(self, k):
        """``(x, x', x'')`` at the nodes of curve ``k``."""
        key = ("geom", k)
        if key not in self._cache:
            self._cache[key] = self.curve(k).derivatives(self.grid.nodes)
        return self._cache[key]

    def speed(self, k):
        return np.linalg.norm(self.geometry(k)[1], axis=-1)

    def _pair_arrays(self, k, l):
        xk, dxk, ddxk = self.geometry(k)
        xl = self.geometry(l)[0]
        diff = xk[:, None, :] - xl[None, :, :]
        d = np.linalg.norm(diff, axis=-1)
        return dxk[:, None, :], ddxk[:, None, :], diff, d

    def _split_op(self, K1, K2):
        """(1/2pi) int [K1 ln((4/e) sin^2) + K2] phi -> matrix (the -1 goes to the trapezoid part)."""
        return self.log_weights * K1 + (K2 - K1) / self.M

    def H_block(self, k, l):
        """Operators ``(1/2pi) int H^{k,l}_n phi``, shape (N+1, M, M)."""
        key = ("H", k, l)
        if key not in self._cache:
            dx, _, _, d = self._pair_arrays(k, l)
            if k == l:
                speed = np.linalg.norm(dx[:, 0, :], axis=-1)[:, None]
                _, H1, H2 = _split_H_values(self.fundamental, d, speed, self._L, self._diag)
                op = self._split_op(H1, H2)
            else:
                phi, _ = self.fundamental.evaluate_all(d)
                op = 2.0 * phi / self.M
            self._cache[key] = op
        return self._cache[key]

    def Q_block(self, k, l):
        """Operators ``(1/2pi) int Q^{k,l}_n phi``, shape (N+1, M, M)."""
        key = ("Q", k, l)
        if key not in self._cache:
            dx, ddx, diff, d = self._pair_arrays(k, l)
            curve = self.curve(k)
            if k == l:
                _, Q1, Q2 = _split_Q_values(
                    self.fundamental, curve, dx, ddx, diff, d, self._L, self._diag
                )
                op = self._split_op(Q1, Q2)
            else:
                _, phit = self.fundamental.evaluate_all(d)
                op = -2.0 * phit * _normal_factor(curve, dx, diff, d) / self.M
            self._cache[key] = op
        return self._cache[key]

    def H_rows(self, k):
        """``[H^{k,1}_n | H^{k,2}_n]`` operators, shape (N+1, M, 2M)."""
        return np.concatenate([self.H_block(k, 1), self.H_block(k, 2)], axis=-1)

    def Q_rows(self):
        """``[Q^{2,1}_n | Q^{2,2}_n]`` operators, shape (N+1, M, 2M)."""
        return np.concatenate([self.Q_block(2, 1), self.Q_block(2, 2)], axis=-1)

    def D_block(self):
        """Trapezoid operators ``(1/2pi) int D_n(s_i, sig) psi(sig) dsig``, shape (N+1, M, M)."""
        key = ("D",)
        if key not in self._cache:
            _, _, diff, d = self._pair_arrays(2, 1)
            sig = self.grid.nodes[None, :]
            proj = (diff[..., 0] * np.cos(sig) + diff[..., 1] * np.sin(sig)) / d
            _, phit = self.fundamental.evaluate_all(d)
            self._cache[key] = 2.0 * phit * proj / self.M
        return self._cache[key]

    def with_inner(self, inner: ParametricCurve) -> "KernelContext":
        """Same exterior curve and grid, new cavity boundary; exterior-only blocks are reused."""
        ctx = KernelContext(self.fundamental, inner, self.outer, self.grid)
        for key, val in self._cache.items():
            if key in (("H", 2, 2), ("Q", 2, 2), ("geom", 2)):
                ctx._cache[key] = val
        return ctx
