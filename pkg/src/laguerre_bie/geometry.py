"""Closed 2pi-periodic boundary curves.

Curves are parametrized counterclockwise. The unit normal
``(x2', -x1') / |x'|`` then points away from the enclosed region; each curve
carries an ``orientation`` sign so that ``orientation * (x2', -x1') / |x'|``
is outward with respect to the annular domain between the two curves
(``+1`` on the exterior boundary, ``-1`` on the cavity boundary).
"""

from dataclasses import dataclass
import logging

import numpy as np

logger = logging.getLogger(__name__)

MIN_RADIUS = 0.05
MAX_HALVINGS = 20


class InvalidUpdateError(ValueError):
    """Radial update would make the radius nonpositive (or below the guard)."""


class DegenerateCurveError(ValueError):
    """Parametrization with vanishing speed."""


@dataclass(frozen=True)
class TrigPolynomial:
    """``q(s) = sum_j coeffs[j] tau_j(s)`` with tau_j = cos(js), j <= J, and sin((j-J)s), j > J."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or len(c) % 2 == 0:
            raise ValueError("need 2J+1 coefficients")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return (len(self.coeffs) - 1) // 2

    @classmethod
    def zeros(cls, degree: int) -> "TrigPolynomial":
        return cls(np.zeros(2 * degree + 1))

    @classmethod
    def constant(cls, value: float, degree: int = 0) -> "TrigPolynomial":
        c = np.zeros(2 * degree + 1)
        c[0] = value
        return cls(c)

    @classmethod
    def from_samples(cls, values, degree: int) -> "TrigPolynomial":
        """L2 projection of equispaced samples on [0, 2pi) onto degree ``degree``."""
        values = np.asarray(values, dtype=float)
        m = len(values)
        if 2 * degree >= m:
            raise ValueError("too few samples for the requested degree")
        f = np.fft.rfft(values) / m
        c = np.zeros(2 * degree + 1)
        c[0] = f[0].real
        c[1 : degree + 1] = 2.0 * f[1 : degree + 1].real
        c[degree + 1 :] = -2.0 * f[1 : degree + 1].imag
        return cls(c)

    def basis(self, s, order: int = 0) -> np.ndarray:
        return trig_basis(self.degree, s, order)

    def __call__(self, s):
        return self.derivative(s, 0)

    def derivative(self, s, order: int = 1):
        out = trig_basis(self.degree, s, order) @ self.coeffs
        return out if np.ndim(out) else float(out)

    def padded(self, degree: int) -> "TrigPolynomial":
        if degree < self.degree:
            raise ValueError("cannot pad to a lower degree")
        J = self.degree
        c = np.zeros(2 * degree + 1)
        c[: J + 1] = self.coeffs[: J + 1]
        c[degree + 1 : degree + 1 + J] = self.coeffs[J + 1 :]
        return TrigPolynomial(c)

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        J = max(self.degree, other.degree)
        return TrigPolynomial(self.padded(J).coeffs + other.padded(J).coeffs)

    def __mul__(self, factor: float) -> "TrigPolynomial":
        return TrigPolynomial(self.coeffs * factor)

    __rmul__ = __mul__

    def l2_norm(self) -> float:
        """``(int_0^{2pi} q^2)^{1/2}`` by Parseval."""
        c = self.coeffs
        return float(np.sqrt(np.pi * (2.0 * c[0] ** 2 + np.sum(c[1:] ** 2))))


def trig_basis(degree: int, s, order: int = 0) -> np.ndarray:
    """Matrix of ``d^order tau_j(s) / ds^order``, shape ``s.shape + (2*degree+1,)``."""
    s = np.asarray(s, dtype=float)
    j = np.arange(1, degree + 1)
    arg = np.multiply.outer(s, j)
    # d^p cos(js) = j^p cos(js + p pi/2); d^p sin(js) = j^p sin(js + p pi/2)
    shift = order * np.pi / 2
    scale = j.astype(float) ** order
    const = np.ones(s.shape + (1,)) if order == 0 else np.zeros(s.shape + (1,))
    return np.concatenate(
        [const, scale * np.cos(arg + shift), scale * np.sin(arg + shift)], axis=-1
    )


def eval_trig(poly: TrigPolynomial, s):
    return poly(s)


class RoundedRectangleRadial:
    """``scale * (cos^10 s + sin^10 s)^(-1/10)`` with analytic derivatives."""

    def __init__(self, scale: float = 1.0):
        self.scale = scale

    def derivative(self, s, order=1):
        s = np.asarray(s, dtype=float)
        c, si = np.cos(s), np.sin(s)
        F = c**10 + si**10
        if order == 0:
            return self.scale * F**-0.1
        F1 = 10.0 * si * c * (si**8 - c**8)
        if order == 1:
            return self.scale * -0.1 * F**-1.1 * F1
        F2 = 10.0 * (9.0 * si**8 * c**2 - si**10 + 9.0 * c**8 * si**2 - c**10)
        if order == 2:
            return self.scale * (0.11 * F**-2.1 * F1**2 - 0.1 * F**-1.1 * F2)
        raise ValueError("order must be 0, 1 or 2")

    def __call__(self, s):
        return self.derivative(s, 0)


class AppleRadial:
    """``(p0 + p1 cos s + p2 sin 2s) / (d0 + d1 cos s)`` with analytic derivatives."""

    def __init__(self, p0, p1, p2, d0, d1):
        self.p = (p0, p1, p2)
        self.d = (d0, d1)

    def derivative(self, s, order=1):
        s = np.asarray(s, dtype=float)
        p0, p1, p2 = self.p
        d0, d1 = self.d
        P = p0 + p1 * np.cos(s) + p2 * np.sin(2 * s)
        D = d0 + d1 * np.cos(s)
        if order == 0:
            return P / D
        P1 = -p1 * np.sin(s) + 2 * p2 * np.cos(2 * s)
        D1 = -d1 * np.sin(s)
        num = P1 * D - P * D1
        if order == 1:
            return num / D**2
        P2 = -p1 * np.cos(s) - 4 * p2 * np.sin(2 * s)
        D2 = -d1 * np.cos(s)
        if order == 2:
            return (P2 * D - P * D2) / D**2 - 2 * D1 * num / D**3
        raise ValueError("order must be 0, 1 or 2")

    def __call__(self, s):
        return self.derivative(s, 0)


@dataclass(frozen=True)
class ParametricCurve:
    """Curve given by a function returning (x, x', x'') at parameter values."""

    evaluator: object
    orientation: int = 1
    name: str = "curve"

    def derivatives(self, s):
        """Return ``(x, x', x'')``, each of shape ``s.shape + (2,)``."""
        return self.evaluator(np.asarray(s, dtype=float))

    def point(self, s):
        return self.derivatives(s)[0]

    def derivative(self, s):
        return self.derivatives(s)[1]

    def second_derivative(self, s):
        return self.derivatives(s)[2]


@dataclass(frozen=True)
class RadialCurve(ParametricCurve):
    """Star-like curve ``center + r(s) (cos s, sin s)``.

    ``radial`` is any object with ``__call__(s)`` and ``derivative(s, order)``,
    e.g. a :class:`TrigPolynomial`.
    """

    evaluator: object = None
    radial: object = None
    center: tuple = (0.0, 0.0)

    def derivatives(self, s):
        s = np.asarray(s, dtype=float)
        r = np.asarray(self.radial(s), dtype=float)
        r1 = np.asarray(self.radial.derivative(s, 1), dtype=float)
        r2 = np.asarray(self.radial.derivative(s, 2), dtype=float)
        e = np.stack([np.cos(s), np.sin(s)], axis=-1)
        e_perp = np.stack([-np.sin(s), np.cos(s)], axis=-1)
        x = np.asarray(self.center) + r[..., None] * e
        dx = r1[..., None] * e + r[..., None] * e_perp
        ddx = r2[..., None] * e + 2.0 * r1[..., None] * e_perp - r[..., None] * e
        return x, dx, ddx


def circle(radius: float, center=(0.0, 0.0), orientation: int = -1, degree: int = 0) -> RadialCurve:
    return RadialCurve(
        radial=TrigPolynomial.constant(radius, degree),
        center=tuple(center),
        orientation=orientation,
        name=f"circle({radius})",
    )


def outward_normal(curve: ParametricCurve, s):
    """Unit normal pointing out of the annular domain."""
    _, dx, _ = curve.derivatives(s)
    speed = np.linalg.norm(dx, axis=-1)
    if np.any(speed == 0.0):
        raise DegenerateCurveError("parametrization has zero speed")
    n = np.stack([dx[..., 1], -dx[..., 0]], axis=-1) / speed[..., None]
    return curve.orientation * n


def update_radial(curve: RadialCurve, q: TrigPolynomial, nodes=None, min_radius: float = 0.0) -> RadialCurve:
    """Curve with radial function ``r + q``.

    Raises :class:`InvalidUpdateError` if the new radius is not above
    ``min_radius`` (and positive) at every node.
    """
    if nodes is None:
        nodes = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
    if isinstance(curve.radial, TrigPolynomial):
        radial = curve.radial + q
    else:
        radial = _SumRadial(curve.radial, q)
    r_new = np.asarray(radial(nodes))
    if np.any(r_new <= max(min_radius, 0.0)):
        raise InvalidUpdateError(f"updated radius reaches {r_new.min():.3g} <= {min_radius}")
    return RadialCurve(radial=radial, center=curve.center, orientation=curve.orientation, name=curve.name)


def damped_update(curve: RadialCurve, q: TrigPolynomial, nodes=None,
                  min_radius: float = MIN_RADIUS, max_halvings: int = MAX_HALVINGS):
    """Apply ``q`` scaled by the largest ``2**-k`` keeping the radius above ``min_radius``.

    Returns ``(new_curve, factor)``.
    """
    factor = 1.0
    for _ in range(max_halvings + 1):
        try:
            return update_radial(curve, factor * q, nodes, min_radius), factor
        except InvalidUpdateError:
            factor *= 0.5
    raise InvalidUpdateError(f"no admissible step after {max_halvings} halvings")


class _SumRadial:
    def __init__(self, base, q):
        self.base, self.q = base, q

    def derivative(self, s, order=1):
        return np.asarray(self.base.derivative(s, order)) + np.asarray(self.q.derivative(s, order))

    def __call__(self, s):
        return self.derivative(s, 0)


EXAMPLE_CURVES = ("rounded_rectangle", "unit_circle", "apple_inner", "apple_outer", "circle")


def make_example_curve(name: str, radius: float = 1.0, scale: float = 1.0,
                       orientation: int | None = None) -> RadialCurve:
    """Build one of the named test curves.

    ``rounded_rectangle`` takes a ``scale`` on its radial function and
    ``circle`` a ``radius``. Cavity curves default to ``orientation=-1``.
    """
    if name == "rounded_rectangle":
        radial, center, default = RoundedRectangleRadial(scale), (0.0, 0.0), -1
    elif name == "unit_circle":
        radial, center, default = TrigPolynomial.constant(1.0), (0.0, 0.0), 1
    elif name == "circle":
        radial, center, default = TrigPolynomial.constant(radius), (0.0, 0.0), -1
    elif name == "apple_inner":
        radial, center, default = AppleRadial(0.45, 0.3, -0.1, 1.2, 0.9), (0.0, 0.0), -1
    elif name == "apple_outer":
        radial, center, default = AppleRadial(1.0, 0.9, 0.1, 0.8, 0.6), (-0.4, 0.0), 1
    else:
        raise ValueError(f"unknown example curve {name!r}; choose from {EXAMPLE_CURVES}")
    return RadialCurve(
        radial=radial,
        center=center,
        orientation=default if orientation is None else orientation,
        name=name,
    )


def sample_curve(curve: ParametricCurve, n: int = 256):
    s = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return s, curve.point(s)


def hausdorff_distance(curve_a: ParametricCurve, curve_b: ParametricCurve, n: int = 1024) -> float:
    """Hausdorff distance between two closed curves sampled with ``n`` points each."""
    _, a = sample_curve(curve_a, n)
    _, b = sample_curve(curve_b, n)
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def max_radial_error(curve_a: RadialCurve, curve_b: RadialCurve, n: int = 1024) -> float:
    s = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return float(np.max(np.abs(np.asarray(curve_a.radial(s)) - np.asarray(curve_b.radial(s)))))


def point_in_curve(curve: ParametricCurve, points, n: int = 2048) -> np.ndarray:
    """Even-odd point-in-polygon test against a dense polygonal sampling of ``curve``."""
    _, poly = sample_curve(curve, n)
    pts = np.atleast_2d(points)
    x, y = pts[:, 0][:, None], pts[:, 1][:, None]
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    crosses = ((y0 > y) != (y1 > y)) & (x < (x1 - x0) * (y - y0) / (y1 - y0 + 1e-300) + x0)
    return np.count_nonzero(crosses, axis=1) % 2 == 1
