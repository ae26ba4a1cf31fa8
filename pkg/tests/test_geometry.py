import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from laguerre_bie.geometry import (
    EXAMPLE_CURVES,
    DegenerateCurveError,
    InvalidUpdateError,
    ParametricCurve,
    TrigPolynomial,
    circle,
    damped_update,
    eval_trig,
    hausdorff_distance,
    make_example_curve,
    max_radial_error,
    outward_normal,
    point_in_curve,
    trig_basis,
    update_radial,
)

ALL_CURVES = [make_example_curve(n) for n in EXAMPLE_CURVES] + [
    make_example_curve("rounded_rectangle", scale=0.5),
    circle(0.7, center=(0.1, -0.2), degree=3),
]


def test_example_curve_values():
    x = make_example_curve("rounded_rectangle").point(0.0)
    assert np.allclose(x, [1.0, 0.0], atol=1e-15)
    x = make_example_curve("apple_inner").point(0.0)
    assert np.allclose(x, [0.75 / 2.1, 0.0], atol=1e-15)
    x = make_example_curve("apple_outer").point(np.pi)
    assert np.allclose(x, [-0.9, 0.0], atol=1e-14)


def test_unknown_curve():
    with pytest.raises(ValueError):
        make_example_curve("triangle")


def test_normals_on_unit_circle():
    c = make_example_curve("unit_circle")
    assert np.allclose(outward_normal(c, 0.0), [1.0, 0.0], atol=1e-15)
    assert np.allclose(outward_normal(c, np.pi / 2), [0.0, 1.0], atol=1e-15)


def test_apple_normal_matches_fd_tangent():
    c = make_example_curve("apple_outer")
    h = 1e-6
    t = (c.point(h) - c.point(-h)) / (2 * h)
    rotated = np.array([t[1], -t[0]]) / np.linalg.norm(t)
    assert np.allclose(outward_normal(c, 0.0), rotated, atol=1e-8)


def test_normal_orientation_by_flux():
    """sum of x.nu ds is positive on the exterior curve and negative on the cavity."""
    s = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    for outer_name, inner_name in (("unit_circle", "rounded_rectangle"), ("apple_outer", "apple_inner")):
        for name, sign in ((outer_name, 1), (inner_name, -1)):
            c = make_example_curve(name)
            x, dx, _ = c.derivatives(s)
            flux = np.sum(np.sum((x - np.asarray(c.center)) * outward_normal(c, s), axis=1)
                          * np.linalg.norm(dx, axis=1))
            assert np.sign(flux) == sign


def test_degenerate_normal():
    c = ParametricCurve(lambda s: (np.zeros(np.shape(s) + (2,)),) * 3)
    with pytest.raises(DegenerateCurveError):
        outward_normal(c, 0.3)


@pytest.mark.parametrize("curve", ALL_CURVES, ids=lambda c: c.name)
def test_analytic_derivatives_match_fd(curve):
    rng = np.random.default_rng(1)
    s = rng.uniform(0, 2 * np.pi, 32)
    h = 1e-5
    x, dx, ddx = curve.derivatives(s)
    xp, dxp, _ = curve.derivatives(s + h)
    xm, dxm, _ = curve.derivatives(s - h)
    assert np.max(np.abs((xp - xm) / (2 * h) - dx)) <= 1e-8 * max(1.0, np.abs(dx).max())
    assert np.max(np.abs((dxp - dxm) / (2 * h) - ddx)) <= 1e-8 * max(1.0, np.abs(ddx).max())


def test_inner_curves_inside_outer():
    pairs = [(make_example_curve("rounded_rectangle", scale=0.5), make_example_curve("unit_circle")),
             (make_example_curve("apple_inner"), make_example_curve("apple_outer"))]
    s = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    for inner, outer in pairs:
        assert np.all(point_in_curve(outer, inner.point(s)))
        gap = np.min(np.linalg.norm(inner.point(s)[:, None] - outer.point(s)[None], axis=-1))
        assert gap > 0.1


def test_full_size_rectangle_touches_unit_circle():
    rect = make_example_curve("rounded_rectangle")
    assert rect.radial(0.0) == pytest.approx(1.0)
    assert rect.radial(np.pi / 4) > 1.0


def test_eval_trig_basis():
    J = 4
    c = np.zeros(2 * J + 1)
    c[0] = 1
    assert eval_trig(TrigPolynomial(c), 1.234) == 1.0
    c = np.zeros(2 * J + 1)
    c[1] = 1
    assert eval_trig(TrigPolynomial(c), 0.0) == 1.0
    c = np.zeros(2 * J + 1)
    c[J + 1] = 1
    assert eval_trig(TrigPolynomial(c), np.pi / 2) == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=7, max_size=7), st.lists(st.floats(-2, 2), min_size=7, max_size=7),
       st.floats(-3, 3))
def test_eval_trig_linear(a, b, t):
    s = np.linspace(0, 2 * np.pi, 17)
    pa, pb = TrigPolynomial(np.array(a)), TrigPolynomial(np.array(b))
    assert np.allclose((pa * t + pb)(s), t * pa(s) + pb(s), atol=1e-12)


def test_trig_basis_derivatives():
    s = np.linspace(0, 2 * np.pi, 11)
    h = 1e-5
    for order in (1, 2):
        fd = (trig_basis(3, s + h, order - 1) - trig_basis(3, s - h, order - 1)) / (2 * h)
        assert np.allclose(fd, trig_basis(3, s, order), atol=1e-8)


def test_from_samples_projection():
    rng = np.random.default_rng(3)
    c = rng.standard_normal(9)
    s = 2 * np.pi * np.arange(32) / 32
    p = TrigPolynomial.from_samples(TrigPolynomial(c)(s), 4)
    assert np.allclose(p.coeffs, c, atol=1e-13)


def test_l2_norm_parseval():
    p = TrigPolynomial(np.array([0.3, -1.0, 0.5, 2.0, 0.1]))
    s = 2 * np.pi * np.arange(64) / 64
    assert p.l2_norm() == pytest.approx(np.sqrt(2 * np.pi * np.mean(p(s) ** 2)), rel=1e-14)


def test_update_radial():
    c = circle(0.8, degree=2)
    same = update_radial(c, TrigPolynomial.zeros(2))
    s = np.linspace(0, 2 * np.pi, 50)
    assert np.array_equal(same.point(s), c.point(s))
    bigger = update_radial(c, TrigPolynomial.constant(0.2))
    assert np.allclose(bigger.radial(s), 1.0)
    with pytest.raises(InvalidUpdateError):
        update_radial(c, TrigPolynomial.constant(-0.8))


def test_update_towards_unit_circle():
    rect = make_example_curve("rounded_rectangle")
    J = 13
    s = 2 * np.pi * np.arange(256) / 256
    q = TrigPolynomial.from_samples(-(rect.radial(s) - 1.0), J)
    near = update_radial(rect, q)
    dense = np.linspace(0, 2 * np.pi, 2048, endpoint=False)
    # deviation equals the truncation error of the degree-13 projection
    proj = TrigPolynomial.from_samples(rect.radial(s), J)
    assert np.max(np.abs(near.radial(dense) - 1.0)) == pytest.approx(
        np.max(np.abs(rect.radial(dense) - proj(dense))), rel=1e-9)


def test_damped_update_halves_until_positive():
    c = circle(0.8, degree=1)
    q = TrigPolynomial.constant(-1.2, 1)
    new, factor = damped_update(c, q, min_radius=0.05)
    assert factor == 0.5
    assert np.allclose(new.radial(0.0), 0.2)
    with pytest.raises(InvalidUpdateError):
        damped_update(c, TrigPolynomial.constant(-1e9, 1), max_halvings=3)


def test_distances():
    a, b = circle(0.5), circle(0.6)
    assert hausdorff_distance(a, b) == pytest.approx(0.1, abs=1e-12)
    assert max_radial_error(a, b) == pytest.approx(0.1, abs=1e-12)


def test_point_in_curve():
    c = make_example_curve("apple_outer")
    inside = point_in_curve(c, np.array([[0.0, 0.0], [-0.8, 0.0], [3.0, 0.0], [0.0, 2.0]]))
    assert inside.tolist() == [True, True, False, False]
