import mpmath as mp
import numpy as np
import pytest

from laguerre_bie.quadrature import (
    QuadratureGrid,
    log_weight_matrix,
    log_weights,
    periodic_trapezoid,
)


def test_grid_nodes():
    g = QuadratureGrid(8)
    assert g.m_half == 4
    assert np.allclose(g.nodes, np.pi * np.arange(8) / 4)
    assert QuadratureGrid.from_half(4).n_nodes == 8


@pytest.mark.parametrize("n", [0, 3, 7])
def test_grid_validation(n):
    with pytest.raises(ValueError):
        QuadratureGrid(n)


def test_trapezoid():
    for M in (4, 16, 64):
        g = QuadratureGrid(M)
        assert periodic_trapezoid(np.ones(M), g) == pytest.approx(2 * np.pi, rel=1e-15)
    g = QuadratureGrid(16)
    assert abs(periodic_trapezoid(np.cos(g.nodes), g)) <= 1e-15
    g = QuadratureGrid(32)
    assert periodic_trapezoid(np.exp(np.sin(g.nodes)), g) == pytest.approx(7.95492652101284, abs=1e-13)
    with pytest.raises(ValueError):
        periodic_trapezoid(np.ones(5), g)


def test_log_weights_annihilate_constants():
    g = QuadratureGrid(64)
    R = log_weight_matrix(g)
    assert np.max(np.abs(R.sum(axis=1))) <= 1e-14


@pytest.mark.parametrize("M", [16, 64])
def test_log_weights_fourier_identity(M):
    g = QuadratureGrid(M)
    for k in (0, 5):
        R = log_weights(g, k)
        for m in range(1, M // 2):
            val = R @ np.cos(m * (g.nodes - g.nodes[k]))
            assert val == pytest.approx(-1.0 / m, abs=1e-12)


def test_log_weights_reject_non_nodes():
    g = QuadratureGrid(16)
    for bad in (-1, 16, 0.5):
        with pytest.raises(ValueError):
            log_weights(g, bad)


def test_translation_invariance_and_symmetry():
    g = QuadratureGrid(32)
    R = log_weight_matrix(g)
    for k in range(32):
        assert np.allclose(R[k], np.roll(R[0], k), atol=1e-15)
    assert np.allclose(R, R.T, atol=1e-15)


def test_combined_rule_converges():
    with mp.workdps(30):
        ref = float(mp.quad(lambda s: mp.log(4 * mp.sin(s / 2) ** 2 / mp.e) * mp.e ** mp.cos(s),
                            [0, mp.pi, 2 * mp.pi]) / (2 * mp.pi))
    errs = []
    for M in (32, 64):
        g = QuadratureGrid(M)
        f = np.exp(np.cos(g.nodes))
        approx = log_weights(g, 0) @ f - f.mean()
        errs.append(abs(approx - ref))
    assert errs[1] <= 1e-12
