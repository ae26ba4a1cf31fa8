"""Trigonometric quadrature on equispaced grids of [0, 2pi).

Two rules are provided on the nodes ``s_j = 2 pi j / M`` (``M`` even):

* the periodic trapezoidal rule, and
* the weights ``R_j(s)`` that integrate the logarithmic kernel exactly for
  trigonometric polynomials of degree < M/2::

      (1/2pi) int ln(4 sin^2((s - sigma)/2)) f(sigma) dsigma ~ sum_j R_j(s) f(s_j)
      R_j(s) = -(2/M) sum_{m=1}^{M/2-1} cos(m(s - s_j)) / m - (2/M^2) cos(M/2 (s - s_j))
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import circulant


@dataclass(frozen=True)
class QuadratureGrid:
    """Equispaced grid of ``n_nodes`` points on [0, 2pi)."""

    n_nodes: int
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_nodes < 2 or self.n_nodes % 2:
            raise ValueError(f"n_nodes must be an even integer >= 2, got {self.n_nodes}")
        object.__setattr__(self, "nodes", 2.0 * np.pi * np.arange(self.n_nodes) / self.n_nodes)

    @classmethod
    def from_half(cls, m_half: int) -> "QuadratureGrid":
        """Grid with nodes ``s_j = pi j / m_half``, j = 0..2 m_half - 1."""
        return cls(2 * m_half)

    @property
    def m_half(self) -> int:
        return self.n_nodes // 2

    @property
    def weight(self) -> float:
        """Trapezoid weight for the (1/2pi)-normalized integral."""
        return 1.0 / self.n_nodes


def periodic_trapezoid(values, grid: QuadratureGrid | None = None) -> float:
    """``int_0^{2pi} f`` from samples at the grid nodes."""
    values = np.asarray(values, dtype=float)
    if grid is not None and values.shape[-1] != grid.n_nodes:
        raise ValueError(f"expected {grid.n_nodes} samples, got {values.shape[-1]}")
    return 2.0 * np.pi * values.mean(axis=-1)


def _log_weight_row(n_nodes: int, diff) -> np.ndarray:
    half = n_nodes // 2
    m = np.arange(1, half)
    diff = np.asarray(diff, dtype=float)
    series = np.cos(np.multiply.outer(diff, m)) @ (1.0 / m)
    return -2.0 / n_nodes * series - 2.0 / n_nodes**2 * np.cos(half * diff)


def log_weights(grid: QuadratureGrid, k: int) -> np.ndarray:
    """Weights ``R_j(s_k)``, j = 0..M-1, for collocation node index ``k``."""
    if not (isinstance(k, (int, np.integer)) and 0 <= k < grid.n_nodes):
        raise ValueError(f"collocation point must be a node index in 0..{grid.n_nodes - 1}")
    return _log_weight_row(grid.n_nodes, grid.nodes[k] - grid.nodes)


def log_weight_matrix(grid: QuadratureGrid) -> np.ndarray:
    """Matrix ``R[k, j] = R_j(s_k)``; circulant because it depends on k - j only."""
    first_col = _log_weight_row(grid.n_nodes, grid.nodes)
    return circulant(first_col)
