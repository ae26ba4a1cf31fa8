"""Laguerre-transform boundary integral solvers for a cavity inside a bounded domain.

Direct problem: Dirichlet data on both boundary curves to Cauchy data on the
exterior curve. Inverse problem: recover the cavity from Cauchy data by an
iterative scheme with Tikhonov-regularized radial updates.
"""

from .forward import CauchyData, DensitySequence, SolverError, simulate_cauchy_data
from .fundamental import FundamentalSequence
from .geometry import RadialCurve, TrigPolynomial, make_example_curve
from .inverse import InverseConfig, ReconstructionResult, reconstruct
from .kernels import KernelContext
from .laguerre import LaguerreParams
from .quadrature import QuadratureGrid

__version__ = "0.1.0"

__all__ = [
    "CauchyData",
    "DensitySequence",
    "FundamentalSequence",
    "InverseConfig",
    "KernelContext",
    "LaguerreParams",
    "QuadratureGrid",
    "RadialCurve",
    "ReconstructionResult",
    "SolverError",
    "TrigPolynomial",
    "make_example_curve",
    "reconstruct",
    "simulate_cauchy_data",
]
