import warnings

import numpy as np
import pytest

from laguerre_bie.cli import exterior_data
from laguerre_bie.config import RunConfig, resolve
from laguerre_bie.forward import add_noise, simulate_cauchy_data
from laguerre_bie.fundamental import FundamentalSequence
from laguerre_bie.geometry import make_example_curve
from laguerre_bie.inverse import reconstruct
from laguerre_bie.kernels import KernelContext
from laguerre_bie.laguerre import LaguerreParams
from laguerre_bie.quadrature import QuadratureGrid

NOISE_SEED = 7

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def params():
    return LaguerreParams(kappa=1.0, wave_speed=1.0, n_terms=11)


@pytest.fixture(scope="session")
def fs(params):
    return FundamentalSequence(params)


@pytest.fixture(scope="session")
def unit_circle():
    return make_example_curve("unit_circle")


@pytest.fixture(scope="session")
def rect_cavity():
    """Cavity of the first example run (rounded rectangle at half size)."""
    return make_example_curve("rounded_rectangle", scale=0.5)


def example_run(example: str, noise: float):
    config = resolve(None, {"example": example, "noise": noise, "seed": NOISE_SEED})
    fs = FundamentalSequence(config.laguerre_params())
    inner, outer = config.inner_curve(), config.outer_curve()
    ctx = KernelContext(fs, inner, outer, QuadratureGrid(config.M_forward))
    f2 = exterior_data(config, config.M_forward)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        data = simulate_cauchy_data(ctx, np.zeros_like(f2), f2, config.M)
    data = add_noise(data, noise, NOISE_SEED)
    result = reconstruct(config.inverse_config(), data, outer, fs, QuadratureGrid(config.M))
    return config, inner, data, result


@pytest.fixture(scope="session")
def example1_exact():
    return example_run("example1", 0.0)


@pytest.fixture(scope="session")
def example1_noisy():
    return example_run("example1", 0.03)


@pytest.fixture(scope="session")
def example2_exact():
    return example_run("example2", 0.0)


@pytest.fixture(scope="session")
def example2_noisy():
    return example_run("example2", 0.03)


@pytest.fixture
def default_config():
    return RunConfig()
