"""Command-line front end: ``simulate``, ``invert`` and ``full`` runs.

Exit status: 0 when the reconstruction converged (or simulation finished),
2 when the iteration limit was reached, 1 on any error.
"""

import argparse
import logging
from dataclasses import replace
from pathlib import Path
import sys

import numpy as np

from .config import ConfigError, RunConfig, resolve, write_config
from .data_io import DataFormatError, read_cauchy_csv, write_cauchy_csv, write_curve_csv, write_history_csv
from .forward import CauchyData, SolverError, add_noise, example_exterior_data, simulate_cauchy_data
from .fundamental import FundamentalSequence
from .geometry import circle, hausdorff_distance
from .inverse import CONVERGED, MAX_ITERATIONS, ReconstructionResult, reconstruct
from .kernels import KernelContext
from .plotting import write_overlay_svg
from .quadrature import QuadratureGrid

logger = logging.getLogger("laguerre_bie")

EXIT_OK, EXIT_ERROR, EXIT_MAX_ITER = 0, 1, 2
DATA_FILE = "cauchy_data.csv"


def exterior_data(config: RunConfig, n_nodes: int) -> np.ndarray:
    """Constant Dirichlet coefficients on the exterior curve, shape (N+1, n_nodes)."""
    values = [example_exterior_data(n, config.kappa) for n in range(config.N + 1)]
    return np.repeat(np.array(values)[:, None], n_nodes, axis=1)


def simulate(config: RunConfig) -> CauchyData:
    """Cauchy data on the exterior curve for a sound-soft cavity (u_n = 0 on the cavity).

    Solved on ``M_forward`` nodes and restricted to ``M`` nodes, then perturbed by noise.
    """
    fs = FundamentalSequence(config.laguerre_params())
    ctx = KernelContext(fs, config.inner_curve(), config.outer_curve(), QuadratureGrid(config.M_forward))
    f2 = exterior_data(config, config.M_forward)
    data = simulate_cauchy_data(ctx, np.zeros_like(f2), f2, config.M)
    return add_noise(data, config.noise, config.seed, perturb_g=config.noise_on_g)


def invert(config: RunConfig, data: CauchyData, callback=None) -> ReconstructionResult:
    fs = FundamentalSequence(config.laguerre_params())
    return reconstruct(config.inverse_config(), data, config.outer_curve(), fs,
                       QuadratureGrid(data.n_nodes), callback=callback)


def _config_from_data(config: RunConfig, data: CauchyData, params) -> RunConfig:
    """Laguerre parameters and grid size are taken from the data file header."""
    updates = dict(kappa=params.kappa, wave_speed=params.wave_speed, N=params.N, M=data.n_nodes,
                   noise=data.noise_level)
    if data.seed is not None:
        updates["seed"] = data.seed
    for key, value in updates.items():
        if getattr(config, key) != value:
            logger.info("using %s = %s from the data file", key, value)
    return replace(config, M_forward=max(config.M_forward, data.n_nodes), **updates)


def write_reconstruction(config: RunConfig, result: ReconstructionResult, out: Path) -> None:
    write_curve_csv(out / "reconstruction.csv", result.curve)
    write_history_csv(out / "history.csv", result.history)
    outer, inner = config.outer_curve(), config.inner_curve()
    write_curve_csv(out / "exterior.csv", outer)
    write_curve_csv(out / "true_cavity.csv", inner)
    title = f"{config.example}, noise {config.noise:g}: {result.status} after {result.iterations} iterations"
    write_overlay_svg(out / "overlay.svg", outer, result.curve, inner, circle(config.r0), title)
    (out / "status.txt").write_text(
        f"status = {result.status}\niterations = {result.iterations}\n"
        f"hausdorff_to_true_cavity = {hausdorff_distance(result.curve, inner)!r}\n"
        f"message = {result.message}\n")


def _exit_code(result: ReconstructionResult) -> int:
    if result.status == CONVERGED:
        return EXIT_OK
    if result.status == MAX_ITERATIONS:
        return EXIT_MAX_ITER
    return EXIT_ERROR


def run(config: RunConfig, data_path=None) -> int:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    if config.mode in ("simulate", "full"):
        data = simulate(config)
        path = write_cauchy_csv(out / DATA_FILE, data, config.laguerre_params())
        print(f"wrote {path}")
        if config.mode == "simulate":
            write_config(out / "resolved_config.ini", config)
            return EXIT_OK
    if config.mode == "invert":
        data, params = read_cauchy_csv(data_path or out / DATA_FILE)
        config = _config_from_data(config, data, params)
    write_config(out / "resolved_config.ini", config)

    def report(rec, curve):
        logger.info("iteration %d: residual %.4e, update %.4e", rec.iteration, rec.residual, rec.update_norm)

    result = invert(config, data, callback=report)
    write_reconstruction(config, result, out)
    print(f"status: {result.status} after {result.iterations} iterations ({result.message})")
    print(f"hausdorff distance to true cavity: {hausdorff_distance(result.curve, config.inner_curve()):.4f}")
    print(f"outputs in {out}")
    return _exit_code(result)


def _example(value: str) -> str:
    aliases = {"1": "example1", "2": "example2"}
    return aliases.get(value, value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="laguerre-bie",
        description="Cavity reconstruction from time-domain Cauchy data (Laguerre + boundary integrals).")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--example", type=_example, help="preset: 1, 2 (or example1, example2, custom)")
    common.add_argument("--noise", type=float, help="relative noise level, e.g. 0.03")
    common.add_argument("--seed", type=int, help="noise seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("--lambda", dest="reg_lambda", type=float, help="initial regularization parameter")
    common.add_argument("--iterations", dest="max_iterations", type=int, help="maximum iterations")
    common.add_argument("-J", dest="J", type=int, help="degree of the radial trig polynomial")
    common.add_argument("-M", dest="M", type=int, help="total quadrature nodes of the inverse grid")
    common.add_argument("-N", dest="N", type=int, help="highest Laguerre index")
    common.add_argument("-v", "--verbose", action="store_true", help="log every iteration")
    sub = parser.add_subparsers(dest="mode", required=True)
    sub.add_parser("simulate", parents=[common], help="simulate Cauchy data and write the data CSV")
    inv = sub.add_parser("invert", parents=[common], help="reconstruct the cavity from a data CSV")
    inv.add_argument("--data", help=f"Cauchy data CSV (default: <out>/{DATA_FILE})")
    sub.add_parser("full", parents=[common], help="simulate, then reconstruct")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {key: getattr(args, key) for key in
                 ("mode", "example", "noise", "seed", "out", "reg_lambda", "max_iterations", "J", "M", "N")}
    try:
        config = resolve(args.config, overrides)
        if overrides["M"] is not None and config.M_forward < 2 * config.M:
            config = replace(config, M_forward=2 * config.M)
        return run(config, getattr(args, "data", None))
    except (ConfigError, DataFormatError, SolverError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
