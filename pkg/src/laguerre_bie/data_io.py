"""CSV import/export for Cauchy data, curves and iteration histories.

Floats are written with ``repr`` (shortest round-trip form), so files are
byte-stable for identical inputs and read back exactly.
"""

import csv
from pathlib import Path

import numpy as np

from .forward import CauchyData
from .geometry import ParametricCurve, sample_curve
from .laguerre import LaguerreParams

CAUCHY_COLUMNS = ("n", "node_index", "s", "f_value", "g_value")
CURVE_COLUMNS = ("s", "x1", "x2")
_HEADER_KEYS = ("kappa", "wave_speed", "N", "M_total", "noise", "seed")


class DataFormatError(ValueError):
    """Malformed CSV input."""


def _fmt(x) -> str:
    return repr(float(x))


def write_cauchy_csv(path, data: CauchyData, params: LaguerreParams) -> Path:
    """Write ``data`` as rows ``n, node_index, s, f_value, g_value`` with a ``# key=value`` header."""
    path = Path(path)
    header = {
        "kappa": _fmt(params.kappa),
        "wave_speed": _fmt(params.wave_speed),
        "N": str(data.n_terms - 1),
        "M_total": str(data.n_nodes),
        "noise": _fmt(data.noise_level),
        "seed": "none" if data.seed is None else str(int(data.seed)),
    }
    with path.open("w", newline="") as fh:
        for key in _HEADER_KEYS:
            fh.write(f"# {key}={header[key]}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CAUCHY_COLUMNS)
        for n in range(data.n_terms):
            for k in range(data.n_nodes):
                writer.writerow([n, k, _fmt(data.s[k]), _fmt(data.f[n, k]), _fmt(data.g[n, k])])
    return path


def read_cauchy_csv(path):
    """Inverse of :func:`write_cauchy_csv`; returns ``(CauchyData, LaguerreParams)``."""
    path = Path(path)
    header, rows = {}, []
    with path.open(newline="") as fh:
        lines = fh.read().splitlines()
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        key, sep, value = line[1:].strip().partition("=")
        if not sep:
            raise DataFormatError(f"{path}:{i + 1}: header line must be '# key=value'")
        header[key.strip()] = value.strip()
    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise DataFormatError(f"{path}: missing header keys {missing}")
    reader = csv.reader(lines[body_start:])
    columns = tuple(next(reader, ()))
    if columns != CAUCHY_COLUMNS:
        raise DataFormatError(f"{path}: expected columns {CAUCHY_COLUMNS}, got {columns}")
    for lineno, row in enumerate(reader, start=body_start + 2):
        try:
            rows.append((int(row[0]), int(row[1]), float(row[2]), float(row[3]), float(row[4])))
        except (ValueError, IndexError) as exc:
            raise DataFormatError(f"{path}:{lineno}: {exc}") from None
    try:
        n_terms, M = int(header["N"]) + 1, int(header["M_total"])
        params = LaguerreParams(kappa=float(header["kappa"]), wave_speed=float(header["wave_speed"]),
                                n_terms=n_terms)
        noise = float(header["noise"])
        seed = None if header["seed"] == "none" else int(header["seed"])
    except ValueError as exc:
        raise DataFormatError(f"{path}: bad header value: {exc}") from None
    if len(rows) != n_terms * M:
        raise DataFormatError(f"{path}: expected {n_terms * M} rows, found {len(rows)}")
    f = np.empty((n_terms, M))
    g = np.empty((n_terms, M))
    s = np.empty(M)
    seen = np.zeros((n_terms, M), dtype=bool)
    for n, k, sk, fv, gv in rows:
        if not (0 <= n < n_terms and 0 <= k < M) or seen[n, k]:
            raise DataFormatError(f"{path}: invalid or duplicate index (n={n}, node_index={k})")
        seen[n, k] = True
        f[n, k], g[n, k], s[k] = fv, gv, sk
    data = CauchyData(f=f, g=g, s=s, noise_level=noise, seed=seed, meta=dict(header))
    return data, params


def write_curve_csv(path, curve: ParametricCurve, n: int = 256) -> Path:
    """Sample ``curve`` at ``n`` equispaced parameters; columns ``s, x1, x2``."""
    path = Path(path)
    s, pts = sample_curve(curve, n)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVE_COLUMNS)
        for sk, (x1, x2) in zip(s, pts):
            writer.writerow([_fmt(sk), _fmt(x1), _fmt(x2)])
    return path


def read_curve_csv(path):
    """Returns ``(s, points)`` with points of shape (n, 2)."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        columns = tuple(next(reader, ()))
        if columns != CURVE_COLUMNS:
            raise DataFormatError(f"{path}: expected columns {CURVE_COLUMNS}, got {columns}")
        values = np.array([[float(v) for v in row] for row in reader])
    return values[:, 0], values[:, 1:]


def write_history_csv(path, history) -> Path:
    """One row per iteration: ``iteration, lambda, residual, update_norm, step_factor, q_0..``.

    ``q_j`` are the coefficients of the accepted update in the basis
    1, cos s, ..., cos Js, sin s, ..., sin Js.
    """
    path = Path(path)
    n_coef = max((len(rec.update) for rec in history), default=0)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "lambda", "residual", "update_norm", "step_factor"]
                        + [f"q_{j}" for j in range(n_coef)])
        for rec in history:
            writer.writerow([rec.iteration, _fmt(rec.reg_lambda), _fmt(rec.residual),
                             _fmt(rec.update_norm), _fmt(rec.step_factor)]
                            + [_fmt(c) for c in rec.update])
    return path
