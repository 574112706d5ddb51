"""CSV/JSON serialization with deterministic formatting.

All floats are written with 17 significant digits so that re-running a
manifest reproduces outputs byte-identically; JSON objects are written with
sorted keys for the same reason.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .field import CorrelationEstimate, FieldRealization
from .master import DensityMatrix
from .montecarlo import CoherenceEstimate


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_json(path, obj):
    with Path(path).open("w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with Path(path).open() as fh:
        return json.load(fh)


def realization_to_csv(realization: FieldRealization, path, time_unit: str = "1"):
    times = realization.grid.times()
    write_csv(path, [f"t[{time_unit}]", "xi_plus[1]", "xi_minus[1]"],
              zip(times, realization.xi_plus, realization.xi_minus))


def correlation_to_csv(estimate: CorrelationEstimate, path, time_unit: str = "1"):
    rows = []
    for key in ("plus", "minus", "cross"):
        for lag, est, err in zip(estimate.lags, estimate.estimates[key],
                                 estimate.stderrs[key]):
            rows.append((lag, key, est, err))
    write_csv(path, [f"lag[{time_unit}]", "stream", "estimate[1]", "stderr[1]"], rows)


def moments_to_csv(moments, path):
    write_csv(path, ["order", "estimate[1]", "stderr[1]"], moments)


def coherence_to_csv(estimate: CoherenceEstimate, path,
                     length_unit: str = "1", time_unit: str = "1"):
    rows = [(estimate.delta_x, r.t, r.mean.real, r.mean.imag, r.stderr, r.n_samples)
            for r in estimate.records]
    write_csv(path, [f"delta_x[{length_unit}]", f"T[{time_unit}]",
                     "re_mean[1]", "im_mean[1]", "stderr[1]", "n_samples"], rows)


def density_matrix_to_json(rho: DensityMatrix, path):
    obj = {
        "grid": {"n": rho.n, "dx": rho.dx, "x0": float(rho.x_grid[0])},
        "entries": [[float(v.real), float(v.imag)]
                    for v in rho.entries.reshape(-1)],
    }
    write_json(path, obj)


def density_matrix_from_json(path) -> DensityMatrix:
    obj = read_json(path)
    grid = obj["grid"]
    n = int(grid["n"])
    x = grid["x0"] + grid["dx"] * np.arange(n)
    flat = np.asarray(obj["entries"], dtype=float)
    if flat.shape != (n * n, 2):
        raise ValueError("entries must hold n*n [re, im] pairs in row-major order")
    entries = (flat[:, 0] + 1j * flat[:, 1]).reshape(n, n)
    return DensityMatrix(x_grid=x, entries=entries)


def density_matrix_to_csv(rho: DensityMatrix, path, length_unit: str = "1"):
    rows = []
    for i, xi in enumerate(rho.x_grid):
        for j, xj in enumerate(rho.x_grid):
            v = rho.entries[i, j]
            rows.append((xi, xj, v.real, v.imag))
    write_csv(path, [f"x_i[{length_unit}]", f"x_j[{length_unit}]",
                     "re[1]", "im[1]"], rows)


def density_matrix_from_csv(path) -> DensityMatrix:
    with Path(path).open() as fh:
        reader = csv.reader(fh)
        next(reader)  # header
        rows = [(float(a), float(b), float(c), float(d)) for a, b, c, d in reader]
    xs = sorted({r[0] for r in rows})
    n = len(xs)
    if len(rows) != n * n:
        raise ValueError("matrix CSV must contain one row per (x_i, x_j) pair")
    index = {x: i for i, x in enumerate(xs)}
    entries = np.zeros((n, n), dtype=complex)
    for xi, xj, re, im in rows:
        entries[index[xi], index[xj]] = re + 1j * im
    return DensityMatrix(x_grid=np.asarray(xs), entries=entries)
