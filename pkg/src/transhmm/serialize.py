"""File formats: series CSV/binary, density and fit JSON, trace CSV.

CSV floats are written with ``repr`` (shortest round-trip form). The binary
series format is little-endian: u64 count, that many f64 y values, u64 count
(0 when absent), that many f64 x values.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .simulate import TimeSeries

_BIN_MAGIC = b"THMM"


def write_series_csv(path: str | Path, series: TimeSeries) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if series.x is None:
            writer.writerow(["k", "y"])
            for k, v in enumerate(series.y, start=1):
                writer.writerow([k, repr(float(v))])
        else:
            writer.writerow(["k", "y", "x"])
            for k, (v, w) in enumerate(zip(series.y, series.x), start=1):
                writer.writerow([k, repr(float(v)), repr(float(w))])


def read_series_csv(path: str | Path) -> TimeSeries:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["k", "y"]:
            raise ValueError(f"unexpected series CSV header: {header}")
        has_x = len(header) >= 3 and header[2] == "x"
        ys: list[float] = []
        xs: list[float] = []
        for row in reader:
            if not row:
                continue
            ys.append(float(row[1]))
            if has_x:
                xs.append(float(row[2]))
    return TimeSeries(
        y=np.array(ys), x=np.array(xs) if has_x else None
    )


def write_series_bin(path: str | Path, series: TimeSeries) -> None:
    with open(path, "wb") as fh:
        fh.write(_BIN_MAGIC)
        fh.write(struct.pack("<Q", series.n))
        fh.write(np.ascontiguousarray(series.y, dtype="<f8").tobytes())
        if series.x is None:
            fh.write(struct.pack("<Q", 0))
        else:
            fh.write(struct.pack("<Q", series.n))
            fh.write(np.ascontiguousarray(series.x, dtype="<f8").tobytes())


def read_series_bin(path: str | Path) -> TimeSeries:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _BIN_MAGIC:
            raise ValueError("not a series binary file")
        (ny,) = struct.unpack("<Q", fh.read(8))
        y = np.frombuffer(fh.read(8 * ny), dtype="<f8").copy()
        (nx,) = struct.unpack("<Q", fh.read(8))
        x = None
        if nx:
            if nx != ny:
                raise ValueError("x and y lengths differ in binary file")
            x = np.frombuffer(fh.read(8 * nx), dtype="<f8").copy()
    return TimeSeries(y=y, x=x)


def read_series(path: str | Path) -> TimeSeries:
    """Dispatch on extension: .csv or binary otherwise."""
    if str(path).endswith(".csv"):
        return read_series_csv(path)
    return read_series_bin(path)


def write_series(path: str | Path, series: TimeSeries) -> None:
    if str(path).endswith(".csv"):
        write_series_csv(path, series)
    else:
        write_series_bin(path, series)


def density_to_dict(density) -> dict:
    out = {"r": density.r, "p": [float(v) for v in density.p.ravel()]}
    if density.offset != (0.0, 0.0):
        out["offset"] = [density.offset[0], density.offset[1]]
    return out


def density_from_dict(d: dict):
    from .charfn import GridDensity2D

    r = int(d["r"])
    p = np.array(d["p"], dtype=np.float64).reshape(r, r)
    off = d.get("offset", (0.0, 0.0))
    return GridDensity2D(r=r, p=p, offset=(float(off[0]), float(off[1])))


def params_to_dict(params) -> dict:
    return {
        "support": [float(v) for v in params.support],
        "Q": [float(v) for v in params.Q.ravel()],
        "mixture": {
            "weights": [float(v) for v in params.noise.weights],
            "means": [float(v) for v in params.noise.means],
            "stds": [float(v) for v in params.noise.stds],
        },
    }


def params_from_dict(d: dict):
    from .mle import GaussianMixture, HmmParams

    support = np.array(d["support"], dtype=np.float64)
    r = support.shape[0]
    mix = d["mixture"]
    return HmmParams(
        support=support,
        Q=np.array(d["Q"], dtype=np.float64).reshape(r, r),
        noise=GaussianMixture(
            weights=np.array(mix["weights"], dtype=np.float64),
            means=np.array(mix["means"], dtype=np.float64),
            stds=np.array(mix["stds"], dtype=np.float64),
        ),
    )


def write_json(path: str | Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def read_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_trace_csv(path: str | Path, trace) -> None:
    """Optimizer trace rows: (generation, evals, best_value)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "evals", "best_value"])
        for gen, evals, best in trace:
            writer.writerow([gen, evals, repr(float(best))])
