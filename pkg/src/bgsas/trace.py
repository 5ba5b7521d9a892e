"""Noise trace container and its on-disk formats.

Binary layout: one UTF-8 JSON header line terminated by ``\\n``, followed by
``n`` little-endian float64 samples. CSV export is a single ``amplitude``
column.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import EmptyRequestError, ParameterError


@dataclass(frozen=True)
class NoiseTrace:
    """A finite sequence of real amplitude samples plus how it was made.

    ``source`` names the generating model (``"bg"``, ``"sas"``, ...) and
    ``params`` holds that model's parameters as plain floats.
    """

    samples: np.ndarray
    seed: int
    source: str
    params: dict[str, Any] = field(default_factory=dict)
    sample_rate_hz: float | None = None

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=np.float64)
        if x.ndim != 1:
            raise ParameterError("samples must be one-dimensional")
        if x.size < 1:
            raise EmptyRequestError("a trace holds at least one sample")
        if not np.all(np.isfinite(x)):
            raise ParameterError("trace contains NaN or inf samples")
        object.__setattr__(self, "samples", x)

    def __len__(self) -> int:
        return self.samples.size

    def header(self) -> dict[str, Any]:
        h = {
            "model": self.source,
            "params": self.params,
            "seed": int(self.seed),
            "n": int(self.samples.size),
        }
        if self.sample_rate_hz is not None:
            h["sample_rate_hz"] = float(self.sample_rate_hz)
        return h


def write_trace(trace: NoiseTrace, path: str | Path) -> None:
    header = json.dumps(trace.header(), sort_keys=True)
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8") + b"\n")
        fh.write(trace.samples.astype("<f8").tobytes())


def read_trace(path: str | Path) -> NoiseTrace:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        raw = fh.read()
    samples = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    if samples.size != header["n"]:
        raise ValueError(
            f"header announces {header['n']} samples, file holds {samples.size}"
        )
    return NoiseTrace(
        samples=samples,
        seed=header["seed"],
        source=header["model"],
        params=header.get("params", {}),
        sample_rate_hz=header.get("sample_rate_hz"),
    )


def write_trace_csv(trace: NoiseTrace, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["amplitude"])
        for v in trace.samples:
            w.writerow([repr(float(v))])


def read_trace_csv(path: str | Path, seed: int = 0, source: str = "csv") -> NoiseTrace:
    """Load a single-column CSV (header row optional)."""
    values = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                values.append(float(row[0]))
            except ValueError:
                if values:
                    raise
    return NoiseTrace(np.array(values), seed=seed, source=source)
