"""Binned empirical densities and the two goodness-of-fit measures.

``weighted_rmse`` is the discrete form of

    sqrt( integral f_meas(x) * (f_model(x) - f_meas(x))**2 dx )

and ``kl_divergence`` is ``sum p_i * ln(p_i / q_i) * dx`` over bins with
``p_i > 0``. KL is reported raw (not clipped to [0, 1]).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyHistogramError, IncompatibleGridsError, ParameterError
from .trace import NoiseTrace

KL_FLOOR = 1e-12
DEFAULT_BINS = 401
DEFAULT_SPAN_SD = 8.0


@dataclass(frozen=True)
class EmpiricalPdf:
    edges: np.ndarray
    density: np.ndarray
    n_samples: int
    clipped_fraction: float = 0.0

    @property
    def dx(self) -> float:
        return float(self.edges[1] - self.edges[0])

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def same_grid(self, other: "EmpiricalPdf") -> bool:
        return self.edges.shape == other.edges.shape and np.allclose(
            self.edges, other.edges, rtol=0.0, atol=1e-12 * max(1.0, np.abs(self.edges).max())
        )

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["bin_center", "density"])
            for c, d in zip(self.centers, self.density):
                w.writerow([repr(float(c)), repr(float(d))])


def _samples(trace) -> np.ndarray:
    if isinstance(trace, NoiseTrace):
        return trace.samples
    return np.asarray(trace, dtype=np.float64).ravel()


def empirical_pdf(trace, bins: int = DEFAULT_BINS, range: tuple[float, float] | None = None) -> EmpiricalPdf:
    """Normalized histogram with tail-preserving clipping.

    Samples outside ``range`` are counted in the first/last bin rather than
    dropped; ``clipped_fraction`` reports how many were moved. Without an
    explicit ``range`` the span is +/- 8 sample standard deviations.
    """
    x = _samples(trace)
    if x.size == 0:
        raise ParameterError("trace is empty")
    if bins < 10:
        raise ParameterError(f"need at least 10 bins, got {bins}")
    if range is None:
        range = default_range(x)
    lo, hi = float(range[0]), float(range[1])
    if not lo < hi:
        raise ParameterError(f"empty range ({lo}, {hi})")

    inside = (x >= lo) & (x <= hi)
    if not inside.any():
        raise EmptyHistogramError(f"no sample falls in [{lo}, {hi}]")
    edges = np.linspace(lo, hi, bins + 1)
    clipped = np.clip(x, lo, hi)
    counts, _ = np.histogram(clipped, bins=edges)
    dx = (hi - lo) / bins
    density = counts / (x.size * dx)
    return EmpiricalPdf(edges, density, int(x.size), float(1.0 - inside.mean()))


def default_range(x, span_sd: float = DEFAULT_SPAN_SD) -> tuple[float, float]:
    sd = float(np.std(_samples(x)))
    if sd == 0.0:
        sd = 1.0
    return (-span_sd * sd, span_sd * sd)


# 5-point Gauss-Legendre nodes/weights on [-1/2, 1/2], weights summing to 1
_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)
_GL_X, _GL_W = 0.5 * _GL_X, 0.5 * _GL_W


def _model_density(f_meas: EmpiricalPdf, f_model, at: str) -> np.ndarray:
    if isinstance(f_model, EmpiricalPdf):
        if not f_meas.same_grid(f_model):
            raise IncompatibleGridsError("densities live on different bin grids")
        return f_model.density
    c = f_meas.centers
    if at == "center":
        return np.asarray(f_model(c), dtype=np.float64)
    if at == "bin_average":
        pts = c[:, None] + f_meas.dx * _GL_X[None, :]
        vals = np.asarray(f_model(pts.ravel()), dtype=np.float64).reshape(pts.shape)
        return vals @ _GL_W
    raise ParameterError(f"unknown evaluation mode {at!r}")


def weighted_rmse(f_meas: EmpiricalPdf, f_model, at: str = "center") -> float:
    """Density-weighted RMS gap between a measured and a model density.

    ``f_model`` is either another ``EmpiricalPdf`` on the same grid or a
    callable. A callable is evaluated at ``f_meas``'s bin centres, or, with
    ``at="bin_average"``, averaged over each bin, which is what a histogram
    estimates and removes the O(dx**2) centre-point bias.
    """
    fm = f_meas.density
    fo = _model_density(f_meas, f_model, at)
    return float(np.sqrt(np.sum(fm * (fo - fm) ** 2) * f_meas.dx))


def kl_divergence(p: EmpiricalPdf, q: EmpiricalPdf, floor: float = KL_FLOOR) -> float:
    if not p.same_grid(q):
        raise IncompatibleGridsError("densities live on different bin grids")
    mask = p.density > 0
    pi = p.density[mask]
    qi = np.maximum(q.density[mask], floor)
    return float(max(np.sum(pi * np.log(pi / qi)) * p.dx, 0.0))
