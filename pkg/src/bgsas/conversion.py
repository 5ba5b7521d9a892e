"""BG to SaS model conversion.

A cell takes a BG process with ``sigma_b = 1`` and a given impulse ratio and
power ratio, normalizes it to unit power, fits SaS by McCulloch's method,
redraws SaS noise with the fitted parameters and scores the fit by the KL
divergence of the two histograms. Sweeping cells over the PLC parameter plane
and fitting quadratic surfaces

    f(x, y) = c00 + c10 x + c01 y + c20 x^2 + c11 x y + c02 y^2,
    x = p,  y = 20 log10(sigma_i / sigma_b)  (= 10 log10 of the power ratio)

gives a closed-form approximate conversion.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .bg_model import BgParams, generate_bg
from .errors import ExtrapolationWarning, ParameterError, SingularFitError
from .estimators import estimate_mcculloch
from .metrics import DEFAULT_BINS, empirical_pdf, kl_divergence
from .sas_model import generate_sas
from .seeding import derive_seed

COEFF_NAMES = ("c00", "c10", "c01", "c20", "c11", "c02")
TARGETS = ("alpha_hat", "gamma_hat")
DOMAIN = {"p": (1e-4, 1e-2), "ratio_db": (10.0, 30.0)}
CELL_COLUMNS = ("p", "ratio_db", "alpha_hat", "gamma_hat", "kl", "n", "seed")


@dataclass(frozen=True)
class ConversionCell:
    p: float
    ratio_db: float
    alpha_hat: float
    gamma_hat: float
    kl: float
    n: int = 0
    seed: int = 0

    def row(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PolySurface:
    c00: float
    c10: float
    c01: float
    c20: float
    c11: float
    c02: float
    target: str
    fit_rmse: float = float("nan")
    domain: dict = field(default_factory=lambda: {k: list(v) for k, v in DOMAIN.items()})

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ParameterError(f"target must be one of {TARGETS}, got {self.target!r}")
        if not all(math.isfinite(c) for c in self.coefficients):
            raise ParameterError("surface coefficients must be finite")

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in COEFF_NAMES])

    def to_record(self) -> dict:
        rec = {"target": self.target, "fit_rmse": self.fit_rmse, "domain": self.domain}
        rec.update({n: float(getattr(self, n)) for n in COEFF_NAMES})
        return rec

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)

    @classmethod
    def from_record(cls, rec: dict) -> "PolySurface":
        kw = {n: float(rec[n]) for n in COEFF_NAMES}
        return cls(target=rec["target"], fit_rmse=float(rec.get("fit_rmse", "nan")),
                   domain=rec.get("domain", {k: list(v) for k, v in DOMAIN.items()}), **kw)


def _design(p, ratio_db) -> np.ndarray:
    x = np.asarray(p, dtype=np.float64)
    y = np.asarray(ratio_db, dtype=np.float64)
    return np.stack([np.ones_like(x), x, y, x * x, x * y, y * y], axis=-1)


def in_domain(p, ratio_db) -> bool:
    (plo, phi), (rlo, rhi) = DOMAIN["p"], DOMAIN["ratio_db"]
    p = np.asarray(p)
    r = np.asarray(ratio_db)
    return bool(np.all((p >= plo) & (p <= phi) & (r >= rlo) & (r <= rhi)))


def poly_eval(surface: PolySurface, p, ratio_db):
    """Evaluate the surface at ``x = p``, ``y = ratio_db`` (dB).

    Points outside the fitted domain are evaluated literally and trigger an
    ``ExtrapolationWarning``.
    """
    if not in_domain(p, ratio_db):
        warnings.warn(
            f"({p}, {ratio_db} dB) lies outside the fitted domain {DOMAIN}",
            ExtrapolationWarning,
            stacklevel=2,
        )
    out = _design(p, ratio_db) @ surface.coefficients
    return float(out) if np.ndim(out) == 0 else out


def builtin_table2() -> tuple[PolySurface, PolySurface]:
    """Reference (2,2) conversion surfaces for alpha_hat and gamma_hat, coefficients as tabulated."""
    alpha = PolySurface(
        c00=2.005, c10=-1.457, c01=-5.575e-4, c20=-40.36, c11=-0.1128, c02=1.426e-5,
        target="alpha_hat", fit_rmse=1.715e-3,
    )
    gamma = PolySurface(
        c00=0.5779, c10=6.256, c01=0.01707, c20=2123.0, c11=-2.43, c02=-5.249e-4,
        target="gamma_hat", fit_rmse=2.433e-2,
    )
    return alpha, gamma


def convert_cell(
    p: float,
    ratio_db: float,
    n: int,
    seed: int,
    normalize: str = "sample",
    bins: int = DEFAULT_BINS,
    span_sd: float = 8.0,
) -> ConversionCell:
    """Fit SaS to one power-normalized BG process and score the fit.

    ``normalize="sample"`` divides by the sample RMS, ``"analytic"`` by
    ``sqrt(1 + p * sigma_i**2)``. The KL divergence compares BG against the
    regenerated SaS on ``bins`` bins spanning +/- ``span_sd`` (unit power, so
    +/- 8 by default), tails clipped into the end bins.
    """
    if not 0.0 < p < 1.0:
        raise ParameterError(f"p must lie in (0, 1), got {p}")
    if ratio_db < 0.0:
        raise ParameterError(f"ratio_db must be non-negative, got {ratio_db}")
    if n < 100_000:
        raise ParameterError(f"n >= 1e5 required, got {n}")
    prm = BgParams.from_ratio_db(p, ratio_db)
    x = generate_bg(prm, n, derive_seed(seed, 0)).samples
    if normalize == "sample":
        power = float(np.mean(x * x))
    elif normalize == "analytic":
        power = prm.variance
    else:
        raise ParameterError(f"unknown normalization {normalize!r}")
    x = x / math.sqrt(power)

    est = estimate_mcculloch(x)
    s = generate_sas(est.params, n, derive_seed(seed, 1)).samples
    rng_ = (-span_sd, span_sd)
    kl = kl_divergence(empirical_pdf(x, bins, rng_), empirical_pdf(s, bins, rng_))
    return ConversionCell(
        p=float(p),
        ratio_db=float(ratio_db),
        alpha_hat=est.alpha,
        gamma_hat=est.gamma,
        kl=kl,
        n=int(n),
        seed=int(seed),
    )


def _cell_job(args):
    p, r, n, s, kw = args
    return convert_cell(p, r, n, s, **kw)


def conversion_sweep(p_grid, ratio_grid, n: int, seed: int, workers: int = 1, **kw) -> list[ConversionCell]:
    """Run ``convert_cell`` over ``p_grid x ratio_grid`` (p-major order).

    Cell ``i`` uses seed ``derive_seed(seed, i)``, so results do not depend on
    ``workers``.
    """
    p_grid = [float(v) for v in p_grid]
    ratio_grid = [float(v) for v in ratio_grid]
    if not p_grid or not ratio_grid:
        raise ParameterError("sweep grids must be non-empty")
    jobs = [
        (p, r, n, derive_seed(seed, i), kw)
        for i, (p, r) in enumerate((p, r) for p in p_grid for r in ratio_grid)
    ]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_cell_job, jobs))
    return [_cell_job(j) for j in jobs]


def fit_poly_surface(cells, target: str) -> PolySurface:
    """Least-squares (2,2) surface through ``cells`` for ``target``.

    Columns are scaled to unit norm before an orthogonal (SVD) solve, which
    keeps the p^2 and y^2 columns (1e-8 vs 1e3) well conditioned.
    """
    if target not in TARGETS:
        raise ParameterError(f"target must be one of {TARGETS}, got {target!r}")
    cells = list(cells)
    if len(cells) < 6:
        raise SingularFitError(f"need at least 6 cells, got {len(cells)}")
    p = np.array([c.p for c in cells])
    r = np.array([c.ratio_db for c in cells])
    z = np.array([getattr(c, target) for c in cells])
    a = _design(p, r)
    scale = np.linalg.norm(a, axis=0)
    if np.any(scale == 0.0):
        raise SingularFitError("a design column is identically zero")
    a_s = a / scale
    coef_s, _, rank, sv = np.linalg.lstsq(a_s, z, rcond=None)
    if rank < 6 or sv[-1] < 1e-10 * sv[0]:
        raise SingularFitError("design matrix is rank deficient; cells must span both axes")
    coef = coef_s / scale
    resid = a @ coef - z
    rmse = float(np.sqrt(np.mean(resid**2)))
    return PolySurface(*map(float, coef), target=target, fit_rmse=rmse)


def write_cells_csv(cells, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CELL_COLUMNS, lineterminator="\n")
        w.writeheader()
        for c in cells:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in c.row().items()})


def read_cells_csv(path: str | Path) -> list[ConversionCell]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        ConversionCell(
            p=float(r["p"]),
            ratio_db=float(r["ratio_db"]),
            alpha_hat=float(r["alpha_hat"]),
            gamma_hat=float(r["gamma_hat"]),
            kl=float(r["kl"]),
            n=int(r["n"]),
            seed=int(r["seed"]),
        )
        for r in rows
    ]


def grid_p(n: int = 10) -> np.ndarray:
    """Default impulse-ratio axis: log-spaced over [1e-4, 1e-2]."""
    return np.logspace(-4, -2, n)


def grid_ratio(n: int = 10) -> np.ndarray:
    """Default power-ratio axis: linear over [10, 30] dB."""
    return np.linspace(10.0, 30.0, n)
