"""Parameter estimators for SaS and BG noise.

SaS: McCulloch's quantile method, Koutrouvelis' iterative characteristic
function regression, and the extreme-order-statistics method of Tsihrintzis
and Nikias. BG: a labeled-sample estimator plus a simple threshold labeler.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import _mcculloch_tables as tab
from .bg_model import BgParams
from .errors import DegenerateSampleError, ParameterError, SegmentationError
from .sas_model import SasParams
from .trace import NoiseTrace

MCCULLOCH_MIN_N = 500
KOUTROUVELIS_MIN_N = 1000
_EULER_GAMMA = 0.5772156649015329

_psi_alpha = RegularGridInterpolator((tab.NU_ALPHA, tab.NU_BETA), tab.ALPHA)
_psi_beta = RegularGridInterpolator((tab.NU_ALPHA, tab.NU_BETA), tab.BETA)
_phi_scale = RegularGridInterpolator((tab.ALPHA_GRID, tab.BETA_GRID), tab.PHI3)


@dataclass(frozen=True)
class SasEstimate:
    params: SasParams
    method: str
    n_used: int
    beta_diag: float = 0.0
    flags: tuple[str, ...] = ()

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def gamma(self) -> float:
        return self.params.gamma

    def to_record(self) -> dict:
        return {
            "method": self.method,
            "alpha": self.params.alpha,
            "gamma": self.params.gamma,
            "beta_diag": self.beta_diag,
            "n_used": self.n_used,
            "flags": list(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


@dataclass(frozen=True)
class BgEstimate:
    params: BgParams
    n_impulse: int
    n_total: int
    flags: tuple[str, ...] = field(default=())


def _samples(trace) -> np.ndarray:
    if isinstance(trace, NoiseTrace):
        return trace.samples
    return np.asarray(trace, dtype=np.float64).ravel()


# -- McCulloch ---------------------------------------------------------------


def estimate_mcculloch(trace) -> SasEstimate:
    """Quantile-based estimate of (alpha, gamma) with beta as a diagnostic.

    Uses ``nu_alpha = (x95 - x05) / (x75 - x25)`` and
    ``nu_beta = (x95 + x05 - 2 x50) / (x95 - x05)``, bilinear interpolation in
    McCulloch's tables, and ``gamma = (x75 - x25) / phi3(alpha, 0)``.
    Out-of-table ``nu_alpha`` is clamped and flagged; ``nu_alpha`` below the
    Gaussian value gives ``alpha = 2``.
    """
    x = _samples(trace)
    if x.size < MCCULLOCH_MIN_N:
        raise ParameterError(f"McCulloch needs at least {MCCULLOCH_MIN_N} samples, got {x.size}")
    q05, q25, q50, q75, q95 = np.quantile(x, [0.05, 0.25, 0.5, 0.75, 0.95])
    iqr = q75 - q25
    if iqr <= 0.0:
        raise DegenerateSampleError("interquartile range is zero")
    nu_alpha = (q95 - q05) / iqr
    nu_beta = (q95 + q05 - 2.0 * q50) / (q95 - q05)

    flags = []
    na = float(nu_alpha)
    if na < tab.NU_ALPHA[0]:
        na = tab.NU_ALPHA[0]
        flags.append("alpha_clamped_high")
    elif na > tab.NU_ALPHA[-1]:
        na = tab.NU_ALPHA[-1]
        flags.append("alpha_clamped_low")
    nb = min(abs(float(nu_beta)), tab.NU_BETA[-1])
    alpha = float(_psi_alpha((na, nb)))
    beta = float(np.clip(_psi_beta((na, nb)), 0.0, 1.0)) * math.copysign(1.0, nu_beta)
    alpha = min(max(alpha, tab.ALPHA_GRID[0]), 2.0)

    # symmetric model: the scale table is read at beta = 0
    gamma = float(iqr / _phi_scale((alpha, 0.0)))
    return SasEstimate(
        SasParams(alpha=alpha, gamma=gamma),
        method="mcculloch",
        n_used=int(x.size),
        beta_diag=beta,
        flags=tuple(flags),
    )


# -- Koutrouvelis ------------------------------------------------------------


def _koutrouvelis_k(alpha: float, n: int) -> int:
    if alpha >= 1.5:
        k = 10
    elif alpha >= 1.0:
        k = 20
    else:
        k = 30
    return max(2, min(k, n // 10, 134))


def _ecf_abs2(x: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.empty(t.size)
    for i, ti in enumerate(t):
        tx = ti * x
        out[i] = np.mean(np.cos(tx)) ** 2 + np.mean(np.sin(tx)) ** 2
    return out


def estimate_koutrouvelis(trace, max_iter: int = 10, tol: float = 1e-4) -> SasEstimate:
    """Iterative regression on the empirical characteristic function.

    Each pass standardizes the data by the current scale and fits
    ``log(-log|phi(t)|^2) = log(2 c^alpha) + alpha log t`` on
    ``t_k = pi k / 25``, ``k = 1..K``; the fitted ``c`` rescales the running
    gamma. K is 10 for alpha >= 1.5, 20 for alpha >= 1 and 30 below, picked
    from the first pass and capped at N/10. Location is the sample median.
    """
    x = _samples(trace)
    if x.size < KOUTROUVELIS_MIN_N:
        raise ParameterError(
            f"Koutrouvelis needs at least {KOUTROUVELIS_MIN_N} samples, got {x.size}"
        )
    x = x - np.median(x)
    q28, q72 = np.quantile(x, [0.28, 0.72])
    gamma = (q72 - q28) / 1.654
    if gamma <= 0.0:
        raise DegenerateSampleError("sample has no spread")

    alpha = 1.5
    flags = []
    converged = False
    best = None
    k = _koutrouvelis_k(alpha, x.size)
    for it in range(max_iter):
        z = x / gamma
        t = math.pi * np.arange(1, k + 1) / 25.0
        a2 = _ecf_abs2(z, t)
        ok = (a2 > 0.0) & (a2 < 1.0)
        if ok.sum() < 2:
            raise DegenerateSampleError("empirical characteristic function is degenerate")
        y = np.log(-np.log(a2[ok]))
        w = np.log(t[ok])
        slope, intercept = np.polyfit(w, y, 1)
        new_alpha = float(slope)
        c = math.exp((intercept - math.log(2.0)) / new_alpha)
        new_gamma = gamma * c
        change = max(abs(new_alpha - alpha) / abs(alpha), abs(c - 1.0))
        alpha, gamma = new_alpha, new_gamma
        best = (alpha, float(gamma))
        if it == 0:
            # frequency count is fixed from the pilot fit; re-choosing it every
            # pass can oscillate at a threshold of the rule
            k = _koutrouvelis_k(alpha, x.size)
            continue
        if change < tol:
            converged = True
            break
    alpha, gamma = best
    if not converged:
        flags.append("not_converged")
    if alpha > 2.0:
        alpha = 2.0
        flags.append("alpha_clamped_high")
    elif alpha <= 0.0:
        raise DegenerateSampleError(f"regression produced alpha = {alpha}")
    return SasEstimate(
        SasParams(alpha=alpha, gamma=gamma),
        method="koutrouvelis",
        n_used=int(x.size),
        flags=tuple(flags),
    )


# -- extreme order statistics -------------------------------------------------


def estimate_extreme_order(trace, segment_count: int | None = None) -> SasEstimate:
    """Extreme-order-statistics estimate from per-segment maxima and minima.

    The trace is cut into ``segment_count`` equal segments (default
    ``floor(sqrt(N))``; a remainder is dropped). For a stable law the log of a
    segment maximum is asymptotically Gumbel with standard deviation
    ``pi / (alpha sqrt 6)``, so ``alpha = pi/(2 sqrt 6) (1/s_max + 1/s_min)``
    from the spreads of log-maxima and log-|minima|. Estimates above 2 are
    clamped and flagged, and gamma then comes from the sample variance.
    """
    x = _samples(trace)
    if segment_count is None:
        segment_count = int(math.isqrt(x.size))
    segment_count = int(segment_count)
    if segment_count < 2:
        raise SegmentationError("need at least 2 segments")
    seg_len = x.size // segment_count
    if seg_len < 2:
        raise SegmentationError(
            f"{x.size} samples cannot fill {segment_count} segments of 2 or more"
        )
    segs = x[: seg_len * segment_count].reshape(segment_count, seg_len)
    hi = segs.max(axis=1)
    lo = -segs.min(axis=1)
    hi = np.log(hi[hi > 0])
    lo = np.log(lo[lo > 0])
    if hi.size < 2 or lo.size < 2:
        raise DegenerateSampleError("too few positive maxima / negative minima")
    s_hi = hi.std(ddof=1)
    s_lo = lo.std(ddof=1)
    if s_hi == 0.0 or s_lo == 0.0:
        raise DegenerateSampleError("extreme values have no spread")
    alpha = math.pi / (2.0 * math.sqrt(6.0)) * (1.0 / s_hi + 1.0 / s_lo)

    flags = []
    if alpha >= 2.0:
        # no Pareto tail to read a scale from; Gaussian limit has var 2 gamma^2
        alpha = 2.0
        flags.append("alpha_clamped_high")
        gamma = float(np.std(x)) / math.sqrt(2.0)
    else:
        # tail constant of SaS: P(X > x) ~ C gamma^alpha x^-alpha
        c_tail = math.gamma(alpha) * math.sin(math.pi * alpha / 2.0) / math.pi
        mean_log = 0.5 * (hi.mean() + lo.mean())
        gamma = math.exp(mean_log - (math.log(seg_len * c_tail) + _EULER_GAMMA) / alpha)
    return SasEstimate(
        SasParams(alpha=alpha, gamma=gamma),
        method="extreme_order",
        n_used=int(seg_len * segment_count),
        flags=tuple(flags),
    )


# -- Bernoulli-Gaussian -------------------------------------------------------


def estimate_bg_labeled(trace, labels) -> BgEstimate:
    """BG parameters from samples tagged impulsive (True) or background.

    ``sigma_i`` follows from the variance composition of impulsive samples,
    ``var = sigma_b^2 + sigma_i^2``, floored at zero.
    """
    x = _samples(trace)
    labels = np.asarray(labels, dtype=bool).ravel()
    if labels.size != x.size:
        raise ParameterError(f"{labels.size} labels for {x.size} samples")
    imp = x[labels]
    bkg = x[~labels]
    flags = []
    p_hat = imp.size / x.size

    if bkg.size >= 2:
        sigma_b = float(np.std(bkg))
    else:
        sigma_b = 0.0
        flags.append("no_background")
    if imp.size >= 2:
        sigma_i = math.sqrt(max(float(np.var(imp)) - sigma_b**2, 0.0))
    else:
        sigma_i = 0.0
        flags.append("no_impulses")
    if sigma_b == 0.0:
        # an all-impulse input carries no background information; report the
        # total spread as the background so the params stay valid
        sigma_b = float(np.std(imp)) if imp.size >= 2 else 1.0
        sigma_i = 0.0
    return BgEstimate(
        BgParams(p=p_hat, sigma_b=sigma_b, sigma_i=sigma_i),
        n_impulse=int(imp.size),
        n_total=int(x.size),
        flags=tuple(flags),
    )


def label_by_threshold(trace, k: float = 5.0) -> np.ndarray:
    """Tag samples whose magnitude exceeds ``k`` robust background deviations.

    The background deviation is the normal-consistent MAD, which impulses at
    low ``p`` barely move.
    """
    x = _samples(trace)
    mad = np.median(np.abs(x - np.median(x)))
    sigma_b = mad / 0.6744897501960817
    return np.abs(x) > k * sigma_b
