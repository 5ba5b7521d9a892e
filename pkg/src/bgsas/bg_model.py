"""Bernoulli-Gaussian impulsive noise.

A BG sample is background Gaussian noise plus, with probability ``p``, an
independent Gaussian impulse::

    n(k) = sigma_b * n0(k) + sigma_i * n1(k) * phi(k),   phi(k) = [z(k) <= p]

with ``n0, n1`` standard normal and ``z`` uniform on [0, 1). The sigmas scale
amplitudes (standard deviations), which is what makes the mixture density
below exact.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import EmptyRequestError, ParameterError
from .seeding import rng
from .trace import NoiseTrace

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class BgParams:
    p: float
    sigma_b: float
    sigma_i: float

    def __post_init__(self):
        for name in ("p", "sigma_b", "sigma_i"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v}")
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError(f"p must lie in [0, 1], got {self.p}")
        if self.sigma_b <= 0.0:
            raise ParameterError(f"sigma_b must be positive, got {self.sigma_b}")
        if self.sigma_i < 0.0:
            raise ParameterError(f"sigma_i must be non-negative, got {self.sigma_i}")

    @classmethod
    def from_ratio_db(cls, p: float, ratio_db: float, sigma_b: float = 1.0) -> "BgParams":
        """Build from the impulse-to-background power ratio in dB.

        ``ratio_db = 10*log10(sigma_i**2 / sigma_b**2) = 20*log10(sigma_i / sigma_b)``.
        """
        return cls(p, sigma_b, sigma_b * 10.0 ** (ratio_db / 20.0))

    @property
    def ratio_db(self) -> float:
        if self.sigma_i == 0.0:
            return -math.inf
        return 20.0 * math.log10(self.sigma_i / self.sigma_b)

    @property
    def impulse_variance(self) -> float:
        """Variance of a sample that carries an impulse, sigma_b^2 + sigma_i^2."""
        return self.sigma_b**2 + self.sigma_i**2

    @property
    def variance(self) -> float:
        return self.sigma_b**2 + self.p * self.sigma_i**2

    def as_dict(self) -> dict:
        return asdict(self)


def generate_bg(params: BgParams, n: int, seed: int, return_labels: bool = False):
    """Draw ``n`` i.i.d. BG samples.

    With ``return_labels=True`` also returns the boolean impulse indicator
    ``phi`` so estimators can be checked against ground truth.
    """
    n = int(n)
    if n < 1:
        raise EmptyRequestError("n must be at least 1")
    g = rng(seed)
    z = g.random(n)
    n0 = g.standard_normal(n)
    n1 = g.standard_normal(n)
    phi = z < params.p
    x = params.sigma_b * n0
    x[phi] += params.sigma_i * n1[phi]
    trace = NoiseTrace(x, seed=seed, source="bg", params=params.as_dict())
    if return_labels:
        return trace, phi
    return trace


def normal_pdf(x, var):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-0.5 * x * x / var) / (_SQRT_2PI * math.sqrt(var))


def bg_pdf(params: BgParams, x):
    """Mixture density (1-p) N(0, sigma_b^2) + p N(0, sigma_b^2 + sigma_i^2)."""
    out = (1.0 - params.p) * normal_pdf(x, params.sigma_b**2)
    if params.p > 0.0:
        out = out + params.p * normal_pdf(x, params.impulse_variance)
    return out


def bg_sum_pdf(params: BgParams, w):
    """Density of X + Y for X, Y i.i.d. BG.

    Convolving the two-component mixture with itself gives four Gaussian
    pairings; variances add, so::

        (1-p)^2 N(0, 2 sb^2) + p^2 N(0, 2 s1^2) + 2 p (1-p) N(0, s2^2)

    with ``s1^2 = sb^2 + si^2`` and ``s2^2 = sb^2 + s1^2``.
    """
    p = params.p
    vb = params.sigma_b**2
    v1 = params.impulse_variance
    v2 = vb + v1
    return (
        (1.0 - p) ** 2 * normal_pdf(w, 2.0 * vb)
        + p**2 * normal_pdf(w, 2.0 * v1)
        + 2.0 * p * (1.0 - p) * normal_pdf(w, v2)
    )


def bg_sum_pdf_printed(params: BgParams, w):
    """The two-sample-sum density exactly as typeset in the source derivation.

    Kept only so tests can show where it departs from the true convolution:
    its cross terms carry ``(s2^2 - 1)`` factors in the exponents and are not
    normalized unless ``sigma_b = 1`` and ``sigma_i = 0``.
    """
    w = np.asarray(w, dtype=np.float64)
    p = params.p
    vb = params.sigma_b**2
    v1 = params.impulse_variance
    v2 = vb + v1
    w2 = w * w
    return (
        (1.0 - 2.0 * p + p**2) / math.sqrt(4.0 * math.pi * vb) * np.exp(-w2 / (4.0 * vb))
        + p**2 / math.sqrt(4.0 * math.pi * v1) * np.exp(-w2 / (4.0 * v1))
        + (p - p**2)
        / math.sqrt(2.0 * math.pi * v2)
        * (
            np.exp(-(v2 - 1.0) * w2 / (2.0 * v1 * v2))
            + np.exp(-(v2 - 1.0) * w2 / (2.0 * vb * v2))
        )
    )
