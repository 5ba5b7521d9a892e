"""Symmetric alpha-stable (SaS) laws: characteristic function, sampling, density.

Scale convention: for beta = delta = 0 the characteristic function is
``exp(-(gamma*|t|)**alpha)``, so ``gamma`` carries amplitude units and a
sample of SaS(alpha, gamma) is ``gamma`` times a sample of SaS(alpha, 1).
The dispersion form ``exp(-g*|t|**alpha)`` maps onto this one via
``g = gamma**alpha``. At alpha = 2 the law is N(0, 2*gamma**2); at alpha = 1
it is Cauchy with scale gamma.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate

from .errors import EmptyRequestError, ParameterError, ResolutionError, UnsupportedSkewError
from .seeding import rng
from .trace import NoiseTrace

# characteristic-function magnitude treated as zero at the Nyquist frequency
_CF_CUTOFF = 1e-12
_MIN_FFT_POINTS = 1 << 16
_MAX_FFT_POINTS = 1 << 23


@dataclass(frozen=True)
class SasParams:
    alpha: float
    gamma: float = 1.0
    beta: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, float(getattr(self, name)))
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        if not 0.0 < self.alpha <= 2.0:
            raise ParameterError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not -1.0 <= self.beta <= 1.0:
            raise ParameterError(f"beta must lie in [-1, 1], got {self.beta}")
        if self.gamma <= 0.0:
            raise ParameterError(f"gamma must be positive, got {self.gamma}")

    def as_dict(self) -> dict:
        return asdict(self)


def sas_char_fn(params: SasParams, t):
    """Characteristic function of the stable law at ``t`` (complex).

    Uses the standard 1-parametrization; the alpha = 1 branch carries the
    ``(2/pi) log|t|`` skew correction instead of ``tan(pi*alpha/2)``.
    """
    t = np.asarray(t, dtype=np.float64)
    a, b, g, d = params.alpha, params.beta, params.gamma, params.delta
    at = np.abs(g * t)
    mag = at**a
    if b == 0.0:
        skew = 0.0
    elif a == 1.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            skew = np.where(t == 0.0, 0.0, b * (2.0 / math.pi) * np.sign(t) * np.log(np.abs(t)))
        return np.exp(1j * d * t - mag * (1.0 + 1j * skew))
    else:
        skew = b * math.tan(math.pi * a / 2.0) * np.sign(t)
    return np.exp(1j * d * t - mag * (1.0 - 1j * skew))


def _cms_standard(alpha: float, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Chambers-Mallows-Stuck transform for beta = 0, unit scale.

    ``u`` is uniform on (-pi/2, pi/2), ``w`` unit exponential.
    """
    if alpha == 1.0:
        return np.tan(u)
    if alpha == 2.0:
        # limit of the general branch: 2 sqrt(w) sin(u); N(0, 2)
        return 2.0 * np.sqrt(w) * np.sin(u)
    return (
        np.sin(alpha * u)
        / np.cos(u) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha)
    )


def generate_sas(params: SasParams, n: int, seed: int) -> NoiseTrace:
    """Draw ``n`` i.i.d. SaS samples by the CMS transform."""
    n = int(n)
    if n < 1:
        raise EmptyRequestError("n must be at least 1")
    if params.beta != 0.0:
        raise UnsupportedSkewError("only symmetric (beta = 0) generation is supported")
    g = rng(seed)
    u = math.pi * (g.random(n) - 0.5)
    w = g.standard_exponential(n)
    x = params.gamma * _cms_standard(params.alpha, u, w) + params.delta
    return NoiseTrace(x, seed=seed, source="sas", params=params.as_dict())


def _check_symmetric(params: SasParams):
    if params.beta != 0.0:
        raise UnsupportedSkewError("density evaluation supports beta = 0 only")


def sas_pdf_point(params: SasParams, x: float) -> float:
    """Density at one point by oscillatory quadrature.

    ``f(x) = (1/(pi*gamma)) * int_0^inf exp(-s**alpha) cos(s*(x-delta)/gamma) ds``
    """
    _check_symmetric(params)
    a = params.alpha
    u = abs(x - params.delta) / params.gamma
    fn = lambda s: math.exp(-(s**a))
    if u == 0.0:
        val, _ = integrate.quad(fn, 0.0, math.inf, epsabs=1e-13, epsrel=1e-12, limit=500)
    else:
        val, _ = integrate.quad(
            fn, 0.0, math.inf, weight="cos", wvar=u, epsabs=1e-13, limlst=200
        )
    return val / (math.pi * params.gamma)


def _grid_spacing(grid: np.ndarray) -> float:
    if grid.ndim != 1 or grid.size < 3:
        raise ResolutionError("grid must be one-dimensional with at least 3 points")
    d = np.diff(grid)
    dx = (grid[-1] - grid[0]) / (grid.size - 1)
    if dx <= 0 or np.max(np.abs(d - dx)) > 1e-9 * max(1.0, abs(dx)) * grid.size:
        raise ResolutionError("grid must be uniform and increasing")
    return float(dx)


def sas_pdf(params: SasParams, grid, mass_tol: float = 1e-4) -> np.ndarray:
    """SaS density on a uniform grid symmetric about ``delta`` by FFT inversion.

    The characteristic function is sampled on the conjugate frequency grid of
    an internal, zero-padded copy of ``grid`` (same spacing, at least 2**16
    points) and transformed in one FFT. Raises ``ResolutionError`` when the
    grid spacing cannot resolve the characteristic function or when the grid
    misses more than ``mass_tol`` of the probability.
    """
    _check_symmetric(params)
    grid = np.asarray(grid, dtype=np.float64)
    dx = _grid_spacing(grid)
    centre = 0.5 * (grid[0] + grid[-1])
    if abs(centre - params.delta) > 1e-9 * max(1.0, abs(grid[-1] - grid[0])):
        raise ResolutionError("grid must be symmetric about delta")

    a, g = params.alpha, params.gamma
    nyquist = math.pi / dx
    if (g * nyquist) ** a < -math.log(_CF_CUTOFF):
        need = (-math.log(_CF_CUTOFF)) ** (1.0 / a) / g
        raise ResolutionError(
            f"grid spacing {dx:g} too coarse for alpha={a}: need dx <= {math.pi / need:.3g}"
        )

    # Period of the padded grid; wide enough that wrap-around of the
    # heavy tails is far below 1e-6 for alpha >= 1.
    half = 0.5 * (grid[-1] - grid[0])
    width = max(4.0 * half, 4000.0 * g)
    m = _MIN_FFT_POINTS
    while m * dx < width and m < _MAX_FFT_POINTS:
        m *= 2
    m = max(m, 1 << int(math.ceil(math.log2(2 * grid.size))))

    dt = 2.0 * math.pi / (m * dx)
    k = np.arange(m)
    t = (k - m // 2) * dt
    # grid points sit at delta + shift + j*dx for integer j
    rel0 = (grid[0] - params.delta) / dx
    shift = (rel0 - math.floor(rel0)) * dx
    phi = np.exp(-((g * np.abs(t)) ** a)) * np.exp(-1j * t * shift)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    spec = np.fft.fft(sign * phi)
    dens = (dt / (2.0 * math.pi)) * (sign * spec).real * (-1.0 if (m // 2) % 2 else 1.0)
    # internal point j represents x = delta + shift + (j - m/2) * dx
    idx = np.floor(rel0).astype(int) + m // 2 + np.arange(grid.size)
    out = np.clip(dens[idx], 0.0, None)

    mass = float(np.sum(out) * dx)
    if abs(mass - 1.0) > mass_tol:
        raise ResolutionError(
            f"grid captures probability mass {mass:.6f}; widen it for alpha={a}"
        )
    return out


def sas_pdf_closed_form(params: SasParams, x):
    """Closed forms for the two special symmetric cases (alpha = 2, alpha = 1)."""
    _check_symmetric(params)
    x = (np.asarray(x, dtype=np.float64) - params.delta) / params.gamma
    g = params.gamma
    if params.alpha == 2.0:
        return np.exp(-x * x / 4.0) / (math.sqrt(4.0 * math.pi) * g)
    if params.alpha == 1.0:
        return 1.0 / (math.pi * g * (1.0 + x * x))
    raise ParameterError("closed form only exists for alpha in {1, 2}")
