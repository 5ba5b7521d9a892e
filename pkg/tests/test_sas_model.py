import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from bgsas.errors import EmptyRequestError, ParameterError, ResolutionError, UnsupportedSkewError
from bgsas.estimators import estimate_mcculloch
from bgsas.sas_model import (
    SasParams,
    generate_sas,
    sas_char_fn,
    sas_pdf,
    sas_pdf_closed_form,
    sas_pdf_point,
)


def quad_pdf(alpha, gamma, x):
    """(1/(pi gamma)) int_0^inf exp(-s^alpha) cos(s x / gamma) ds, plain adaptive quad."""
    f = lambda s: math.exp(-(s**alpha)) * math.cos(s * x / gamma)
    upper = 60.0 ** (1.0 / alpha)
    val, _ = integrate.quad(f, 0.0, upper, limit=2000, epsabs=1e-14)
    return val / (math.pi * gamma)


@pytest.mark.parametrize(
    "kw", [dict(alpha=0.0), dict(alpha=2.1), dict(alpha=1.5, gamma=0.0), dict(alpha=1.5, beta=1.5)]
)
def test_invalid_params(kw):
    with pytest.raises(ParameterError):
        SasParams(**kw)


def test_char_fn_values():
    assert sas_char_fn(SasParams(2.0), 1.0) == pytest.approx(math.exp(-1))
    assert sas_char_fn(SasParams(1.0), 2.0) == pytest.approx(math.exp(-2))
    assert sas_char_fn(SasParams(1.3, 2.0), 0.0) == 1.0
    for t in (0.5, 1.0, 2.0):
        assert abs(sas_char_fn(SasParams(1.5), t)) == pytest.approx(math.exp(-(t**1.5)))


def test_char_fn_scale_convention():
    # scale enters as gamma^alpha |t|^alpha
    t = np.linspace(-3, 3, 13)
    assert np.allclose(np.abs(sas_char_fn(SasParams(1.7, 2.5), t)), np.exp(-((2.5 * np.abs(t)) ** 1.7)))


def test_char_fn_skewed_alpha_one_branch_is_finite():
    v = sas_char_fn(SasParams(1.0, 1.0, beta=0.5), np.array([0.0, 0.3, -2.0]))
    assert np.all(np.isfinite(v))
    assert v[0] == 1.0


def test_char_fn_against_empirical():
    x = generate_sas(SasParams(1.5), 1_000_000, seed=4).samples
    for t in (0.5, 1.0, 2.0):
        ecf = np.mean(np.cos(t * x))
        assert ecf == pytest.approx(math.exp(-(t**1.5)), abs=1e-2)


def test_ecf_round_trip_uniform():
    prm = SasParams(1.8, 1.0)
    x = generate_sas(prm, 1_000_000, seed=8).samples
    t = np.linspace(-5, 5, 41)
    ecf = np.array([np.mean(np.exp(1j * ti * x)) for ti in t])
    assert np.max(np.abs(ecf - sas_char_fn(prm, t))) < 1e-2


def test_generate_rejects_skew_and_empty():
    with pytest.raises(UnsupportedSkewError):
        generate_sas(SasParams(1.5, beta=0.2), 10, seed=1)
    with pytest.raises(EmptyRequestError):
        generate_sas(SasParams(1.5), 0, seed=1)


def test_gaussian_case_variance():
    x = generate_sas(SasParams(2.0), 100_000, seed=1).samples
    assert np.var(x) == pytest.approx(2.0, rel=0.05)


def test_cauchy_case_quartiles():
    x = generate_sas(SasParams(1.0), 100_000, seed=2).samples
    q25, q50, q75 = np.quantile(x, [0.25, 0.5, 0.75])
    assert abs(q50) < 0.05
    assert q75 - q25 == pytest.approx(2.0, rel=0.05)


def test_mcculloch_round_trip():
    x = generate_sas(SasParams(1.8), 1_000_000, seed=3)
    assert estimate_mcculloch(x).alpha == pytest.approx(1.8, abs=0.05)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 2.0), st.floats(0.1, 10.0), st.integers(0, 2**31))
def test_scale_equivariance(alpha, gamma, seed):
    a = generate_sas(SasParams(alpha, gamma), 500, seed).samples
    b = generate_sas(SasParams(alpha, 1.0), 500, seed).samples
    assert np.allclose(a, gamma * b, rtol=1e-12, atol=0)


@pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8, 2.0])
def test_stability_closure(alpha):
    prm = SasParams(alpha)
    n = 100_000
    x1 = generate_sas(prm, n, seed=10).samples
    x2 = generate_sas(prm, n, seed=11).samples
    ref = generate_sas(prm, n, seed=12).samples
    s = (x1 + x2) / 2 ** (1 / alpha)
    stat = stats.ks_2samp(s, ref).statistic
    crit_1pct = 1.628 * math.sqrt(2 / n)
    assert stat < crit_1pct


def test_pdf_gaussian_and_cauchy_closed_forms():
    g = SasParams(2.0)
    x = np.linspace(-60, 60, 12_001)
    f = sas_pdf(g, x)
    assert f[6000] == pytest.approx(1 / math.sqrt(4 * math.pi), abs=1e-12)
    assert np.max(np.abs(f - sas_pdf_closed_form(g, x))) < 1e-6

    c = SasParams(1.0)
    x = np.linspace(-8000, 8000, 400_001)
    f = sas_pdf(c, x)
    assert f[200_000] == pytest.approx(1 / math.pi, abs=1e-9)
    assert np.max(np.abs(f - sas_pdf_closed_form(c, x))) < 1e-6


def test_pdf_alpha_15_against_quadrature():
    prm = SasParams(1.5)
    x = np.linspace(-500, 500, 100_001)
    f = sas_pdf(prm, x)
    # Gamma(5/3)/pi from 30-digit evaluation
    assert f[50_000] == pytest.approx(0.28735275145216444, abs=1e-8)
    for xv, ref in ((1.0, 0.20203815960957512), (3.0, 0.03150942361643623)):
        assert np.interp(xv, x, f) == pytest.approx(ref, abs=1e-6)
        assert quad_pdf(1.5, 1.0, xv) == pytest.approx(ref, abs=1e-9)
        assert sas_pdf_point(prm, xv) == pytest.approx(ref, abs=1e-9)


def test_pdf_properties_and_scale():
    prm = SasParams(1.7, 2.0, delta=1.5)
    x = 1.5 + np.linspace(-400, 400, 80_000)  # even count: half-integer offsets
    f = sas_pdf(prm, x)
    assert np.all(f >= 0)
    assert np.allclose(f, f[::-1], atol=1e-12)
    assert np.sum(f) * (x[1] - x[0]) == pytest.approx(1.0, abs=1e-4)
    for xv in (1.5, 3.0, 10.0):
        assert np.interp(xv, x, f) == pytest.approx(quad_pdf(1.7, 2.0, xv - 1.5), abs=2e-6)


def test_pdf_resolution_errors():
    with pytest.raises(ResolutionError):
        sas_pdf(SasParams(1.0), np.linspace(-50, 50, 10_001))  # too narrow for Cauchy tails
    with pytest.raises(ResolutionError):
        sas_pdf(SasParams(1.5), np.linspace(-500, 500, 101))  # too coarse
    with pytest.raises(ResolutionError):
        sas_pdf(SasParams(1.5), np.linspace(-10, 30, 4001))  # not centred
    with pytest.raises(UnsupportedSkewError):
        sas_pdf(SasParams(1.5, beta=0.3), np.linspace(-50, 50, 1001))
