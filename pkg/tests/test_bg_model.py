import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bgsas.bg_model import BgParams, bg_pdf, bg_sum_pdf, bg_sum_pdf_printed, generate_bg
from bgsas.errors import EmptyRequestError, ParameterError
from bgsas.metrics import empirical_pdf, weighted_rmse


def independent_bg(p, sigma_b, sigma_i, n, seed):
    """Second BG generator: per-sample choice of component variance."""
    g = np.random.Generator(np.random.PCG64(seed + 10_000))
    impulse = g.binomial(1, p, size=n).astype(bool)
    sd = np.where(impulse, math.sqrt(sigma_b**2 + sigma_i**2), sigma_b)
    return sd * g.normal(size=n)


def self_convolution(params, half_width, n_points=1 << 15):
    """Direct FFT convolution of bg_pdf with itself on a uniform grid."""
    x = np.linspace(-half_width, half_width, n_points)
    dx = x[1] - x[0]
    f = bg_pdf(params, x)
    conv = np.fft.irfft(np.fft.rfft(f, 2 * n_points) ** 2, 2 * n_points)[: 2 * n_points - 1] * dx
    w = np.linspace(-2 * half_width, 2 * half_width, 2 * n_points - 1)
    return w, conv


bg_params = st.builds(
    BgParams,
    p=st.floats(0.0, 1.0),
    sigma_b=st.floats(0.05, 20.0),
    sigma_i=st.floats(0.0, 200.0),
)


@pytest.mark.parametrize(
    "kw",
    [dict(p=-0.1, sigma_b=1, sigma_i=1), dict(p=1.2, sigma_b=1, sigma_i=1),
     dict(p=0.1, sigma_b=0, sigma_i=1), dict(p=0.1, sigma_b=1, sigma_i=-1),
     dict(p=float("nan"), sigma_b=1, sigma_i=1)],
)
def test_invalid_params(kw):
    with pytest.raises(ParameterError):
        BgParams(**kw)


def test_zero_samples_rejected():
    with pytest.raises(EmptyRequestError):
        generate_bg(BgParams(0.1, 1, 1), 0, seed=1)


def test_ratio_db_identity():
    prm = BgParams.from_ratio_db(0.01, 20.0)
    assert prm.sigma_i == pytest.approx(10.0)
    assert prm.ratio_db == pytest.approx(10 * math.log10(prm.sigma_i**2 / prm.sigma_b**2))


def test_generation_is_deterministic():
    prm = BgParams(0.05, 1.0, 10.0)
    a = generate_bg(prm, 1000, seed=3).samples
    b = generate_bg(prm, 1000, seed=3).samples
    c = generate_bg(prm, 1000, seed=4).samples
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_pure_gaussian_variance():
    x = generate_bg(BgParams(0.0, 1.0, 50.0), 100_000, seed=1).samples
    assert np.var(x) == pytest.approx(1.0, rel=0.05)


def test_degenerate_impulse_variance():
    x = generate_bg(BgParams(1.0, 1.0, 0.0), 100_000, seed=2).samples
    assert np.var(x) == pytest.approx(1.0, rel=0.05)


def test_mixture_variance_against_independent_generator():
    prm = BgParams(0.1, 1.0, 50.0)
    n = 1_000_000
    x = generate_bg(prm, n, seed=5).samples
    y = independent_bg(prm.p, prm.sigma_b, prm.sigma_i, n, seed=5)
    assert prm.variance == 251.0
    assert np.var(x) == pytest.approx(251.0, rel=0.03)
    assert np.var(y) == pytest.approx(251.0, rel=0.03)
    # estimator standard error of the sample variance: sqrt((m4 - s^4) / n)
    m4 = 3 * ((1 - prm.p) * prm.sigma_b**4 + prm.p * prm.impulse_variance**2)
    se = math.sqrt((m4 - prm.variance**2) / n)
    assert abs(np.var(x) - prm.variance) < 3 * se


def test_labels_match_impulse_rate():
    trace, phi = generate_bg(BgParams(0.01, 1.0, 30.0), 1_000_000, seed=9, return_labels=True)
    assert phi.dtype == bool and phi.size == len(trace)
    assert phi.mean() == pytest.approx(0.01, abs=0.0005)


def test_pdf_known_values():
    assert bg_pdf(BgParams(0.0, 1.0, 7.0), 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi))
    # 0.5/sqrt(2 pi) + 0.5/sqrt(8 pi), evaluated at 30 digits
    assert bg_pdf(BgParams(0.5, 1.0, math.sqrt(3)), 0.0) == pytest.approx(0.2992067103010745, rel=1e-12)


def test_pdf_against_histogram():
    prm = BgParams(0.5, 1.0, math.sqrt(3))
    x = generate_bg(prm, 1_000_000, seed=11)
    f = empirical_pdf(x, bins=101)
    assert weighted_rmse(f, lambda c: bg_pdf(prm, c), at="bin_average") < 1e-3


def test_histogram_consistency_plc_point():
    prm = BgParams(0.01, 1.0, 30.0)
    f = empirical_pdf(generate_bg(prm, 1_000_000, seed=12), bins=101)
    assert weighted_rmse(f, lambda c: bg_pdf(prm, c), at="bin_average") < 1e-3


@settings(max_examples=40, deadline=None)
@given(bg_params)
def test_normalization(prm):
    s = max(prm.sigma_b, math.sqrt(prm.impulse_variance))
    x = np.linspace(-40 * s, 40 * s, 400_001)
    dx = x[1] - x[0]
    assert np.sum(bg_pdf(prm, x)) * dx == pytest.approx(1.0, abs=1e-8)
    w = np.linspace(-80 * s, 80 * s, 400_001)
    assert np.sum(bg_sum_pdf(prm, w)) * (w[1] - w[0]) == pytest.approx(1.0, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(bg_params, st.floats(-1e3, 1e3))
def test_symmetry(prm, x):
    assert bg_pdf(prm, x) == bg_pdf(prm, -x)
    assert bg_sum_pdf(prm, x) == bg_sum_pdf(prm, -x)


def test_sum_of_gaussians():
    assert bg_sum_pdf(BgParams(0.0, 1.0, 5.0), 0.0) == pytest.approx(1 / math.sqrt(4 * math.pi))


@pytest.mark.parametrize(
    "prm", [BgParams(0.5, 1.0, 1.0), BgParams(0.01, 1.0, 30.0), BgParams(0.3, 2.0, 0.5), BgParams(0.9, 0.5, 10.0)]
)
def test_sum_pdf_matches_convolution_oracle(prm):
    half = 40 * math.sqrt(prm.impulse_variance)
    w, conv = self_convolution(prm, half)
    assert np.max(np.abs(conv - bg_sum_pdf(prm, w))) < 1e-6


def test_printed_sum_form_disagrees_with_oracle():
    prm = BgParams(0.3, 2.0, 5.0)
    w, conv = self_convolution(prm, 40 * math.sqrt(prm.impulse_variance))
    assert np.max(np.abs(conv - bg_sum_pdf_printed(prm, w))) > 1e-3
    # and is not a density: its mass differs from 1
    dw = w[1] - w[0]
    assert abs(np.sum(bg_sum_pdf_printed(prm, w)) * dw - 1.0) > 0.1


def test_printed_sum_form_agrees_in_its_degenerate_case():
    # sigma_b = 1, sigma_i = 0 makes both (s2^2 - 1) factors harmless
    prm = BgParams(0.4, 1.0, 0.0)
    w = np.linspace(-10, 10, 1001)
    assert np.allclose(bg_sum_pdf_printed(prm, w), bg_sum_pdf(prm, w), atol=1e-15)
