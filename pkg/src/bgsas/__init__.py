"""Bernoulli-Gaussian and symmetric alpha-stable impulsive noise models."""

from .bg_model import BgParams, bg_pdf, bg_sum_pdf, generate_bg
from .conversion import (
    ConversionCell,
    PolySurface,
    builtin_table2,
    conversion_sweep,
    convert_cell,
    fit_poly_surface,
    poly_eval,
)
from .estimators import (
    BgEstimate,
    SasEstimate,
    estimate_bg_labeled,
    estimate_extreme_order,
    estimate_koutrouvelis,
    estimate_mcculloch,
)
from .metrics import EmpiricalPdf, empirical_pdf, kl_divergence, weighted_rmse
from .sas_model import SasParams, generate_sas, sas_char_fn, sas_pdf
from .stability import StabilityTestConfig, stability_sweep, stability_test
from .trace import NoiseTrace, read_trace, write_trace

__version__ = "0.1.0"
