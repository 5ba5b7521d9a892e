"""Command-line entry point: ``bgsas <command> ...`` (or ``python -m bgsas``).

Every random stream derives from ``--seed``; re-running a command with the
same arguments rewrites byte-identical CSV/JSON/trace files. Validation
problems exit with status 2, numerical failures with status 1.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import conversion, stability
from .bg_model import BgParams, bg_pdf, generate_bg
from .errors import EmptyRequestError, ParameterError, UnsupportedSkewError
from .estimators import estimate_extreme_order, estimate_koutrouvelis, estimate_mcculloch
from .metrics import DEFAULT_BINS, default_range, empirical_pdf, kl_divergence, weighted_rmse
from .sas_model import SasParams, generate_sas
from .trace import read_trace, read_trace_csv, write_trace, write_trace_csv

_VALIDATION = (ParameterError, EmptyRequestError, UnsupportedSkewError)
_GRID_RE = re.compile(r"^\s*([^:]+):([^:]+):(\d+)(log)?\s*$")


class UsageError(Exception):
    pass


def parse_grid(text: str) -> np.ndarray:
    """Parse ``lo:hi:count`` (linear), ``lo:hi:countlog`` (log-spaced) or ``a,b,c``."""
    m = _GRID_RE.match(text)
    if m:
        lo, hi, count, log = float(m.group(1)), float(m.group(2)), int(m.group(3)), m.group(4)
        if count < 1:
            raise UsageError(f"grid {text!r}: count must be positive")
        if log:
            if lo <= 0 or hi <= 0:
                raise UsageError(f"grid {text!r}: log spacing needs positive bounds")
            return np.logspace(np.log10(lo), np.log10(hi), count)
        return np.linspace(lo, hi, count)
    try:
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None


def _dump_json(obj, path) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def _load_trace(path: str):
    if path.endswith(".csv"):
        return read_trace_csv(path)
    return read_trace(path)


# -- commands ------------------------------------------------------------------


def cmd_generate(a) -> str:
    if a.model == "bg":
        if a.p is None or a.sigma_i is None:
            raise UsageError("bg model needs --p and --sigma-i")
        trace = generate_bg(BgParams(a.p, a.sigma_b, a.sigma_i), a.n, a.seed)
    else:
        if a.alpha is None:
            raise UsageError("sas model needs --alpha")
        trace = generate_sas(SasParams(a.alpha, a.gamma), a.n, a.seed)
    if a.sample_rate is not None:
        from dataclasses import replace

        trace = replace(trace, sample_rate_hz=a.sample_rate)
    if a.output.endswith(".csv"):
        write_trace_csv(trace, a.output)
    else:
        write_trace(trace, a.output)
    return f"generate: {len(trace)} {a.model} samples -> {a.output}"


def cmd_estimate(a) -> str:
    trace = _load_trace(a.input)
    if a.method == "mcculloch":
        est = estimate_mcculloch(trace)
    elif a.method == "koutrouvelis":
        est = estimate_koutrouvelis(trace)
    else:
        est = estimate_extreme_order(trace, a.segments)
    rec = est.to_record()
    if a.output:
        _dump_json(rec, a.output)
    return f"estimate[{a.method}]: alpha={est.alpha:.4f} gamma={est.gamma:.4f}"


def cmd_convert(a) -> str:
    cell = conversion.convert_cell(a.p, a.ratio_db, a.n, a.seed, normalize=a.normalize)
    _dump_json(cell.row(), a.output)
    return (
        f"convert: p={a.p:g} ratio={a.ratio_db:g} dB -> alpha={cell.alpha_hat:.4f} "
        f"gamma={cell.gamma_hat:.4f} kl={cell.kl:.4g}"
    )


def cmd_sweep(a) -> str:
    cells = conversion.conversion_sweep(
        parse_grid(a.p_grid), parse_grid(a.ratio_grid), a.n, a.seed,
        workers=a.workers, normalize=a.normalize,
    )
    conversion.write_cells_csv(cells, a.output)
    return f"sweep: {len(cells)} cells -> {a.output}"


def cmd_stability(a) -> str:
    if a.p_grid or a.sigma_i_grid or a.ratio_grid:
        if not a.p_grid or not (a.sigma_i_grid or a.ratio_grid):
            raise UsageError("a stability sweep needs --p-grid and --sigma-i-grid or --ratio-grid")
        unit = "sigma" if a.sigma_i_grid else "db"
        base = stability.StabilityTestConfig(BgParams(0.0, a.sigma_b, 0.0), a.n, a.seed, a.bins)
        reports = stability.stability_sweep(
            parse_grid(a.p_grid), parse_grid(a.sigma_i_grid or a.ratio_grid), base,
            ratio_unit=unit, workers=a.workers,
        )
        stability.write_sweep_csv(reports, a.output)
        return f"stability: {len(reports)} cells -> {a.output}"
    if a.p is None or (a.sigma_i is None and a.ratio_db is None):
        raise UsageError("stability needs --p and --sigma-i or --ratio-db")
    if a.sigma_i is not None:
        prm = BgParams(a.p, a.sigma_b, a.sigma_i)
    else:
        prm = BgParams.from_ratio_db(a.p, a.ratio_db, a.sigma_b)
    rep = stability.stability_test(stability.StabilityTestConfig(prm, a.n, a.seed, a.bins))
    _dump_json(rep.row(), a.output)
    if a.pdf_csv:
        with open(a.pdf_csv, "w", newline="") as fh:
            fh.write("bin_center,density_v,density_z\n")
            for c, v, z in zip(rep.pdf_v.centers, rep.pdf_v.density, rep.pdf_z.density):
                fh.write(f"{float(c)!r},{float(v)!r},{float(z)!r}\n")
    return f"stability: kl={rep.kl:.4g} rmse={rep.rmse:.4g}"


def cmd_fit_surface(a) -> str:
    if a.builtin:
        surfaces = conversion.builtin_table2()
    else:
        if not a.input:
            raise UsageError("fit-surface needs --input sweep.csv (or --builtin)")
        cells = conversion.read_cells_csv(a.input)
        targets = conversion.TARGETS if a.target == "both" else (a.target,)
        surfaces = tuple(conversion.fit_poly_surface(cells, t) for t in targets)
    _dump_json([s.to_record() for s in surfaces], a.output)
    return "fit-surface: " + ", ".join(f"{s.target} rmse={s.fit_rmse:.4g}" for s in surfaces)


def cmd_metrics(a) -> str:
    meas = _load_trace(a.meas)
    rng_ = tuple(a.range) if a.range else default_range(meas.samples)
    f_meas = empirical_pdf(meas, a.bins, rng_)
    out = {"bins": a.bins, "range": list(rng_), "n_meas": len(meas)}
    if a.model:
        model = _load_trace(a.model)
        f_model = empirical_pdf(model, a.bins, rng_)
        out["weighted_rmse"] = weighted_rmse(f_meas, f_model)
        out["kl"] = kl_divergence(f_meas, f_model)
    elif a.bg:
        prm = BgParams(*a.bg)
        out["weighted_rmse"] = weighted_rmse(f_meas, lambda x: bg_pdf(prm, x))
    else:
        raise UsageError("metrics needs --model TRACE or --bg P SIGMA_B SIGMA_I")
    if a.pdf_csv:
        f_meas.to_csv(a.pdf_csv)
    _dump_json(out, a.output)
    return "metrics: " + " ".join(f"{k}={out[k]:.4g}" for k in ("weighted_rmse", "kl") if k in out)


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bgsas", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def seed(p):
        p.add_argument("--seed", type=int, required=True, help="RNG seed (required; all randomness derives from it)")

    g = sub.add_parser("generate", help="draw a BG or SaS noise trace")
    g.add_argument("--model", choices=("bg", "sas"), required=True)
    g.add_argument("--p", type=float, help="BG impulse probability (linear, 0..1)")
    g.add_argument("--sigma-b", type=float, default=1.0, help="BG background std dev (linear amplitude)")
    g.add_argument("--sigma-i", type=float, help="BG impulse std dev (linear amplitude)")
    g.add_argument("--alpha", type=float, help="SaS index of stability (0, 2]")
    g.add_argument("--gamma", type=float, default=1.0, help="SaS scale (linear amplitude)")
    g.add_argument("--n", type=int, required=True, help="number of samples")
    g.add_argument("--sample-rate", type=float, help="optional sample rate in Hz, stored in the header")
    seed(g)
    g.add_argument("-o", "--output", required=True, help=".bin (JSON header + float64 LE) or .csv")
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("estimate", help="estimate SaS parameters of a trace")
    e.add_argument("--input", "-i", required=True, help="trace file (.bin or single-column .csv)")
    e.add_argument("--method", choices=("mcculloch", "koutrouvelis", "extreme_order"), default="mcculloch")
    e.add_argument("--segments", type=int, help="extreme_order segment count (default floor(sqrt(N)))")
    e.add_argument("-o", "--output", help="JSON estimate record")
    e.set_defaults(func=cmd_estimate)

    c = sub.add_parser("convert", help="fit SaS to one power-normalized BG cell")
    c.add_argument("--p", type=float, required=True, help="impulse probability (linear, 0..1)")
    c.add_argument("--ratio-db", type=float, required=True,
                   help="impulse-to-background power ratio in dB, 10*log10(sigma_i^2/sigma_b^2)")
    c.add_argument("--n", type=int, default=5_000_000, help="samples per process")
    c.add_argument("--normalize", choices=("sample", "analytic"), default="sample",
                   help="unit-power normalization by sample RMS or model power")
    seed(c)
    c.add_argument("-o", "--output", required=True, help="ConversionCell JSON")
    c.set_defaults(func=cmd_convert)

    s = sub.add_parser("sweep", help="conversion sweep over (p, ratio) -> CSV")
    s.add_argument("--p-grid", default="1e-4:1e-2:10log",
                   help="impulse probabilities (linear units): lo:hi:count[log] or a,b,c")
    s.add_argument("--ratio-grid", default="10:30:10",
                   help="power ratios in dB: lo:hi:count[log] or a,b,c")
    s.add_argument("--n", type=int, default=5_000_000, help="samples per cell")
    s.add_argument("--normalize", choices=("sample", "analytic"), default="sample")
    s.add_argument("--workers", type=int, default=1, help="process pool size (row order is fixed)")
    seed(s)
    s.add_argument("-o", "--output", required=True, help="CSV (p, ratio_db, alpha_hat, gamma_hat, kl, n, seed)")
    s.set_defaults(func=cmd_sweep)

    st = sub.add_parser("stability", help="quasi-stability test of BG noise (single cell or sweep)")
    st.add_argument("--p", type=float, help="impulse probability (linear, 0..1)")
    st.add_argument("--sigma-b", type=float, default=1.0, help="background std dev (linear amplitude)")
    st.add_argument("--sigma-i", type=float, help="impulse std dev (linear amplitude)")
    st.add_argument("--ratio-db", type=float, help="alternative to --sigma-i: power ratio in dB")
    st.add_argument("--p-grid", help="sweep: impulse probabilities (linear), lo:hi:count[log] or a,b,c")
    st.add_argument("--sigma-i-grid", help="sweep: impulse std devs (linear amplitude)")
    st.add_argument("--ratio-grid", help="sweep: power ratios in dB")
    st.add_argument("--n", type=int, default=1_000_000, help="samples per variable")
    st.add_argument("--bins", type=int, default=DEFAULT_BINS)
    st.add_argument("--workers", type=int, default=1)
    st.add_argument("--pdf-csv", help="single cell: write V and Z densities as CSV")
    seed(st)
    st.add_argument("-o", "--output", required=True, help="JSON report (single) or CSV (sweep)")
    st.set_defaults(func=cmd_stability)

    f = sub.add_parser("fit-surface", help="fit (2,2) conversion surfaces to a sweep CSV")
    f.add_argument("--input", "-i", help="sweep CSV from `bgsas sweep`")
    f.add_argument("--target", choices=("alpha_hat", "gamma_hat", "both"), default="both")
    f.add_argument("--builtin", action="store_true", help="emit the built-in reference surfaces instead")
    f.add_argument("-o", "--output", required=True, help="JSON list of surfaces (y axis in dB)")
    f.set_defaults(func=cmd_fit_surface)

    m = sub.add_parser("metrics", help="weighted RMSE / KL between a trace and a model")
    m.add_argument("--meas", required=True, help="measured trace (.bin or .csv)")
    m.add_argument("--model", help="model trace to compare against (.bin or .csv)")
    m.add_argument("--bg", type=float, nargs=3, metavar=("P", "SIGMA_B", "SIGMA_I"),
                   help="analytic BG density (linear units) instead of a model trace")
    m.add_argument("--bins", type=int, default=DEFAULT_BINS)
    m.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"),
                   help="histogram range in amplitude units (default +/- 8 std of --meas)")
    m.add_argument("--pdf-csv", help="write the measured EmpiricalPdf as CSV")
    m.add_argument("-o", "--output", required=True, help="JSON metrics")
    m.set_defaults(func=cmd_metrics)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    try:
        summary = a.func(a)
    except (UsageError, *_VALIDATION) as exc:
        print(f"bgsas {a.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"bgsas {a.command}: failed: {exc}", file=sys.stderr)
        return 1
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
