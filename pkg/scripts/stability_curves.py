"""Quasi-stability of BG noise: KL(V || Z) against p and against sigma_i.

Two CSV sweeps land in ``--out``: ``vs_p.csv`` at fixed sigma_i and
``vs_sigma_i.csv`` at fixed p, plus ``pdf_p*.csv`` with the V and Z
densities for a few p values (for overlay plots).
"""

import argparse
from pathlib import Path

from bgsas.bg_model import BgParams
from bgsas.stability import StabilityTestConfig, stability_sweep, stability_test, write_sweep_csv

P_VALUES = [1e-5, 1e-4, 1e-3, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1 - 1e-5]
SIGMA_I_VALUES = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--sigma-i", type=float, default=50.0, help="impulse std dev for the p sweep")
    ap.add_argument("--p", type=float, default=0.1, help="impulse probability for the sigma_i sweep")
    ap.add_argument("--out", type=Path, default=Path("results/stability"))
    a = ap.parse_args()
    a.out.mkdir(parents=True, exist_ok=True)

    base = StabilityTestConfig(BgParams(0.0, 1.0, 0.0), a.n, a.seed)
    vs_p = stability_sweep(P_VALUES, [a.sigma_i], base, ratio_unit="sigma")
    write_sweep_csv(vs_p, a.out / "vs_p.csv")
    vs_s = stability_sweep([a.p], SIGMA_I_VALUES, base, ratio_unit="sigma")
    write_sweep_csv(vs_s, a.out / "vs_sigma_i.csv")

    for p in (1e-5, 0.5, 1 - 1e-5):
        rep = stability_test(StabilityTestConfig(BgParams(p, 1.0, a.sigma_i), a.n, a.seed))
        with open(a.out / f"pdf_p{p:.5g}.csv", "w") as fh:
            fh.write("bin_center,density_v,density_z\n")
            for c, v, z in zip(rep.pdf_v.centers, rep.pdf_v.density, rep.pdf_z.density):
                fh.write(f"{c!r},{v!r},{z!r}\n")

    for r in vs_p:
        print(f"p={r.params.p:<10.5g} kl={r.kl:.4g}")
    for r in vs_s:
        print(f"sigma_i={r.params.sigma_i:<6g} kl={r.kl:.4g}")


if __name__ == "__main__":
    main()
