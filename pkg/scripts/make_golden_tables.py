#!/usr/bin/env python3
"""Regenerate the golden loss tables in tests/golden/ with mpmath.

The values here come from an arbitrary-precision evaluation that shares no
code with the production path: its own Q-function, its own information
density, and adaptive (tanh-sinh) integration for the hybrid expectations
instead of Gauss-Hermite. Runs offline; the test suite only reads the files
this writes.

Usage: python scripts/make_golden_tables.py [outdir]
"""

import sys
from pathlib import Path

import mpmath as mp
import numpy as np

from onebit_chanest.sweep import SweepTable, make_alpha_grid, write_table

mp.mp.dps = 40

ALPHA_GRID = make_alpha_grid(0.0, 1.0, 0.05)
SNR_DB = (-25.0, -10.0, -5.0, -2.5)


def qfunc(x):
    return mp.erfc(x / mp.sqrt(2)) / 2


def phi(t):
    # 1 - Q(t) written as Q(-t) so high-precision tails never cancel to zero
    return mp.e ** (-t * t) / (2 * mp.pi * qfunc(t) * qfunc(-t))


def det_losses(zeta, alpha):
    pp, pm = phi(alpha + zeta), phi(alpha - zeta)
    chi = 2 * pp * pm / (pp + pm)
    chi_star = (pp + pm) / 2
    return 10 * mp.log10(chi), 10 * mp.log10(chi_star)


def prior_expect(f, sigma2, alpha):
    """E[f(zeta)] for zeta ~ N(0, sigma2), over a window covering the tilted peak."""
    sigma = mp.sqrt(sigma2)
    width = sigma / mp.sqrt(1 - sigma2)
    center = abs(alpha) * sigma2 / (1 - sigma2)
    lim = center + 30 * width + 3
    norm = 1 / (sigma * mp.sqrt(2 * mp.pi))
    integrand = lambda z: f(z) * mp.e ** (-z * z / (2 * sigma2)) * norm
    return mp.quad(integrand, [-lim, -abs(alpha), 0, abs(alpha), lim])


def hybrid_losses(sigma2, alpha):
    psi = prior_expect(lambda z: 1 / phi(alpha + z), sigma2, alpha)
    einv = prior_expect(lambda z: 1 / (phi(alpha + z) + phi(alpha - z)), sigma2, alpha)
    return -10 * mp.log10(psi), -10 * mp.log10(2 * einv)


def build_tables():
    tables = {}
    for mode in ("deterministic", "hybrid"):
        chi = np.empty((ALPHA_GRID.size, len(SNR_DB)))
        chi_star = np.empty_like(chi)
        for j, snr in enumerate(SNR_DB):
            for i, alpha in enumerate(ALPHA_GRID):
                a = mp.mpf(repr(float(alpha)))
                if mode == "deterministic":
                    zeta = mp.mpf(10) ** (mp.mpf(repr(snr)) / 20)
                    c, cs = det_losses(zeta, a)
                else:
                    sigma2 = mp.mpf(10) ** (mp.mpf(repr(snr)) / 10)
                    c, cs = hybrid_losses(sigma2, a)
                chi[i, j] = float(c)
                chi_star[i, j] = float(cs)
            print(f"  {mode} snr={snr} done", flush=True)
        for which, vals in (("chi", chi), ("chi_star", chi_star)):
            tables[(which, mode)] = SweepTable(
                kind=(which, mode),
                alpha_grid=ALPHA_GRID,
                snr_db=np.array(SNR_DB),
                values_db=vals,
            )
    return tables


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent.parent / "tests" / "golden"
    outdir.mkdir(parents=True, exist_ok=True)
    for (which, mode), table in build_tables().items():
        stem = f"{'det' if mode == 'deterministic' else 'hybrid'}_{which}"
        write_table(table, outdir / f"{stem}.txt", "paper_txt")
        write_table(table, outdir / f"{stem}.json", "json")
        print(f"wrote {stem}.txt / {stem}.json")


if __name__ == "__main__":
    main()
