"""Small-data decay law: oracle field against the one- and two-term asymptotic formulas.

The default grid (|x| <= 2000, dx = 0.1, up to t = 320) runs for about a
quarter of an hour; ``--half-width 1000 --t-end 160`` gives a quick look.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from wki import asymptotics as asy
from wki.cli import slope_fit
from wki.oracle import FieldFrame, SimConfig, conserved, simulate
from wki.scattering import InitialProfile, SpectralBox, spectral_data


def profile(x, qb=0.5, amp=0.2):
    return qb * (1 + amp * np.exp(-x ** 2 / 18) * np.exp(0.3j * x))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--half-width", type=float, default=2000.0)
    ap.add_argument("--dx", type=float, default=0.1)
    ap.add_argument("--t-end", type=float, default=320.0)
    ap.add_argument("--rays", type=float, nargs="+", default=[-1.0, -0.8, -0.6, -0.4, 0.4, 0.6])
    args = ap.parse_args()

    xs = np.linspace(-50, 50, 4001)
    q0 = profile(xs)
    spec = spectral_data(InitialProfile(xs, q0, q0[-1], q0[0]), np.linspace(-5, 5, 321),
                         SpectralBox(-4, 4, 0.02, 3))
    print(f"eigenvalues: {spec.eigenvalues}   max|r| = {np.max(np.abs(spec.r.values)):.3f}")

    n = int(round(2 * args.half_width / args.dx)) + 1
    x = np.linspace(-args.half_width, args.half_width, n)
    cfg = SimConfig(x[0], x[-1], n, 0.2 * args.dx ** 2 * spec.phi0, args.t_end, frame_every=args.t_end / 8)
    start = time.time()
    frames = simulate(cfg, FieldFrame(0.0, x, profile(x)))
    c0 = conserved(frames[0])[0]
    print(f"simulated in {time.time() - start:.0f} s, c drift "
          f"{max(abs(conserved(f)[0] - c0) for f in frames) / abs(c0):.1e}")

    frames = [f for f in frames if f.t >= max(args.t_end / 8, 10.0) - 1e-9]
    for z0 in args.rays:
        row = []
        for terms in (1, 2):
            cfg_a = asy.AsymptoticConfig(terms=terms)
            errs = []
            for f in frames:
                xr = -2 * f.t * z0 / spec.phi0 ** 2
                qo = np.interp(xr, f.x_nodes, f.q.real) + 1j * np.interp(xr, f.x_nodes, f.q.imag)
                errs.append(abs(qo - asy.asymptotic_q(xr, f.t, spec, cfg_a)))
            row.append(slope_fit([f.t for f in frames], errs)["slope"])
        print(f"z0 = {z0:+.2f}   slope 1 term {row[0]:+.3f}   2 terms {row[1]:+.3f}")


if __name__ == "__main__":
    main()
