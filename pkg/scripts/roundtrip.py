"""Plant a one-soliton, run the direct transform on it and report what comes back."""
from __future__ import annotations

import argparse

import numpy as np

from wki.scattering import InitialProfile, SpectralBox, spectral_data
from wki.soliton import SolitonParams, soliton_field


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--z", type=complex, default=0.5 + 0.8j)
    ap.add_argument("--c", type=complex, default=1.0)
    ap.add_argument("--background", type=float, default=1.0)
    ap.add_argument("--half-width", type=float, default=40.0)
    ap.add_argument("--points", type=int, default=3201)
    args = ap.parse_args()

    params = SolitonParams.single(args.z, args.c, args.background)
    x = np.linspace(-args.half_width, args.half_width, args.points)
    q = soliton_field(params, x, 0.0).q
    data = spectral_data(InitialProfile(x, q, q[-1], q[0]), np.linspace(-10, 10, 81),
                         SpectralBox(-3, 3, 0.05, 3))
    print(f"planted   z = {args.z:.6f}   c = {args.c:.6f}")
    for z, c in zip(data.eigenvalues, data.norming):
        print(f"recovered z = {z:.6f}   c = {c:.6f}")
    print(f"max |r| = {np.max(np.abs(data.r.values)):.2e}")


if __name__ == "__main__":
    main()
