#!/usr/bin/env python3
"""Phase gap between the DNLFM and numerically inverted NLFM as the inversion grid is refined."""

import argparse

import numpy as np

from dnlfm_isac.dnlfm import WaveformSpec, generate_dnlfm, generate_nlfm_oracle, spectral_nmse
from dnlfm_isac.windows import WindowSpec


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--N", type=int, default=256)
    parser.add_argument("--window", type=WindowSpec.parse, default=WindowSpec("hamming"))
    args = parser.parse_args()
    spec = WaveformSpec(N=args.N)
    ref = generate_dnlfm(spec, args.window)
    print(f"DNLFM spectral nmse {spectral_nmse(ref, args.window):.3e}")
    print("granularity  max|phase gap| rad  spectral nmse")
    for factor in (1, 4, 16, 64, 256, 1024, 4096):
        w = generate_nlfm_oracle(spec, args.window, factor * args.N)
        gap = np.max(np.abs(w.phase - ref.phase))
        print(f"{factor * args.N:>11d}  {gap:17.3e}  {spectral_nmse(w, args.window):.3e}")


if __name__ == "__main__":
    main()
