#!/usr/bin/env python3
"""Write the range-Doppler map of one noisy desk-scale trial for each scheme as CSV (n, m, |A|^2 dB)."""

import argparse
from pathlib import Path

from dnlfm_isac.airlink import complex_noise
from dnlfm_isac.detect import SCHEMES, DetectionSetup, _Chain, trial_rng
from dnlfm_isac.experiments import detection_map_rows, write_csv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--snr-db", type=float, default=-50.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=Path("results/maps"))
    args = parser.parse_args()
    setup = DetectionSetup()
    for name in ("lfm_rx", "lfm_fmatched", "dnlfm"):
        chain = _Chain(SCHEMES[name], setup)
        noise = complex_noise(chain.clean.shape, trial_rng(args.seed, 0))
        power = chain.power_map(chain.clean + 10 ** (-args.snr_db / 20) * noise)
        path = args.out / f"map_{name}.csv"
        write_csv(path, ("n", "m", "power_db"), detection_map_rows(power))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
