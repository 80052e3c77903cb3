"""Command-line entry point: ``dnlfm-isac <subcommand> [options]``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import experiments as ex
from .config import ExperimentConfig, config_from_dict, read_config_file
from .dnlfm import Provenance
from .errors import NumericError, ParameterError
from .windows import WindowSpec, make_window, mismatch_loss_db


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML experiment config")
    p.add_argument("--out", type=Path, default=Path("results"), help="output directory (default: results)")
    p.add_argument("--seed", type=int, help="master seed, overrides the config")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials per SNR point, overrides the config")
    scale = p.add_mutually_exclusive_group()
    scale.add_argument("--desk", dest="preset", action="store_const", const="desk", help="desk-scale preset")
    scale.add_argument("--full", dest="preset", action="store_const", const="full", help="full-scale preset (default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dnlfm-isac", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-waveform", help="export one waveform symbol as CSV")
    _common(p)
    p.add_argument("--kind", default="dnlfm", choices=[k.value for k in Provenance])
    p.add_argument("--window", type=WindowSpec.parse, help="window, e.g. hamming or cosine_alpha:0.6")

    for name, text in (
        ("fig1", "detection probability vs SNR per scheme"),
        ("fig2", "cubic metric vs window alpha"),
        ("fig3", "spectral accuracy and generation time"),
        ("fig4", "spatial beam patterns with PSLR/ISLR"),
    ):
        _common(sub.add_parser(name, help=text))

    p = sub.add_parser("mismatch-loss", help="matched-window SNR gain of a window")
    _common(p)
    p.add_argument("--window", type=WindowSpec.parse, help="window (default: config window)")
    p.add_argument("--length", type=int, help="window length (default: N of the config)")

    p = sub.add_parser("beam-pattern", help="two-way beam pattern as CSV")
    _common(p)
    p.add_argument("--window", type=WindowSpec.parse, help="spatial window (default: config window)")
    p.add_argument("--mode", default="matched", choices=("rx_only", "matched"))
    p.add_argument("--elements", type=int, help="array size L (default: config)")
    p.add_argument("--steer-deg", type=float, help="steering angle in degrees (default: config)")
    p.add_argument("--points", type=int, help="theta grid size (default: config)")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    data = {} if args.config is None else read_config_file(args.config)
    if args.preset is not None:
        data["preset"] = args.preset
    cfg = config_from_dict(data)
    if args.seed is not None:
        if args.seed < 0:
            raise ParameterError("--seed must be non-negative")
        cfg = replace(cfg, master_seed=args.seed)
    if args.trials is not None:
        cfg = replace(cfg, fig1=replace(cfg.fig1, trials=args.trials))
    return cfg


def run(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    out = args.out
    cmd = args.command
    if cmd == "gen-waveform":
        s = ex.gen_waveform(cfg, args.kind, out, args.window)
        print(f"wrote {s.rows} rows to {s.path}")
        print(f"max | |x| - 1 | = {s.max_modulus_error:.3e}")
        print(f"spectral_nmse  = {s.nmse:.6e}")
    elif cmd == "fig1":
        curves = ex.fig1(cfg, out)
        for name, c in curves.items():
            print(f"{name:16s} " + " ".join(f"{p:.3f}" for p in c.pd))
    elif cmd == "fig2":
        for row in ex.fig2(cfg, out):
            print(f"{row[0]:20s} alpha={row[1]:.3f} delta_cm={row[4]:+.3f} dB")
    elif cmd == "fig3":
        for method, param, nmse, t in ex.fig3(cfg, out):
            print(f"{method:12s} {param:>8d} nmse={nmse:.3e} time={t * 1e3:.3f} ms")
    elif cmd == "fig4":
        res = ex.fig4(cfg, out)
        for mode in ("rx_only", "matched"):
            print(f"{mode:8s} PSLR={res.pslr_db[mode]:.2f} dB ISLR={res.islr_db[mode]:.2f} dB")
    elif cmd == "mismatch-loss":
        window = args.window or cfg.window
        length = args.length or cfg.waveform.N
        loss = mismatch_loss_db(make_window(window, length))
        print(f"{window.label()} L={length}: {loss:.4f} dB")
        ex.write_csv(out / "mismatch_loss.csv", ("window", "length", "loss_db"), [[window.label(), length, loss]])
    elif cmd == "beam-pattern":
        res = ex.beam_pattern_csv(
            args.window or cfg.window,
            args.elements or cfg.array.L,
            cfg.fig4.steer_deg if args.steer_deg is None else args.steer_deg,
            args.points or cfg.fig4.grid_points,
            args.mode,
            out,
        )
        print(f"{args.mode} PSLR={res.pslr_db[args.mode]:.2f} dB ISLR={res.islr_db[args.mode]:.2f} dB")
    ex.write_manifest(out, cfg, cmd)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except ParameterError as exc:
        parser.error(str(exc))
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    return 1


if __name__ == "__main__":
    sys.exit(main())
