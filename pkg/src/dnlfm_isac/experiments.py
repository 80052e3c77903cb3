"""Experiment runners behind the command-line interface.

Each runner takes an :class:`ExperimentConfig`, writes CSV files into an
output directory and returns the rows it wrote, so tests can check results
without re-reading files. Floats are written with ``repr`` which makes output
byte-stable for a fixed config and seed.
"""

from __future__ import annotations

import csv
import json
import statistics
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .airlink import load_scene, on_grid_target
from .config import ExperimentConfig
from .detect import DetectionSetup, PdCurve, pd_vs_snr
from .dnlfm import (
    Waveform,
    WaveformSpec,
    generate_dnlfm,
    generate_nlfm_oracle,
    generate_ofdm_nlfm,
    generate_windowed_lfm,
    spectral_nmse,
    waveform_by_name,
)
from .errors import ParameterError, UndefinedMetricError
from .metrics import cubic_metric_db, islr_db, pslr_db, snr_gain_at_pd
from .receiver import beam_pattern
from .windows import WindowKind, WindowSpec, make_window, mismatch_loss_db


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> list[list]:
    rows = [list(r) for r in rows]
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow([_fmt(v) for v in r])
    return rows


def write_manifest(out_dir: Path, cfg: ExperimentConfig, command: str, extra: dict | None = None) -> Path:
    manifest = {
        "command": command,
        "tool_version": __version__,
        "config_sha256": cfg.digest(),
        "master_seed": cfg.master_seed,
        "preset": cfg.preset,
        "config": cfg.to_dict(),
    }
    if extra:
        manifest.update(extra)
    path = Path(out_dir) / f"{command}.manifest.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


# --------------------------------------------------------------------------- waveforms


def _slug(window: WindowSpec) -> str:
    return window.label().replace(":", "-")


def waveform_rows(w: Waveform) -> list[list]:
    N = len(w)
    f_n = w.inst_freq if w.inst_freq.size == N else np.full(N, np.nan)
    phase = w.phase if w.phase is not None else np.angle(w.time_samples)
    x = w.time_samples
    return [[n, w.sample_times[n], f_n[n], phase[n], x[n].real, x[n].imag] for n in range(N)]


@dataclass(frozen=True)
class WaveformSummary:
    path: Path
    rows: int
    max_modulus_error: float
    nmse: float


def gen_waveform(cfg: ExperimentConfig, kind: str, out_dir: Path, window: WindowSpec | None = None) -> WaveformSummary:
    window = window or cfg.window
    try:
        w = waveform_by_name(
            kind, cfg.waveform, window, max_iters=cfg.dnlfm_iters, segments=cfg.ofdm_segments
        )
    except ValueError as exc:
        raise ParameterError(str(exc)) from None
    path = Path(out_dir) / f"waveform_{kind}_{_slug(window)}.csv"
    rows = write_csv(path, ("n", "t_n", "f_n", "phase_rad", "re", "im"), waveform_rows(w))
    return WaveformSummary(
        path=path,
        rows=len(rows),
        max_modulus_error=float(np.max(np.abs(np.abs(w.time_samples) - 1.0))),
        nmse=spectral_nmse(w, window),
    )


# --------------------------------------------------------------------------- fig 1


def detection_setup(cfg: ExperimentConfig) -> DetectionSetup:
    if cfg.scene is not None:
        scene = load_scene(cfg.scene)
        if not scene.targets:
            raise ParameterError("scene file has no targets")
        target = scene.targets[0]
    else:
        target = on_grid_target(
            cfg.waveform, cfg.frame, cfg.fig1.range_bin, cfg.fig1.doppler_bin, cfg.array.scan_angles[0]
        )
    return DetectionSetup(
        spec=cfg.waveform,
        frame=cfg.frame,
        array=cfg.array,
        window=cfg.window,
        cfar=cfg.cfar,
        target=target,
        domain=cfg.fig1.domain,
        tolerance_bins=cfg.fig1.tolerance_bins,
        dnlfm_iters=cfg.dnlfm_iters,
    )


def predicted_gain_db(scheme: str, cfg: ExperimentConfig) -> float:
    """Window-theory gain of ``scheme`` over the receive-only LFM baseline."""
    freq = mismatch_loss_db(make_window(cfg.window, cfg.waveform.N))
    tm = mismatch_loss_db(make_window(cfg.window, cfg.frame.M))
    return {
        "lfm_plain": float("nan"),
        "lfm_rx": 0.0,
        "lfm_fmatched": freq,
        "dnlfm": freq,
        "lfm_tfmatched": freq + tm,
        "dnlfm_tfmatched": freq + tm,
    }[scheme]


def fig1(cfg: ExperimentConfig, out_dir: Path, baseline: str = "lfm_rx") -> dict[str, PdCurve]:
    setup = detection_setup(cfg)
    curves = {
        name: pd_vs_snr(name, setup, cfg.fig1.snr_db, cfg.fig1.trials, cfg.master_seed)
        for name in cfg.fig1.schemes
    }
    rows = [
        [name, s, p, c.trials] for name, c in curves.items() for s, p in zip(c.snr_db, c.pd)
    ]
    write_csv(Path(out_dir) / "fig1_pd.csv", ("scheme", "snr_db", "pd", "trials"), rows)
    if baseline in curves:
        gain_rows = []
        for name, c in curves.items():
            try:
                gain = snr_gain_at_pd(c, curves[baseline], 0.9)
            except UndefinedMetricError:
                gain = float("nan")
            gain_rows.append([name, gain, predicted_gain_db(name, cfg)])
        write_csv(Path(out_dir) / "fig1_gain.csv", ("scheme", "gain_db_at_pd_0.9", "predicted_db"), gain_rows)
    return curves


# --------------------------------------------------------------------------- fig 2


def cm_rows(cfg: ExperimentConfig) -> list[list]:
    """CM of windowed LFM and DNLFM over the alpha sweep, plus the fixed windows."""
    spec, osf = cfg.waveform, cfg.oversample
    windows = [WindowSpec(WindowKind.COSINE_ALPHA, float(a)) for a in np.linspace(0.5, 1.0, cfg.fig2.alpha_points)]
    windows += [WindowSpec.parse(name) for name in cfg.fig2.windows]
    rows = []
    for win in windows:
        cm_w = cubic_metric_db(generate_windowed_lfm(spec, win, osf).time_samples)
        cm_d = cubic_metric_db(generate_dnlfm(spec, win, cfg.dnlfm_iters, osf).time_samples)
        rows.append([win.label(), win.effective_alpha, cm_w, cm_d, cm_w - cm_d])
    return rows


def fig2(cfg: ExperimentConfig, out_dir: Path) -> list[list]:
    header = ("window", "alpha", "cm_windowed_lfm_db", "cm_dnlfm_db", "delta_cm_db")
    return write_csv(Path(out_dir) / "fig2_cm.csv", header, cm_rows(cfg))


# --------------------------------------------------------------------------- fig 3


def _median_time(fn, repeats: int) -> float:
    """Median wall time of ``fn``; each sample repeats it enough to last >= 20 ms."""
    start = time.perf_counter()
    fn()
    once = max(time.perf_counter() - start, 1e-6)
    inner = max(1, int(0.02 / once))
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(inner):
            fn()
        samples.append((time.perf_counter() - start) / inner)
    return statistics.median(samples)


def fig3(cfg: ExperimentConfig, out_dir: Path, timing: bool = True) -> list[list]:
    spec, win = cfg.waveform, cfg.window
    cases = [("dnlfm", spec.N, lambda: generate_dnlfm(spec, win, cfg.dnlfm_iters))]
    cases.append(("ofdm_nlfm", cfg.ofdm_segments, lambda: generate_ofdm_nlfm(spec, win, cfg.ofdm_segments)))
    for g in cfg.fig3.granularity_factors:
        gran = g * spec.N
        cases.append(("nlfm_oracle", gran, lambda gran=gran: generate_nlfm_oracle(spec, win, gran)))
    rows = []
    for method, parameter, fn in cases:
        nmse = spectral_nmse(fn(), win)
        elapsed = _median_time(fn, cfg.fig3.repeats) if timing else float("nan")
        rows.append([method, parameter, nmse, elapsed])
    header = ("method", "parameter", "spectral_nmse", "median_time_s")
    return write_csv(Path(out_dir) / "fig3_efficiency.csv", header, rows)


# --------------------------------------------------------------------------- fig 4


def theta_grid(points: int) -> np.ndarray:
    """``points`` angles strictly inside (0, pi)."""
    return (np.arange(points) + 0.5) * np.pi / points


@dataclass(frozen=True)
class BeamResult:
    theta: np.ndarray
    power_db: dict[str, np.ndarray]
    pslr_db: dict[str, float]
    islr_db: dict[str, float]


def beam_patterns(window: WindowSpec, L: int, steer_rad: float, points: int, modes=("rx_only", "matched")) -> BeamResult:
    w = make_window(window, L)
    theta = theta_grid(points)
    power, pslr, islr = {}, {}, {}
    for mode in modes:
        p = beam_pattern(w, steer_rad, theta, mode).power
        power[mode] = 10.0 * np.log10(np.maximum(p / p.max(), 1e-300))
        pslr[mode] = pslr_db(p)
        islr[mode] = islr_db(p)
    return BeamResult(theta, power, pslr, islr)


def fig4(cfg: ExperimentConfig, out_dir: Path) -> BeamResult:
    res = beam_patterns(cfg.window, cfg.array.L, np.deg2rad(cfg.fig4.steer_deg), cfg.fig4.grid_points)
    out_dir = Path(out_dir)
    rows = [[np.rad2deg(t), res.power_db["rx_only"][i], res.power_db["matched"][i]] for i, t in enumerate(res.theta)]
    write_csv(out_dir / "fig4_beam.csv", ("theta_deg", "rx_only_db", "matched_db"), rows)
    metric_rows = [[m, res.pslr_db[m], res.islr_db[m]] for m in ("rx_only", "matched")]
    metric_rows.append(
        ["delta", res.pslr_db["matched"] - res.pslr_db["rx_only"], res.islr_db["matched"] - res.islr_db["rx_only"]]
    )
    write_csv(out_dir / "fig4_metrics.csv", ("mode", "pslr_db", "islr_db"), metric_rows)
    return res


def beam_pattern_csv(window: WindowSpec, L: int, steer_deg: float, points: int, mode: str, out_dir: Path) -> BeamResult:
    res = beam_patterns(window, L, np.deg2rad(steer_deg), points, modes=(mode,))
    rows = [[np.rad2deg(t), res.power_db[mode][i]] for i, t in enumerate(res.theta)]
    write_csv(Path(out_dir) / f"beam_{mode}_{_slug(window)}_L{L}.csv", ("theta_deg", "power_db"), rows)
    return res


def detection_map_rows(power: np.ndarray) -> list[list]:
    """``(n, m, |A|^2 dB)`` rows of a range-Doppler power map."""
    db = 10.0 * np.log10(np.maximum(power, 1e-300))
    return [[n, m, db[n, m]] for n in range(db.shape[0]) for m in range(db.shape[1])]


__all__ = [
    "write_csv",
    "write_manifest",
    "gen_waveform",
    "fig1",
    "fig2",
    "fig3",
    "fig4",
    "cm_rows",
    "beam_patterns",
    "beam_pattern_csv",
    "detection_setup",
    "predicted_gain_db",
    "detection_map_rows",
    "theta_grid",
]
