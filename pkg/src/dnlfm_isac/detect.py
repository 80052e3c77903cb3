"""CA-CFAR detection and Monte-Carlo detection-probability curves."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from .airlink import (
    ArrayConfig,
    FrameConfig,
    Target,
    TargetScene,
    complex_noise,
    noiseless_cube,
    on_grid_target,
    target_bins,
)
from .dnlfm import WaveformSpec, generate_dnlfm, generate_lfm
from .errors import ParameterError
from .receiver import detection_map, estimate_channel
from .windows import WindowSpec, make_window, sqrt_split


@dataclass(frozen=True)
class CfarConfig:
    """Cell-averaging CFAR settings; ``guard`` and ``train`` count cells per side."""

    pfa: float = 1e-3
    guard: int = 8
    train: int = 16

    def __post_init__(self):
        if not 0.0 < self.pfa < 1.0:
            raise ParameterError("pfa must lie in (0, 1)")
        if self.train < 1 or self.guard < 0:
            raise ParameterError("need train >= 1 and guard >= 0")


def cfar_scale(pfa: float, n_train) -> np.ndarray:
    """Threshold multiplier ``N_t (pfa^(-1/N_t) - 1)`` for square-law exponential noise."""
    n_train = np.asarray(n_train, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return n_train * (pfa ** (-1.0 / n_train) - 1.0)


class CfarResult(NamedTuple):
    mask: np.ndarray
    thresholds: np.ndarray


def cfar_1d(power_profile, cfg: CfarConfig) -> CfarResult:
    """Square-law CA-CFAR along the last axis, wrapping circularly at the ends."""
    p = np.asarray(power_profile, dtype=float)
    n = p.shape[-1]
    if n <= 2 * (cfg.guard + cfg.train):
        raise ParameterError(f"profile length {n} must exceed 2 * (guard + train) = {2 * (cfg.guard + cfg.train)}")
    total = np.zeros_like(p)
    for k in range(cfg.guard + 1, cfg.guard + cfg.train + 1):
        total += np.roll(p, k, axis=-1) + np.roll(p, -k, axis=-1)
    n_train = 2 * cfg.train
    thresholds = cfar_scale(cfg.pfa, n_train) * total / n_train
    return CfarResult(p > thresholds, thresholds)


def _box_sum(p: np.ndarray, half: int, axis: int) -> np.ndarray:
    """Sum over ``[i - half, i + half]`` along ``axis``, truncated at the edges."""
    n = p.shape[axis]
    cs = np.cumsum(p, axis=axis)
    zero = np.zeros_like(np.take(cs, [0], axis=axis))
    cs = np.concatenate([zero, cs], axis=axis)
    idx = np.arange(n)
    upper = np.take(cs, np.minimum(idx + half + 1, n), axis=axis)
    lower = np.take(cs, np.maximum(idx - half, 0), axis=axis)
    return upper - lower


def _box_count(n: int, half: int) -> np.ndarray:
    idx = np.arange(n)
    return (np.minimum(idx + half, n - 1) - np.maximum(idx - half, 0) + 1).astype(float)


def cfar_2d(power_map, cfg: CfarConfig) -> np.ndarray:
    """2-D CA-CFAR over the last two axes with a rectangular training annulus.

    The annulus is ``guard`` + ``train`` cells per side on each axis minus
    the guard block. At map edges the annulus is truncated and the threshold
    uses the number of training cells actually present.
    """
    p = np.asarray(power_map, dtype=float)
    if p.ndim < 2:
        raise ParameterError("power_map must be at least 2-D")
    rows, cols = p.shape[-2:]
    outer = cfg.guard + cfg.train
    if rows < 2 or cols < 2:
        raise ParameterError("power_map is too small for 2-D CFAR")
    outer_sum = _box_sum(_box_sum(p, outer, -2), outer, -1)
    inner_sum = _box_sum(_box_sum(p, cfg.guard, -2), cfg.guard, -1)
    n_outer = np.outer(_box_count(rows, outer), _box_count(cols, outer))
    n_inner = np.outer(_box_count(rows, cfg.guard), _box_count(cols, cfg.guard))
    n_train = n_outer - n_inner
    with np.errstate(divide="ignore", invalid="ignore"):
        noise = (outer_sum - inner_sum) / n_train
        threshold = cfar_scale(cfg.pfa, n_train) * noise
    return np.where(n_train > 0, p > threshold, False)


def _circular_distance(a, b, n):
    d = np.abs(np.asarray(a) - b) % n
    return np.minimum(d, n - d)


def score_hit(
    mask: np.ndarray,
    scene: TargetScene,
    spec: WaveformSpec,
    frame: FrameConfig,
    tolerance_bins: int = 1,
) -> np.ndarray:
    """Whether each target has a detection within ``tolerance_bins`` of its true cell.

    ``mask`` is a range profile (1-D) or a range-Doppler map (2-D); distances
    wrap around like the DFT bins they index.
    """
    mask = np.asarray(mask, dtype=bool)
    hits = np.zeros(len(scene.targets), dtype=bool)
    flagged = np.argwhere(mask)
    if flagged.size == 0:
        return hits
    for i, tgt in enumerate(scene.targets):
        r_bin, d_bin = target_bins(tgt, spec, frame)
        near = _circular_distance(flagged[:, 0], round(r_bin), mask.shape[0]) <= tolerance_bins
        if mask.ndim == 2:
            near &= _circular_distance(flagged[:, 1], round(d_bin), mask.shape[1]) <= tolerance_bins
        hits[i] = bool(np.any(near))
    return hits


WINDOW_PLACEMENTS = ("none", "rx_only", "matched")


@dataclass(frozen=True)
class Scheme:
    """Waveform plus where the frequency and time windows are applied.

    ``matched`` splits the window as square roots over transmit and receive;
    ``rx_only`` puts the whole window on receive. DNLFM carries its frequency
    window in the waveform itself, so its frequency placement is always
    ``matched``.
    """

    name: str
    waveform: str = "lfm"
    freq_window: str = "rx_only"
    time_window: str = "rx_only"

    def __post_init__(self):
        if self.waveform not in ("lfm", "dnlfm"):
            raise ParameterError(f"unknown waveform {self.waveform!r}")
        for placement in (self.freq_window, self.time_window):
            if placement not in WINDOW_PLACEMENTS:
                raise ParameterError(f"window placement must be one of {WINDOW_PLACEMENTS}")
        if self.waveform == "dnlfm" and self.freq_window != "matched":
            raise ParameterError("DNLFM shapes its spectrum on transmit; its frequency placement is 'matched'")


SCHEMES = {
    s.name: s
    for s in (
        Scheme("lfm_plain", "lfm", "none", "none"),
        Scheme("lfm_rx", "lfm", "rx_only", "rx_only"),
        Scheme("lfm_fmatched", "lfm", "matched", "rx_only"),
        Scheme("dnlfm", "dnlfm", "matched", "rx_only"),
        Scheme("lfm_tfmatched", "lfm", "matched", "matched"),
        Scheme("dnlfm_tfmatched", "dnlfm", "matched", "matched"),
    )
}

#: Schemes emitted by default; ``lfm_plain`` (no window at all) is opt-in.
DEFAULT_SCHEMES = ("lfm_rx", "lfm_fmatched", "dnlfm", "lfm_tfmatched", "dnlfm_tfmatched")


@dataclass(frozen=True)
class DetectionSetup:
    """Everything fixed across one Pd-vs-SNR sweep."""

    spec: WaveformSpec = WaveformSpec(N=256)
    frame: FrameConfig = FrameConfig(M=32, cp_len=64)
    array: ArrayConfig = ArrayConfig(L=8, scan_angles=(np.pi / 3,))
    window: WindowSpec = WindowSpec("hamming")
    cfar: CfarConfig = CfarConfig()
    target: Target | None = None
    domain: str = "range_doppler"
    tolerance_bins: int = 1
    dnlfm_iters: int = 10

    def __post_init__(self):
        if self.domain not in ("range", "range_doppler"):
            raise ParameterError("domain must be 'range' or 'range_doppler'")
        if self.target is None:
            tgt = on_grid_target(self.spec, self.frame, 10, 4, self.array.scan_angles[0])
            object.__setattr__(self, "target", tgt)


@dataclass
class PdCurve:
    scheme: str
    snr_db: np.ndarray
    pd: np.ndarray
    trials: int
    hits: np.ndarray = field(default=None, repr=False)


class _Chain:
    """Pre-computed, noise-independent parts of one scheme's sensing chain."""

    def __init__(self, scheme: Scheme, setup: DetectionSetup):
        spec, win = setup.spec, setup.window
        if scheme.waveform == "dnlfm":
            wave = generate_dnlfm(spec, win, setup.dnlfm_iters)
        else:
            wave = generate_lfm(spec)
        time_tx = win if scheme.time_window == "matched" else WindowSpec("rectangular")
        self.frame = replace(setup.frame, time_window=time_tx, tx_power_norm="per_frame_energy")
        freq_tx = win if scheme.waveform == "lfm" and scheme.freq_window == "matched" else None
        self.scene = TargetScene((setup.target,))
        self.theta = setup.target.angle_rad
        self.clean = noiseless_cube(wave, self.frame, setup.array, self.scene, self.theta, freq_tx)
        self.x_f = wave.freq_samples
        self.estimation = "matched" if scheme.waveform == "dnlfm" else "divide"

        def rx(placement, length):
            if placement == "none":
                return None
            full = make_window(win, length)
            return full if placement == "rx_only" else sqrt_split(full)

        self.u = None if scheme.waveform == "dnlfm" else rx(scheme.freq_window, spec.N)
        self.v = rx(scheme.time_window, setup.frame.M)
        self.s = setup.array.rx_weights()
        r_bin, d_bin = target_bins(setup.target, spec, self.frame)
        self.bins = (round(r_bin) % spec.N, round(d_bin) % setup.frame.M)

    def power_map(self, Y: np.ndarray) -> np.ndarray:
        H = estimate_channel(Y, self.x_f, self.estimation)
        A = detection_map(H, self.theta, self.u, self.v, self.s)
        return np.abs(A) ** 2


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Independent substream for one Monte-Carlo trial."""
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(trial,)))


def _hits(power: np.ndarray, chain: _Chain, setup: DetectionSetup) -> np.ndarray:
    r0, d0 = chain.bins
    tol = setup.tolerance_bins
    N, M = power.shape[-2:]
    r_near = _circular_distance(np.arange(N), r0, N) <= tol
    if setup.domain == "range":
        mask = cfar_1d(power[..., :, d0], setup.cfar).mask
        return np.any(mask[..., r_near], axis=-1)
    mask = cfar_2d(power, setup.cfar)
    d_near = _circular_distance(np.arange(M), d0, M) <= tol
    return np.any(mask[..., r_near, :][..., d_near], axis=(-2, -1))


def pd_vs_snr(
    scheme: Scheme | str,
    setup: DetectionSetup,
    snr_db: Sequence[float],
    trials: int,
    master_seed: int = 0,
    batch: int = 16,
) -> PdCurve:
    """Detection probability of ``scheme`` over an SNR sweep.

    Each trial runs scene, received cube, channel estimate, detection map,
    CFAR and hit scoring. Trial ``i`` draws its noise from the substream
    ``(master_seed, i)``, the same at every SNR and for every scheme, so
    curves from one seed are directly comparable.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if isinstance(scheme, str):
        scheme = SCHEMES[scheme]
    chain = _Chain(scheme, setup)
    snr_db = np.asarray(snr_db, dtype=float)
    sigma = np.sqrt(10.0 ** (-snr_db / 10.0))
    hits = np.zeros((snr_db.size, trials), dtype=bool)
    for start in range(0, trials, batch):
        idx = range(start, min(start + batch, trials))
        Z = np.stack([complex_noise(chain.clean.shape, trial_rng(master_seed, i)) for i in idx])
        for k, s in enumerate(sigma):
            hits[k, idx.start : idx.stop] = _hits(chain.power_map(chain.clean + s * Z), chain, setup)
    return PdCurve(scheme.name, snr_db, hits.mean(axis=1), trials, hits)


__all__ = [
    "CfarConfig",
    "CfarResult",
    "cfar_scale",
    "cfar_1d",
    "cfar_2d",
    "score_hit",
    "Scheme",
    "SCHEMES",
    "DEFAULT_SCHEMES",
    "DetectionSetup",
    "PdCurve",
    "pd_vs_snr",
    "trial_rng",
]
