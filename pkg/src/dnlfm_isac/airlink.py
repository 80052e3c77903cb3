"""Transmit frames and the received frequency-domain cube for point-target scenes.

The channel is applied per subcarrier and per OFDM symbol: a target delay
becomes a linear phase across subcarriers (valid while the delay stays inside
the cyclic prefix) and its Doppler a phase rotation from symbol to symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .dnlfm import Waveform, WaveformSpec
from .errors import ParameterError
from .windows import WindowSpec, make_window, sqrt_split

SPEED_OF_LIGHT = 299_792_458.0

TX_POWER_NORMS = ("per_frame_energy", "none")
SPATIAL_WINDOW_MODES = ("none", "rx_only", "matched")


@dataclass(frozen=True)
class FrameConfig:
    """Symbol repetition layout: ``M`` blocks of ``[CP | symbol | zero gap]``."""

    M: int = 128
    cp_len: int = 128
    gap_len: int = 0
    time_window: WindowSpec = WindowSpec("rectangular")
    tx_power_norm: str = "per_frame_energy"

    def __post_init__(self):
        if self.M < 1:
            raise ParameterError("M must be >= 1")
        if self.cp_len < 0 or self.gap_len < 0:
            raise ParameterError("cp_len and gap_len must be non-negative")
        if self.tx_power_norm not in TX_POWER_NORMS:
            raise ParameterError(f"tx_power_norm must be one of {TX_POWER_NORMS}")

    def repetition_interval(self, spec: WaveformSpec) -> float:
        """Wall-clock time between symbol starts, CP and gap included."""
        return (self.cp_len + spec.N + self.gap_len) / (spec.N * spec.delta_f)

    def symbol_amplitudes(self) -> np.ndarray:
        """Per-symbol transmit scaling ``sqrt(w_m)``, energy-normalized if configured."""
        amp = sqrt_split(make_window(self.time_window, self.M)).coefficients if self.M >= 2 else np.ones(1)
        if self.tx_power_norm == "per_frame_energy":
            amp = amp * np.sqrt(self.M / np.sum(amp**2))
        return amp


@dataclass(frozen=True)
class ArrayConfig:
    """Half-wavelength uniform linear array, same ``L`` elements on transmit and receive."""

    L: int = 32
    scan_angles: tuple[float, ...] = (np.pi / 2,)
    spatial_window: WindowSpec = WindowSpec("hamming")
    spatial_window_mode: str = "none"

    def __post_init__(self):
        if self.L < 1:
            raise ParameterError("L must be >= 1")
        angles = tuple(float(a) for a in np.atleast_1d(self.scan_angles))
        if not angles:
            raise ParameterError("at least one scan angle is required")
        if any(not 0.0 < a < np.pi for a in angles):
            raise ParameterError("scan angles must lie in (0, pi)")
        object.__setattr__(self, "scan_angles", angles)
        if self.spatial_window_mode not in SPATIAL_WINDOW_MODES:
            raise ParameterError(f"spatial_window_mode must be one of {SPATIAL_WINDOW_MODES}")

    def _window(self) -> np.ndarray:
        if self.L < 2:
            return np.ones(self.L)
        return make_window(self.spatial_window, self.L).coefficients

    def tx_weights(self) -> np.ndarray:
        # only the matched mode puts (the square-root half of) the window on transmit
        if self.spatial_window_mode == "matched":
            return np.sqrt(self._window())
        return np.ones(self.L)

    def rx_weights(self) -> np.ndarray:
        if self.spatial_window_mode == "matched":
            return np.sqrt(self._window())
        if self.spatial_window_mode == "rx_only":
            return self._window()
        return np.ones(self.L)


@dataclass(frozen=True)
class Target:
    range_m: float
    velocity_mps: float = 0.0
    angle_rad: float = np.pi / 2
    amplitude: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.range_m < 0:
            raise ParameterError("range_m must be >= 0")
        if not 0.0 < self.angle_rad < np.pi:
            raise ParameterError("target angle must lie in (0, pi)")

    @property
    def delay(self) -> float:
        return 2.0 * self.range_m / SPEED_OF_LIGHT

    def doppler(self, f_c: float) -> float:
        return 2.0 * self.velocity_mps * f_c / SPEED_OF_LIGHT


@dataclass(frozen=True)
class TargetScene:
    """Point targets plus AWGN.

    ``snr_db`` is the per-element SNR of a unit-amplitude target before any
    processing gain; ``None`` means noiseless.
    """

    targets: tuple[Target, ...] = field(default_factory=tuple)
    snr_db: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))

    @property
    def noise_variance(self) -> float:
        if self.snr_db is None:
            return 0.0
        return 10.0 ** (-self.snr_db / 10.0)

    def with_snr(self, snr_db: float | None) -> "TargetScene":
        return replace(self, snr_db=snr_db)


@dataclass(frozen=True)
class ReceivedCube:
    """Frequency-domain samples ``Y[n, m, l]`` (subcarrier, symbol, antenna)."""

    Y: np.ndarray
    spec: WaveformSpec
    frame: FrameConfig
    array: ArrayConfig

    def __post_init__(self):
        expected = (self.spec.N, self.frame.M, self.array.L)
        if self.Y.shape[-3:] != expected:
            raise ParameterError(f"cube shape {self.Y.shape} does not match {expected}")


def range_for_bin(bins: float, spec: WaveformSpec) -> float:
    """Range whose round-trip delay is ``bins / B``."""
    return bins * SPEED_OF_LIGHT / (2.0 * spec.B)


def velocity_for_bin(bins: float, spec: WaveformSpec, frame: FrameConfig) -> float:
    """Radial velocity whose Doppler lands on Doppler bin ``bins``."""
    f_d = bins / (frame.M * frame.repetition_interval(spec))
    return f_d * SPEED_OF_LIGHT / (2.0 * spec.f_c)


def target_bins(target: Target, spec: WaveformSpec, frame: FrameConfig) -> tuple[float, float]:
    """Fractional (range, Doppler) grid position of ``target``."""
    return (
        target.delay * spec.N * spec.delta_f,
        target.doppler(spec.f_c) * frame.M * frame.repetition_interval(spec),
    )


def check_scene(scene: TargetScene, spec: WaveformSpec, frame: FrameConfig) -> None:
    """Refuse targets the per-subcarrier channel model cannot represent."""
    cp_time = frame.cp_len / (spec.N * spec.delta_f)
    max_doppler = 0.5 / frame.repetition_interval(spec)
    for i, tgt in enumerate(scene.targets):
        if tgt.delay > cp_time * (1 + 1e-12):
            raise ParameterError(f"target {i}: delay {tgt.delay:.3e} s exceeds the CP duration {cp_time:.3e} s")
        if tgt.range_m > SPEED_OF_LIGHT / (2.0 * spec.delta_f):
            raise ParameterError(f"target {i}: range beyond the unambiguous window")
        if abs(tgt.doppler(spec.f_c)) > max_doppler * (1 + 1e-12):
            raise ParameterError(f"target {i}: Doppler beyond the unambiguous window")


def build_frame(w: Waveform, fc: FrameConfig) -> np.ndarray:
    """Time-domain transmit frame.

    Each of the ``M`` blocks is ``[CP | symbol | zeros]`` scaled by
    ``sqrt(w_m)`` of the time window. The zero gaps are left silent.
    """
    x = w.time_samples
    if fc.cp_len > x.size:
        raise ParameterError(f"cp_len {fc.cp_len} exceeds the symbol length {x.size}")
    block = np.concatenate([x[x.size - fc.cp_len :], x, np.zeros(fc.gap_len, dtype=complex)])
    amps = fc.symbol_amplitudes()
    return (amps[:, None] * block[None, :]).ravel()


def steering_vector(theta: float, L: int) -> np.ndarray:
    """``a(theta)[l] = exp(j pi cos(theta) l)``."""
    if L < 1:
        raise ParameterError("L must be >= 1")
    return np.exp(1j * np.pi * np.cos(theta) * np.arange(L))


def tx_spectrum(w: Waveform, fc: FrameConfig, freq_window_on_tx: WindowSpec | None = None) -> np.ndarray:
    """Subcarrier symbols actually sent, including any frequency-domain amplitude window."""
    if w.oversample != 1:
        raise ParameterError("the channel model needs a critically sampled waveform")
    X = np.array(w.freq_samples, dtype=complex)
    if freq_window_on_tx is not None:
        X = X * sqrt_split(make_window(freq_window_on_tx, X.size)).coefficients
        if fc.tx_power_norm == "per_frame_energy":
            X = X * np.sqrt(np.sum(np.abs(w.freq_samples) ** 2) / np.sum(np.abs(X) ** 2))
    return X


def noiseless_cube(
    w: Waveform,
    fc: FrameConfig,
    ac: ArrayConfig,
    scene: TargetScene,
    tx_angle: float,
    freq_window_on_tx: WindowSpec | None = None,
) -> np.ndarray:
    spec = w.spec
    check_scene(scene, spec, fc)
    X = tx_spectrum(w, fc, freq_window_on_tx)
    f_n = spec.baseband_frequencies()
    m = np.arange(fc.M)
    l = np.arange(ac.L)
    t_rep = fc.repetition_interval(spec)
    sym_amp = fc.symbol_amplitudes()
    tx_steer = ac.tx_weights() * steering_vector(tx_angle, ac.L)

    Y = np.zeros((spec.N, fc.M, ac.L), dtype=complex)
    for tgt in scene.targets:
        rx_steer = steering_vector(tgt.angle_rad, ac.L)
        g_tx = np.sum(tx_steer * np.conj(rx_steer))
        freq = X * np.exp(-2j * np.pi * f_n * tgt.delay)
        slow = sym_amp * np.exp(2j * np.pi * tgt.doppler(spec.f_c) * m * t_rep)
        Y += (tgt.amplitude * g_tx) * freq[:, None, None] * slow[None, :, None] * rx_steer[None, None, :]
    return Y


def complex_noise(shape, rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian samples with unit variance."""
    z = rng.standard_normal((*shape, 2))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def synth_received_cube(
    w: Waveform,
    fc: FrameConfig,
    ac: ArrayConfig,
    scene: TargetScene,
    tx_angle: float,
    freq_window_on_tx: WindowSpec | None = None,
    seed: int = 0,
) -> ReceivedCube:
    """Received cube for ``scene`` with the transmit beam steered to ``tx_angle``.

    ``Y[n, m, l] = sum_p a_p g_tx(p) X_n s_m exp(-j 2 pi f_n tau_p)
    exp(j 2 pi f_D,p m T_rep) exp(j pi cos(theta_p) l) + noise``,
    where ``X_n`` is the (optionally windowed) transmitted spectrum, ``s_m``
    the symbol amplitude from the time window and ``g_tx`` the transmit beam
    gain toward the target. Deterministic for a given ``seed``.
    """
    Y = noiseless_cube(w, fc, ac, scene, tx_angle, freq_window_on_tx)
    if scene.snr_db is not None:
        rng = np.random.default_rng(seed)
        Y = Y + np.sqrt(scene.noise_variance) * complex_noise(Y.shape, rng)
    return ReceivedCube(Y, w.spec, fc, ac)


def scene_from_dict(data: dict) -> TargetScene:
    """Scene from a parsed description (angles in degrees, amplitudes in dB)."""
    allowed = {"targets", "noise"}
    unknown = set(data) - allowed
    if unknown:
        raise ParameterError(f"unknown scene keys: {sorted(unknown)}")
    targets = []
    for entry in data.get("targets", []):
        extra = set(entry) - {"range_m", "velocity_mps", "angle_deg", "amplitude_db", "phase_deg"}
        if extra:
            raise ParameterError(f"unknown target keys: {sorted(extra)}")
        amp = 10.0 ** (float(entry.get("amplitude_db", 0.0)) / 20.0)
        phase = np.deg2rad(float(entry.get("phase_deg", 0.0)))
        targets.append(
            Target(
                range_m=float(entry["range_m"]),
                velocity_mps=float(entry.get("velocity_mps", 0.0)),
                angle_rad=np.deg2rad(float(entry.get("angle_deg", 90.0))),
                amplitude=amp * np.exp(1j * phase),
            )
        )
    noise = data.get("noise") or {}
    snr = noise.get("snr_db")
    return TargetScene(tuple(targets), None if snr is None else float(snr))


def load_scene(path: str | Path) -> TargetScene:
    with open(path) as fh:
        return scene_from_dict(yaml.safe_load(fh) or {})


def scene_to_dict(scene: TargetScene) -> dict:
    out: dict = {
        "targets": [
            {
                "range_m": t.range_m,
                "velocity_mps": t.velocity_mps,
                "angle_deg": float(np.rad2deg(t.angle_rad)),
                "amplitude_db": float(20.0 * np.log10(abs(t.amplitude))),
                "phase_deg": float(np.rad2deg(np.angle(t.amplitude))),
            }
            for t in scene.targets
        ]
    }
    if scene.snr_db is not None:
        out["noise"] = {"snr_db": scene.snr_db}
    return out


def on_grid_target(
    spec: WaveformSpec,
    frame: FrameConfig,
    range_bin: int,
    doppler_bin: int,
    angle_rad: float = np.pi / 2,
    amplitude: complex = 1.0,
) -> Target:
    return Target(
        range_m=range_for_bin(range_bin, spec),
        velocity_mps=velocity_for_bin(doppler_bin, spec, frame),
        angle_rad=angle_rad,
        amplitude=amplitude,
    )


__all__ = [
    "SPEED_OF_LIGHT",
    "FrameConfig",
    "ArrayConfig",
    "Target",
    "TargetScene",
    "ReceivedCube",
    "build_frame",
    "steering_vector",
    "synth_received_cube",
    "noiseless_cube",
    "complex_noise",
    "tx_spectrum",
    "check_scene",
    "target_bins",
    "range_for_bin",
    "velocity_for_bin",
    "on_grid_target",
    "scene_from_dict",
    "scene_to_dict",
    "load_scene",
]
