"""Experiment configuration: full-scale defaults, a desk-scale preset and YAML loading.

A config file is a YAML mapping with ``schema_version: 1``. Every section is
optional and overrides the chosen preset; unknown keys are rejected so typos
fail before any computation starts::

    schema_version: 1
    preset: desk
    waveform: {N: 256, delta_f: 60000.0, f_c: 12.0e9}
    frame: {M: 32, cp_len: 64, gap_len: 0}
    array: {L: 8, scan_angles_deg: [60.0], spatial_window_mode: none}
    window: hamming
    cfar: {pfa: 1.0e-3, guard: 8, train: 16}
    fig1: {schemes: [lfm_rx, lfm_fmatched], snr_db: [-60, -59], trials: 2000}
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np
import yaml

from .airlink import ArrayConfig, FrameConfig
from .detect import DEFAULT_SCHEMES, SCHEMES, CfarConfig
from .dnlfm import WaveformSpec
from .errors import ParameterError
from .windows import WindowSpec

SCHEMA_VERSION = 1


def snr_sweep(start: float, stop: float, step: float = 0.5) -> tuple[float, ...]:
    """Inclusive, evenly spaced SNR points in dB."""
    count = int(round((stop - start) / step)) + 1
    return tuple(float(v) for v in np.round(start + step * np.arange(count), 6))


@dataclass(frozen=True)
class Fig1Settings:
    schemes: tuple[str, ...] = DEFAULT_SCHEMES
    snr_db: tuple[float, ...] = snr_sweep(-77.0, -68.0)
    trials: int = 2000
    domain: str = "range_doppler"
    tolerance_bins: int = 1
    range_bin: int = 10
    doppler_bin: int = 4

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        for name in self.schemes:
            if name not in SCHEMES:
                raise ParameterError(f"unknown scheme {name!r}; choose from {sorted(SCHEMES)}")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if self.domain not in ("range", "range_doppler"):
            raise ParameterError("domain must be 'range' or 'range_doppler'")


@dataclass(frozen=True)
class Fig2Settings:
    alpha_points: int = 26
    windows: tuple[str, ...] = ("hann", "hamming")

    def __post_init__(self):
        object.__setattr__(self, "windows", tuple(self.windows))
        if self.alpha_points < 2:
            raise ParameterError("alpha_points must be >= 2")


@dataclass(frozen=True)
class Fig3Settings:
    granularity_factors: tuple[int, ...] = (1, 4, 16, 64, 256, 1024)
    repeats: int = 5

    def __post_init__(self):
        object.__setattr__(self, "granularity_factors", tuple(int(g) for g in self.granularity_factors))
        if any(g < 1 for g in self.granularity_factors):
            raise ParameterError("granularity factors must be >= 1")
        if self.repeats < 1:
            raise ParameterError("repeats must be >= 1")


@dataclass(frozen=True)
class Fig4Settings:
    grid_points: int = 4096
    steer_deg: float = 90.0

    def __post_init__(self):
        if self.grid_points < 16:
            raise ParameterError("grid_points must be >= 16")
        if not 0.0 < self.steer_deg < 180.0:
            raise ParameterError("steer_deg must lie in (0, 180)")


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs of the experiment commands. Defaults are the full-scale settings."""

    waveform: WaveformSpec = WaveformSpec(N=1024, delta_f=60e3, f_c=12e9)
    frame: FrameConfig = FrameConfig(M=128, cp_len=128)
    array: ArrayConfig = ArrayConfig(L=32, scan_angles=(np.pi / 2,))
    window: WindowSpec = WindowSpec("hamming")
    cfar: CfarConfig = CfarConfig(pfa=1e-3, guard=8, train=16)
    oversample: int = 4
    dnlfm_iters: int = 10
    ofdm_segments: int = 16
    scene: str | None = None
    master_seed: int = 20240101
    fig1: Fig1Settings = Fig1Settings()
    fig2: Fig2Settings = Fig2Settings()
    fig3: Fig3Settings = Fig3Settings()
    fig4: Fig4Settings = Fig4Settings()
    preset: str = "full"

    def __post_init__(self):
        if self.oversample < 1:
            raise ParameterError("oversample must be >= 1")
        if self.dnlfm_iters < 1:
            raise ParameterError("dnlfm_iters must be >= 1")
        if self.ofdm_segments < 1 or self.waveform.N % self.ofdm_segments:
            raise ParameterError("ofdm_segments must divide N")
        if self.frame.cp_len > self.waveform.N:
            raise ParameterError("cp_len must not exceed N")

    def to_dict(self) -> dict:
        return _plain(asdict(self))

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()


def full_config() -> ExperimentConfig:
    """Full-scale reference settings."""
    return ExperimentConfig()


def desk_config() -> ExperimentConfig:
    """Reduced scale used by the acceptance suite (N=256, M=32, L=8)."""
    return ExperimentConfig(
        waveform=WaveformSpec(N=256, delta_f=60e3, f_c=12e9),
        frame=FrameConfig(M=32, cp_len=64),
        array=ArrayConfig(L=8, scan_angles=(np.pi / 3,)),
        fig1=Fig1Settings(snr_db=snr_sweep(-59.0, -50.0)),
        preset="desk",
    )


PRESETS = {"full": full_config, "desk": desk_config}


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, WindowSpec):
        return obj.label()
    if hasattr(obj, "value"):
        return obj.value
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _check_keys(section: str, data: dict, allowed) -> None:
    unknown = set(data) - set(allowed)
    if unknown:
        raise ParameterError(f"unknown keys in [{section}]: {sorted(unknown)}")


def _coerce(base, section: str, data: dict) -> dict:
    """Cast numeric entries to the type of the preset value they replace.

    YAML 1.1 reads ``12.0e9`` as a string, so numbers are accepted as text too.
    """
    out = {}
    for key, value in data.items():
        current = getattr(base, key)
        if isinstance(current, (int, float)) and not isinstance(current, bool):
            try:
                number = float(value)
            except (TypeError, ValueError):
                raise ParameterError(f"[{section}] {key} must be numeric, got {value!r}") from None
            if isinstance(current, int):
                if number != int(number):
                    raise ParameterError(f"[{section}] {key} must be an integer, got {value!r}")
                number = int(number)
            value = number
        out[key] = value
    return out


def _field_names(cls) -> set[str]:
    return {f.name for f in fields(cls)}


def config_from_dict(data: dict) -> ExperimentConfig:
    """Validate and build a config from a parsed YAML mapping."""
    try:
        return _build(dict(data or {}))
    except ParameterError:
        raise
    except (TypeError, ValueError, AttributeError) as exc:
        raise ParameterError(f"invalid config: {exc}") from None


def _build(data: dict) -> ExperimentConfig:
    version = data.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ParameterError(f"unsupported schema_version {version}; expected {SCHEMA_VERSION}")
    preset = data.pop("preset", "full")
    if preset not in PRESETS:
        raise ParameterError(f"unknown preset {preset!r}")
    cfg = PRESETS[preset]()
    top = {
        "waveform", "frame", "array", "window", "cfar", "oversample", "dnlfm_iters", "ofdm_segments",
        "scene", "master_seed", "fig1", "fig2", "fig3", "fig4",
    }
    _check_keys("top level", data, top)
    updates: dict = {}

    if "waveform" in data:
        _check_keys("waveform", data["waveform"], _field_names(WaveformSpec))
        updates["waveform"] = replace(cfg.waveform, **_coerce(cfg.waveform, "waveform", data["waveform"]))
    if "frame" in data:
        sec = dict(data["frame"])
        _check_keys("frame", sec, _field_names(FrameConfig))
        if "time_window" in sec:
            sec["time_window"] = WindowSpec.parse(sec["time_window"])
        updates["frame"] = replace(cfg.frame, **_coerce(cfg.frame, "frame", sec))
    if "array" in data:
        sec = dict(data["array"])
        _check_keys("array", sec, {"L", "scan_angles_deg", "spatial_window", "spatial_window_mode"})
        if "scan_angles_deg" in sec:
            sec["scan_angles"] = tuple(np.deg2rad(float(a)) for a in sec.pop("scan_angles_deg"))
        if "spatial_window" in sec:
            sec["spatial_window"] = WindowSpec.parse(sec["spatial_window"])
        updates["array"] = replace(cfg.array, **_coerce(cfg.array, "array", sec))
    if "window" in data:
        updates["window"] = WindowSpec.parse(str(data["window"]))
    if "cfar" in data:
        _check_keys("cfar", data["cfar"], _field_names(CfarConfig))
        updates["cfar"] = replace(cfg.cfar, **_coerce(cfg.cfar, "cfar", data["cfar"]))
    scalars = {k: data[k] for k in ("oversample", "dnlfm_iters", "ofdm_segments", "master_seed") if k in data}
    updates.update(_coerce(cfg, "top level", scalars))
    if "scene" in data:
        updates["scene"] = None if data["scene"] is None else str(data["scene"])
    for key, cls in (("fig1", Fig1Settings), ("fig2", Fig2Settings), ("fig3", Fig3Settings), ("fig4", Fig4Settings)):
        if key in data:
            _check_keys(key, data[key], _field_names(cls))
            updates[key] = replace(getattr(cfg, key), **_coerce(getattr(cfg, key), key, data[key]))
    return replace(cfg, preset=preset, **updates)


def read_config_file(path: str | Path) -> dict:
    """Parse a YAML config; a relative scene path is taken relative to the file."""
    path = Path(path)
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ParameterError("config file must contain a mapping")
    if data.get("scene") and not Path(str(data["scene"])).is_absolute():
        data["scene"] = str(path.parent / str(data["scene"]))
    return data


def load_config(path: str | Path) -> ExperimentConfig:
    return config_from_dict(read_config_file(path))


__all__ = [
    "SCHEMA_VERSION",
    "ExperimentConfig",
    "Fig1Settings",
    "Fig2Settings",
    "Fig3Settings",
    "Fig4Settings",
    "snr_sweep",
    "full_config",
    "desk_config",
    "config_from_dict",
    "load_config",
    "read_config_file",
]
