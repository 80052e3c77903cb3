"""Channel estimation, windowed range-Doppler-angle processing and beam patterns."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .airlink import ArrayConfig, ReceivedCube
from .errors import NumericError, ParameterError
from .windows import WindowLike, as_coefficients

ESTIMATION_MODES = ("divide", "normalized", "matched")


@dataclass(frozen=True)
class ChannelCube:
    """Estimated channel ``H[n, m, l]``; leading batch axes are allowed."""

    H: np.ndarray

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.H.shape[-3:]


@dataclass(frozen=True)
class DetectionCube:
    """Complex detection values ``B[n, m, l']`` over range, Doppler and scan angle."""

    B: np.ndarray
    scan_angles: tuple[float, ...]

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.B) ** 2


@dataclass(frozen=True)
class BeamPattern:
    theta_grid: np.ndarray
    gain: np.ndarray
    mode: str

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.gain) ** 2


def estimate_channel(y: ReceivedCube | np.ndarray, x_f, mode: str = "divide") -> ChannelCube:
    """Per-subcarrier channel estimate.

    ``divide``      ``H = Y / x_f``
    ``normalized``  ``H = Y conj(x_f) / |x_f|^2`` (identical to ``divide``)
    ``matched``     ``H = Y conj(x_f)`` without per-bin normalization, so the
                    waveform's own ``|x_f|^2`` acts as the frequency window.
    """
    Y = y.Y if isinstance(y, ReceivedCube) else np.asarray(y)
    x_f = np.asarray(x_f)
    if mode not in ESTIMATION_MODES:
        raise ParameterError(f"mode must be one of {ESTIMATION_MODES}")
    if x_f.size != Y.shape[-3]:
        raise ParameterError(f"x_f has {x_f.size} bins, cube has {Y.shape[-3]} subcarriers")
    col = x_f[:, None, None]
    if mode == "matched":
        return ChannelCube(Y * np.conj(col))
    mag2 = np.abs(x_f) ** 2
    eps = 1e-6 * np.max(np.abs(x_f))
    bad = np.flatnonzero(np.abs(x_f) <= eps)
    if bad.size:
        raise NumericError(f"subcarrier {bad[0]} is too weak to divide by (|x_f| <= {eps:.3e})")
    if mode == "divide":
        return ChannelCube(Y / col)
    return ChannelCube(Y * np.conj(col) / mag2[:, None, None])


def _weights(w: WindowLike | None, length: int, name: str) -> np.ndarray:
    if w is None:
        return np.ones(length)
    c = as_coefficients(w)
    if c.size != length:
        raise ParameterError(f"{name} window has length {c.size}, expected {length}")
    return c


def detection_map(
    h: ChannelCube | np.ndarray,
    theta: float,
    freq_rx_window: WindowLike | None = None,
    time_rx_window: WindowLike | None = None,
    spatial_rx_window: WindowLike | None = None,
) -> np.ndarray:
    """Range-Doppler map at look angle ``theta``.

    ``A[n, m] = (MNL)^-1/2 sum_{i,j,l} H[i,j,l] u_i e^{j2pi in/N} v_j
    e^{-j2pi jm/M} s_l e^{-j pi cos(theta) l}``

    ``u``, ``v``, ``s`` default to all-ones (plain matched processing). Pass
    full windows for receive-only weighting or square-root windows when the
    other half was applied on transmit. Any leading batch axes of ``H`` are
    carried through.
    """
    H = h.H if isinstance(h, ChannelCube) else np.asarray(h)
    N, M, L = H.shape[-3:]
    u = _weights(freq_rx_window, N, "frequency")
    v = _weights(time_rx_window, M, "time")
    s = _weights(spatial_rx_window, L, "spatial") * np.exp(-1j * np.pi * np.cos(theta) * np.arange(L))
    combined = H @ s
    combined = combined * u[:, None] * v[None, :]
    # e^{+j2pi in/N} summed over i is N * ifft; e^{-j2pi jm/M} is fft
    A = np.fft.ifft(np.fft.fft(combined, axis=-1), axis=-2) * N
    return A / np.sqrt(M * N * L)


def spatial_rx_weights(ac: ArrayConfig) -> np.ndarray:
    return ac.rx_weights()


def detection_cube(
    h: ChannelCube | np.ndarray,
    ac: ArrayConfig,
    freq_rx_window: WindowLike | None = None,
    time_rx_window: WindowLike | None = None,
    spatial_rx_window: WindowLike | None = None,
) -> DetectionCube:
    """:func:`detection_map` over every scan angle of ``ac``, stacked on the last axis.

    The spatial receive weights default to those implied by
    ``ac.spatial_window_mode``.
    """
    if spatial_rx_window is None:
        spatial_rx_window = spatial_rx_weights(ac)
    maps = [
        detection_map(h, theta, freq_rx_window, time_rx_window, spatial_rx_window) for theta in ac.scan_angles
    ]
    return DetectionCube(np.stack(maps, axis=-1), tuple(ac.scan_angles))


def beam_pattern(
    window: WindowLike, theta_steer: float, theta_grid: Sequence[float], mode: str = "matched"
) -> BeamPattern:
    """Two-way angle spectrum ``A_T(theta) A_R(theta)`` with unit channel gain.

    In ``rx_only`` mode the transmit factor is unweighted and the receive
    factor carries the full window. In ``matched`` mode both carry its square
    root.
    """
    w = as_coefficients(window)
    L = w.size
    theta_grid = np.asarray(theta_grid, dtype=float)
    if mode == "rx_only":
        tx, rx = np.ones(L), w
    elif mode == "matched":
        tx = rx = np.sqrt(w)
    else:
        raise ParameterError("mode must be 'rx_only' or 'matched'")
    phase = np.exp(1j * np.pi * np.outer(np.cos(theta_grid) - np.cos(theta_steer), np.arange(L)))
    a_t = phase @ tx / np.sqrt(L)
    a_r = phase @ rx / np.sqrt(L)
    return BeamPattern(theta_grid, a_t * a_r, mode)


__all__ = [
    "ChannelCube",
    "DetectionCube",
    "BeamPattern",
    "estimate_channel",
    "detection_map",
    "detection_cube",
    "beam_pattern",
    "spatial_rx_weights",
]
