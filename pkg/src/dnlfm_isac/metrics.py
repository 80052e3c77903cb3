"""Scalar figures of merit: cubic metric, sidelobe ratios and SNR gain at a Pd level."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import ParameterError, UndefinedMetricError

if TYPE_CHECKING:
    from .detect import PdCurve

#: 3GPP cubic-metric constants (reference raw metric and empirical slope).
CM_REFERENCE_DB = 1.52
CM_SLOPE = 1.56


@dataclass
class MetricsReport:
    cm_db: float | None = None
    pslr_db: float | None = None
    islr_db: float | None = None
    snr_gain_db: float | None = None


def interpolate_spectrum(x: np.ndarray, factor: int) -> np.ndarray:
    """Band-limited interpolation by zero-padding the centred spectrum.

    The lower-edge bin stays at negative frequency, matching the band-centred
    subcarrier convention.
    """
    x = np.asarray(x)
    if factor == 1:
        return x.copy()
    n = x.size
    X = np.fft.fft(x)
    Z = np.zeros(n * factor, dtype=complex)
    half = n // 2
    Z[:half] = X[:half]
    Z[-(n - half) :] = X[half:]
    return np.fft.ifft(Z) * factor


def cubic_metric_db(time_samples, oversample: int = 1) -> float:
    """Cubic metric of a complex baseband envelope.

    ``(20 log10 rms(v^3) - 1.52) / 1.56`` with ``v = |x| / rms(|x|)``. Any
    constant-modulus input gives ``-1.52 / 1.56``. ``oversample > 1`` first
    interpolates by spectral zero-padding; chirp waveforms are better
    oversampled at synthesis time, which keeps them exactly constant-modulus.
    """
    x = np.asarray(time_samples)
    if oversample < 1:
        raise ParameterError("oversample must be >= 1")
    x = interpolate_spectrum(x, oversample)
    mag = np.abs(x)
    rms = np.sqrt(np.mean(mag * mag))
    if not rms > 0:
        raise ParameterError("cubic metric is undefined for a zero signal")
    v = mag / rms
    raw = 20.0 * np.log10(np.sqrt(np.mean(v**6)))
    return float((raw - CM_REFERENCE_DB) / CM_SLOPE)


def mainlobe_mask(power: np.ndarray) -> np.ndarray:
    """Cells reachable from the global peak by non-increasing steps.

    In 1-D this stops at the first local minimum on each side. In 2-D it is a
    flood fill over 4-neighbours, which stops on the ring of local minima
    around the peak.
    """
    p = np.asarray(power, dtype=float)
    if p.ndim == 1:
        i = int(np.argmax(p))
        lo = i
        while lo > 0 and p[lo - 1] <= p[lo]:
            lo -= 1
        hi = i
        while hi < p.size - 1 and p[hi + 1] <= p[hi]:
            hi += 1
        mask = np.zeros(p.shape, dtype=bool)
        mask[lo : hi + 1] = True
        return mask
    if p.ndim != 2:
        raise ParameterError("profile must be 1-D or 2-D")
    mask = np.zeros(p.shape, dtype=bool)
    start = np.unravel_index(int(np.argmax(p)), p.shape)
    mask[start] = True
    stack = [start]
    rows, cols = p.shape
    while stack:
        r, c = stack.pop()
        for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < rows and 0 <= cc < cols and not mask[rr, cc] and p[rr, cc] <= p[r, c]:
                mask[rr, cc] = True
                stack.append((rr, cc))
    return mask


def _split(power) -> tuple[np.ndarray, np.ndarray, float]:
    p = np.asarray(power, dtype=float)
    if p.size == 0 or np.any(p < 0):
        raise ParameterError("profile must be a non-empty power (|A|^2) array")
    mask = mainlobe_mask(p)
    side = p[~mask]
    if side.size == 0 or not np.max(side) > 0:
        raise UndefinedMetricError("profile has no sidelobe region")
    return p[mask], side, float(np.max(p))


def pslr_db(power) -> float:
    """Peak power over the strongest sidelobe, in dB (larger is better)."""
    _, side, peak = _split(power)
    return float(10.0 * np.log10(peak / np.max(side)))


def islr_db(power) -> float:
    """Mainlobe energy over total sidelobe energy, in dB (larger is better)."""
    main, side, _ = _split(power)
    return float(10.0 * np.log10(np.sum(main) / np.sum(side)))


def _crossing(curve: "PdCurve", level: float) -> float:
    snr = np.asarray(curve.snr_db, dtype=float)
    pd = np.asarray(curve.pd, dtype=float)
    order = np.argsort(snr)
    snr, pd = snr[order], pd[order]
    for i in range(1, snr.size):
        if pd[i - 1] < level <= pd[i]:
            return float(snr[i - 1] + (level - pd[i - 1]) * (snr[i] - snr[i - 1]) / (pd[i] - pd[i - 1]))
    raise UndefinedMetricError(f"curve {getattr(curve, 'scheme', '?')!r} never crosses Pd = {level}")


def snr_gain_at_pd(curve_a: "PdCurve", curve_b: "PdCurve", pd_level: float = 0.9) -> float:
    """SNR advantage of ``curve_a`` over ``curve_b`` at ``pd_level``.

    Each curve's crossing SNR is found by linear interpolation between the
    bracketing sweep points; the gain is ``SNR_b - SNR_a`` in dB.
    """
    return _crossing(curve_b, pd_level) - _crossing(curve_a, pd_level)


__all__ = [
    "MetricsReport",
    "cubic_metric_db",
    "interpolate_spectrum",
    "mainlobe_mask",
    "pslr_db",
    "islr_db",
    "snr_gain_at_pd",
]
