"""Discrete window family, amplitude split, mismatch loss and spectral antiderivatives.

Window coefficients are power-domain weights ``w_n``. Anything that scales a
signal amplitude goes through :func:`sqrt_split`, so a transmit/receive pair
of split windows reproduces ``w`` exactly.

Every supported kind is a cosine sum ``sum_m a_m cos(2 pi m x)`` with
``sum_m a_m = 1``; the discrete window and the continuous band density both
derive from those terms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import ParameterError


class WindowKind(str, enum.Enum):
    RECTANGULAR = "rectangular"
    COSINE_ALPHA = "cosine_alpha"
    HANN = "hann"
    HAMMING = "hamming"
    BLACKMAN = "blackman"


_FIXED_ALPHA = {WindowKind.HANN: 0.5, WindowKind.HAMMING: 0.54}


@dataclass(frozen=True)
class WindowSpec:
    """Shape of a window.

    ``alpha`` is only read for ``cosine_alpha``; ``hann`` and ``hamming`` are
    the fixed members alpha = 0.5 and alpha = 0.54 of the same family.
    """

    kind: WindowKind = WindowKind.RECTANGULAR
    alpha: float = 1.0

    def __post_init__(self):
        try:
            kind = WindowKind(self.kind)
        except ValueError:
            raise ParameterError(f"unknown window kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if kind is WindowKind.COSINE_ALPHA and not 0.5 <= self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in [0.5, 1], got {self.alpha}")

    @classmethod
    def parse(cls, text: str) -> "WindowSpec":
        """Build from ``"hamming"`` or ``"cosine_alpha:0.6"`` style strings."""
        kind, _, alpha = text.partition(":")
        if alpha:
            return cls(WindowKind.COSINE_ALPHA, float(alpha))
        return cls(kind.strip())

    @property
    def effective_alpha(self) -> float | None:
        if self.kind is WindowKind.COSINE_ALPHA:
            return self.alpha
        if self.kind is WindowKind.RECTANGULAR:
            return 1.0
        return _FIXED_ALPHA.get(self.kind)

    @property
    def cosine_terms(self) -> tuple[float, ...]:
        """Coefficients ``a_m`` of the band-centred density ``sum_m a_m cos(2 pi m f / B)``."""
        if self.kind is WindowKind.BLACKMAN:
            return (0.42, 0.5, 0.08)
        a = self.effective_alpha
        if a == 1.0:
            return (1.0,)
        return (a, 1.0 - a)

    def label(self) -> str:
        if self.kind is WindowKind.COSINE_ALPHA:
            return f"cosine_alpha:{self.alpha:g}"
        return self.kind.value


@dataclass(frozen=True)
class WindowSamples:
    """Sampled power-domain window of length ``L_W``."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ParameterError("window coefficients must be a non-empty 1-D sequence")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def length(self) -> int:
        return self.coefficients.size

    def __len__(self) -> int:
        return self.length

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coefficients, dtype=dtype)


WindowLike = Union[WindowSamples, Sequence[float], np.ndarray]


def as_coefficients(w: WindowLike) -> np.ndarray:
    if isinstance(w, WindowSamples):
        return w.coefficients
    return np.asarray(w, dtype=float)


def make_window(spec: WindowSpec, length: int) -> WindowSamples:
    """Sample ``spec`` on ``length`` points with its peak at index ``length // 2``.

    For the cosine-alpha family this is ``alpha - (1 - alpha) cos(2 pi n / length)``.
    """
    if length < 2:
        raise ParameterError(f"window length must be >= 2, got {length}")
    n = np.arange(length)
    w = np.zeros(length)
    for m, a in enumerate(spec.cosine_terms):
        # (-1)^m moves the peak of cos(2 pi m (n - L/2) / L) onto n = L/2
        w += a * (-1.0) ** m * np.cos(2.0 * np.pi * m * n / length)
    w = np.clip(w, 0.0, None)
    return WindowSamples(w / w.max())


def sqrt_split(w: WindowLike) -> WindowSamples:
    """Amplitude half of a power window; applying it twice gives back ``w``."""
    return WindowSamples(np.sqrt(as_coefficients(w)))


def mismatch_loss_db(w: WindowLike) -> float:
    """SNR loss in dB of receive-only windowing relative to a matched filter.

    ``10 log10(L_W sum(w^2) / sum(w)^2)``, non-negative by Cauchy-Schwarz and
    zero only for a constant window.
    """
    c = as_coefficients(w)
    if not np.any(c != 0):
        raise ParameterError("mismatch loss is undefined for an all-zero window")
    # Ratio is formed on the max-normalized copy to keep sums well scaled.
    c = c / np.max(np.abs(c))
    ratio = c.size * np.sum(c * c) / np.sum(c) ** 2
    return float(max(10.0 * np.log10(ratio), 0.0))


def v2_density(spec: WindowSpec, bandwidth: float) -> Callable[[np.ndarray], np.ndarray]:
    """Continuous spectral weight ``V^2(f)`` on ``[-B/2, B/2]``, peaking at ``f = 0``."""
    terms = spec.cosine_terms
    B = float(bandwidth)

    def v2(f):
        f = np.asarray(f, dtype=float)
        out = np.full(f.shape, terms[0])
        for m, a in enumerate(terms[1:], start=1):
            out = out + a * np.cos(2.0 * np.pi * m * f / B)
        return out

    return v2


def v2_antiderivatives(
    spec: WindowSpec, bandwidth: float
) -> tuple[Callable[[np.ndarray], np.ndarray], Callable[[np.ndarray], np.ndarray]]:
    """First and second antiderivatives of ``V^2`` anchored at ``-B/2``.

    Returns ``(I1, I2)`` with ``I1(f) = int_{-B/2}^f V^2`` and
    ``I2(f) = int_{-B/2}^f I1``, both integrated termwise in closed form.
    """
    terms = spec.cosine_terms
    B = float(bandwidth)

    def I1(f):
        f = np.asarray(f, dtype=float)
        x = f + 0.5 * B
        out = terms[0] * x
        for m, a in enumerate(terms[1:], start=1):
            scale = B / (2.0 * np.pi * m)
            # sin(2 pi m f / B) == (-1)^m sin(2 pi m x / B); exact zero at x = 0
            out = out + a * scale * (-1.0) ** m * np.sin(2.0 * np.pi * m * x / B)
        return out

    def I2(f):
        f = np.asarray(f, dtype=float)
        x = f + 0.5 * B
        out = 0.5 * terms[0] * x * x
        for m, a in enumerate(terms[1:], start=1):
            scale = B / (2.0 * np.pi * m)
            # cos(2 pi m f / B) - cos(-pi m), written with the product identity
            # so the value is exactly zero at f = -B/2
            delta = -2.0 * np.sin(np.pi * m * x / B) * np.sin(np.pi * m * (f / B - 0.5))
            out = out - a * scale * scale * delta
        return out

    return I1, I2
