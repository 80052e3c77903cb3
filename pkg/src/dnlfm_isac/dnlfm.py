"""Constant-modulus chirp synthesis with a prescribed power spectrum.

The group delay ``T(f)`` of a chirp whose spectrum should follow ``V^2(f)`` is
``T(f) = -(k / 2 pi) I1(f)``, with ``k`` fixed so the sweep ends at
``T(B/2) = T_sym``. The discrete NLFM waveform is produced by

1. solving ``T(f_n) = t_n`` at each sampling instant with safeguarded Newton
   steps, then
2. evaluating the phase through the equal-area identity
   ``phi(t_n) = 2 pi f_n t_n + Phi(f_n) - Phi(-B/2)`` with ``Phi = k I2``.

No inverse function or numerical integral is needed. Two baselines are kept
for comparison: the conventional numerical inversion of ``T`` and a
polyline (piecewise LFM) approximation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, ParameterError
from .windows import WindowKind, WindowSpec, v2_antiderivatives, v2_density

#: Residual target of the frequency solve, as a fraction of ``T_sym``.
RESIDUAL_TOL = 1e-9


class Provenance(str, enum.Enum):
    LFM = "lfm"
    WINDOWED_LFM = "windowed_lfm"
    DNLFM = "dnlfm"
    NLFM_ORACLE = "nlfm_oracle"
    OFDM_NLFM = "ofdm_nlfm"


@dataclass(frozen=True)
class WaveformSpec:
    """OFDM numerology of one sensing symbol.

    Attributes
    ----------
    N : int
        Effective subcarrier count (power of two, at least 8).
    delta_f : float
        Subcarrier spacing in Hz.
    f_c : float
        Carrier frequency in Hz. Only used for Doppler bookkeeping.
    """

    N: int = 1024
    delta_f: float = 60e3
    f_c: float = 12e9

    def __post_init__(self):
        if self.N < 8 or self.N & (self.N - 1):
            raise ParameterError(f"N must be a power of two >= 8, got {self.N}")
        if not self.delta_f > 0:
            raise ParameterError("delta_f must be positive")
        if not self.f_c > 0:
            raise ParameterError("f_c must be positive")

    @property
    def B(self) -> float:
        return self.N * self.delta_f

    @property
    def T_sym(self) -> float:
        return 1.0 / self.delta_f

    def sample_times(self, oversample: int = 1) -> np.ndarray:
        n_samples = self.N * oversample
        return np.arange(n_samples) * (self.T_sym / n_samples)

    def baseband_frequencies(self, oversample: int = 1) -> np.ndarray:
        """Frequencies of the band-centred DFT bins, ``(n - K/2) delta_f``."""
        n_samples = self.N * oversample
        return (np.arange(n_samples) - n_samples // 2) * self.delta_f


def to_frequency(x_t: np.ndarray) -> np.ndarray:
    """Unitary DFT with bins reordered so index ``n`` is frequency ``(n - K/2) delta_f``."""
    x_t = np.asarray(x_t)
    return np.fft.fftshift(np.fft.fft(x_t, norm="ortho"), axes=-1)


def to_time(x_f: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_frequency`."""
    return np.fft.ifft(np.fft.ifftshift(np.asarray(x_f), axes=-1), norm="ortho")


@dataclass(frozen=True)
class Waveform:
    """One sensing symbol in time and (band-centred) frequency."""

    time_samples: np.ndarray
    freq_samples: np.ndarray
    sample_times: np.ndarray
    provenance: Provenance
    spec: WaveformSpec
    inst_freq: np.ndarray = field(default_factory=lambda: np.empty(0))
    phase: np.ndarray | None = None

    @classmethod
    def from_phase(cls, phase, spec, provenance, inst_freq=None, oversample=1):
        x_t = np.exp(1j * phase)
        return cls(
            time_samples=x_t,
            freq_samples=to_frequency(x_t),
            sample_times=spec.sample_times(oversample),
            provenance=Provenance(provenance),
            spec=spec,
            inst_freq=np.empty(0) if inst_freq is None else np.asarray(inst_freq),
            phase=np.asarray(phase),
        )

    def __len__(self) -> int:
        return self.time_samples.size

    @property
    def oversample(self) -> int:
        return self.time_samples.size // self.spec.N


@dataclass(frozen=True)
class GroupDelayModel:
    """Continuous group-delay law of a chirp targeting the spectrum of ``window``.

    ``Phi''(f) = k V^2(f)``, ``Phi'(f) = k I1(f)``, ``Phi(f) = k I2(f)`` and
    ``T(f) = -Phi'(f) / (2 pi)``. ``k`` is negative.
    """

    k: float
    window: WindowSpec
    B: float
    T_sym: float

    def __post_init__(self):
        I1, I2 = v2_antiderivatives(self.window, self.B)
        object.__setattr__(self, "_v2", v2_density(self.window, self.B))
        object.__setattr__(self, "_I1", I1)
        object.__setattr__(self, "_I2", I2)

    def phi2(self, f):
        return self.k * self._v2(f)

    def phi1(self, f):
        return self.k * self._I1(f)

    def phi(self, f):
        return self.k * self._I2(f)

    def group_delay(self, f):
        return -self.phi1(f) / (2.0 * np.pi)

    def group_delay_slope(self, f):
        return -self.phi2(f) / (2.0 * np.pi)


def build_group_delay_model(window: WindowSpec, spec: WaveformSpec) -> GroupDelayModel:
    """Fix the curvature scale ``k`` so that ``T(B/2) = T_sym``."""
    I1, _ = v2_antiderivatives(window, spec.B)
    total = float(I1(0.5 * spec.B))
    if not total > 0:
        raise ParameterError(f"window {window.label()} integrates to zero over the band")
    return GroupDelayModel(k=-2.0 * np.pi * spec.T_sym / total, window=window, B=spec.B, T_sym=spec.T_sym)


def solve_frequency_grid(
    model: GroupDelayModel, N: int, max_iters: int = 10, safeguard_budget: int | None = None
) -> np.ndarray:
    """Frequencies ``f_n`` with ``T(f_n) = n T_sym / N``.

    Newton's update ``f <- f - (Phi'(f) + 2 pi t_n) / Phi''(f)`` starts from
    ``f = 0`` and runs ``max_iters`` times. Each iterate keeps a bracket of the
    root; a step that leaves it, or a vanishing ``Phi''`` (Hann at the band
    edges), falls back to bisection. Elements still above the residual target
    get up to ``safeguard_budget`` (default ``4 * max_iters``) further
    safeguarded steps before a :class:`ConvergenceError` is raised.
    All ``N`` solves run elementwise, so results do not depend on ordering.
    """
    if max_iters < 1:
        raise ParameterError("max_iters must be >= 1")
    if safeguard_budget is None:
        safeguard_budget = 4 * max_iters
    half = 0.5 * model.B
    t = np.arange(N) * (model.T_sym / N)
    tol = RESIDUAL_TOL * model.T_sym
    slope_floor = 1e-12 * abs(model.k)

    f = np.zeros(N)
    lo = np.full(N, -half)
    hi = np.full(N, half)

    def step(f, lo, hi):
        g = model.group_delay(f) - t
        # converged to rounding level; further steps would only jitter
        active = np.abs(g) > 1e-15 * model.T_sym
        below = g < 0
        lo = np.where(below, f, lo)
        hi = np.where(below, hi, f)
        d2 = model.phi2(f)
        safe = np.abs(d2) > slope_floor
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = f - (model.phi1(f) + 2.0 * np.pi * t) / np.where(safe, d2, 1.0)
        inside = safe & (newton >= lo) & (newton <= hi)
        f_next = np.where(inside, newton, 0.5 * (lo + hi))
        return np.where(active, f_next, f), lo, hi

    for _ in range(max_iters):
        f, lo, hi = step(f, lo, hi)
    residual = np.abs(model.group_delay(f) - t)
    extra = 0
    while np.any(residual > tol) and extra < safeguard_budget:
        f, lo, hi = step(f, lo, hi)
        residual = np.abs(model.group_delay(f) - t)
        extra += 1
    # t_0 = 0 is the band edge itself; pin it so phi(t_0) = 0 exactly
    f[0] = -half
    residual[0] = abs(float(model.group_delay(-half)))
    if np.any(residual > tol):
        raise ConvergenceError("frequency grid solve did not converge", float(residual.max() / model.T_sym))
    return f


def phase_samples(model: GroupDelayModel, f_n, t_n) -> np.ndarray:
    """Unwrapped phase ``2 pi f_n t_n + Phi(f_n) - Phi(-B/2)`` in radians."""
    f_n = np.asarray(f_n, dtype=float)
    t_n = np.asarray(t_n, dtype=float)
    if f_n.shape != t_n.shape:
        raise ParameterError("f_n and t_n must have the same shape")
    half = 0.5 * model.B
    if np.any(f_n < -half * (1 + 1e-12)) or np.any(f_n > half * (1 + 1e-12)):
        raise ParameterError("f_n must lie within [-B/2, B/2]")
    return 2.0 * np.pi * f_n * t_n + model.phi(f_n) - model.phi(-half)


def generate_dnlfm(
    spec: WaveformSpec, window: WindowSpec, max_iters: int = 10, oversample: int = 1
) -> Waveform:
    """Discrete NLFM symbol whose power spectrum follows ``window``.

    ``oversample`` evaluates the same phase law on a finer time grid
    (``N * oversample`` samples per symbol); the band is unchanged.
    """
    model = build_group_delay_model(window, spec)
    n_samples = spec.N * oversample
    f_n = solve_frequency_grid(model, n_samples, max_iters)
    t_n = spec.sample_times(oversample)
    return Waveform.from_phase(phase_samples(model, f_n, t_n), spec, Provenance.DNLFM, f_n, oversample)


def generate_lfm(spec: WaveformSpec, oversample: int = 1) -> Waveform:
    """Linear up-chirp from ``-B/2`` to ``B/2`` over one symbol."""
    t = spec.sample_times(oversample)
    rate = spec.B / spec.T_sym
    phase = np.pi * rate * t * t - np.pi * spec.B * t
    return Waveform.from_phase(phase, spec, Provenance.LFM, rate * t - 0.5 * spec.B, oversample)


def generate_windowed_lfm(spec: WaveformSpec, window: WindowSpec, oversample: int = 1) -> Waveform:
    """LFM with the amplitude window ``sqrt(V^2(f))`` applied across its spectrum.

    At ``oversample = 1`` the weights are exactly ``sqrt_split(make_window(window, N))``.
    Outside the band (only present when oversampled) the band-edge weight is held.
    """
    lfm = generate_lfm(spec, oversample)
    f = np.clip(spec.baseband_frequencies(oversample), -0.5 * spec.B, 0.5 * spec.B)
    v2 = v2_density(window, spec.B)(f)
    x_f = lfm.freq_samples * np.sqrt(np.clip(v2 / np.max(v2), 0.0, None))
    return Waveform(
        time_samples=to_time(x_f),
        freq_samples=x_f,
        sample_times=lfm.sample_times,
        provenance=Provenance.WINDOWED_LFM,
        spec=spec,
    )


def generate_nlfm_oracle(spec: WaveformSpec, window: WindowSpec, granularity: int) -> Waveform:
    """Conventional NLFM by numerical inversion of the group delay.

    ``T(f)`` is tabulated on ``granularity + 1`` uniform frequencies, inverted
    by monotone linear interpolation onto a time grid of the same size, and
    ``phi(t) = 2 pi int_0^t f`` is accumulated by the trapezoid rule.
    """
    if granularity < spec.N:
        raise ParameterError(f"granularity must be >= N ({spec.N}), got {granularity}")
    model = build_group_delay_model(window, spec)
    f_grid = np.linspace(-0.5 * spec.B, 0.5 * spec.B, granularity + 1)
    T_grid = model.group_delay(f_grid)
    t_grid = np.linspace(0.0, spec.T_sym, granularity + 1)
    f_of_t = np.interp(t_grid, T_grid, f_grid)
    dt = spec.T_sym / granularity
    phase_grid = np.empty_like(t_grid)
    phase_grid[0] = 0.0
    np.cumsum(np.pi * dt * (f_of_t[1:] + f_of_t[:-1]), out=phase_grid[1:])
    t_n = spec.sample_times()
    if granularity % spec.N == 0:
        idx = np.arange(spec.N) * (granularity // spec.N)
        phase, f_n = phase_grid[idx], f_of_t[idx]
    else:
        phase = np.interp(t_n, t_grid, phase_grid)
        f_n = np.interp(t_n, t_grid, f_of_t)
    return Waveform.from_phase(phase, spec, Provenance.NLFM_ORACLE, f_n)


def generate_ofdm_nlfm(spec: WaveformSpec, window: WindowSpec, segments: int = 16) -> Waveform:
    """Polyline approximation of the NLFM frequency law by ``segments`` sub-chirps.

    Segment boundaries sit on the DNLFM frequency curve; each segment is an LFM
    between its boundary frequencies, with phase carried across boundaries.
    """
    if segments < 1 or spec.N % segments:
        raise ParameterError(f"segments must divide N ({spec.N}), got {segments}")
    model = build_group_delay_model(window, spec)
    f_edges = np.append(solve_frequency_grid(model, segments), 0.5 * spec.B)
    seg_len = spec.T_sym / segments
    slopes = np.diff(f_edges) / seg_len
    # phase accumulated at each boundary: integral of the linear frequency
    seg_phase = 2.0 * np.pi * seg_len * 0.5 * (f_edges[1:] + f_edges[:-1])
    start_phase = np.concatenate(([0.0], np.cumsum(seg_phase)[:-1]))

    t = spec.sample_times()
    seg = np.arange(spec.N) // (spec.N // segments)
    tau = t - seg * seg_len
    phase = start_phase[seg] + 2.0 * np.pi * (f_edges[seg] * tau + 0.5 * slopes[seg] * tau * tau)
    return Waveform.from_phase(phase, spec, Provenance.OFDM_NLFM, f_edges[seg] + slopes[seg] * tau)


def spectral_nmse(w: Waveform, target: WindowSpec) -> float:
    """Normalized squared error between the waveform's power spectrum and ``target``.

    Both the spectrum and the target (sampled on the band-centred DFT grid,
    zero outside the band) are scaled to unit sum first.
    """
    p = np.abs(w.freq_samples) ** 2
    p = p / p.sum()
    f = w.spec.baseband_frequencies(w.oversample)
    v = np.where(np.abs(f) <= 0.5 * w.spec.B, v2_density(target, w.spec.B)(f), 0.0)
    v = np.clip(v, 0.0, None)
    q = v / v.sum()
    return float(np.sum((p - q) ** 2) / np.sum(q * q))


def waveform_by_name(kind: str, spec: WaveformSpec, window: WindowSpec, **options) -> Waveform:
    """Dispatch on a provenance name, as used by the command line."""
    kind = Provenance(kind)
    if kind is Provenance.LFM:
        return generate_lfm(spec, options.get("oversample", 1))
    if kind is Provenance.WINDOWED_LFM:
        return generate_windowed_lfm(spec, window, options.get("oversample", 1))
    if kind is Provenance.DNLFM:
        return generate_dnlfm(spec, window, options.get("max_iters", 10), options.get("oversample", 1))
    if kind is Provenance.NLFM_ORACLE:
        return generate_nlfm_oracle(spec, window, options.get("granularity", 2**16))
    return generate_ofdm_nlfm(spec, window, options.get("segments", 16))


__all__ = [
    "Provenance",
    "WaveformSpec",
    "Waveform",
    "GroupDelayModel",
    "WindowKind",
    "build_group_delay_model",
    "solve_frequency_grid",
    "phase_samples",
    "generate_dnlfm",
    "generate_lfm",
    "generate_windowed_lfm",
    "generate_nlfm_oracle",
    "generate_ofdm_nlfm",
    "spectral_nmse",
    "to_frequency",
    "to_time",
    "waveform_by_name",
]
