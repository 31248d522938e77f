"""Frequency- and amplitude-modulated PRBS excitation signals.

A FAPRBS is a concatenation of APRBS segments with different hold
durations: within one segment the signal holds a randomly drawn level for
a fixed duration, n_holds times.  Levels are drawn per channel uniformly
within +-amplitude of the mean control vector and clipped to the control
bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class FaprbsSegment:
    """One constant-frequency block: n_holds plateaus of hold_duration each."""

    hold_duration: float
    n_holds: int

    def __post_init__(self):
        if self.hold_duration <= 0:
            raise ConfigError(f"hold_duration must be > 0, got {self.hold_duration}")
        if self.n_holds < 1:
            raise ConfigError(f"n_holds must be >= 1, got {self.n_holds}")


@dataclass(frozen=True)
class ControlBounds:
    """Per-channel control limits and FAPRBS amplitudes (engineering units)."""

    lower: np.ndarray
    upper: np.ndarray
    faprbs_amplitude: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower", np.asarray(self.lower, dtype=float))
        object.__setattr__(self, "upper", np.asarray(self.upper, dtype=float))
        object.__setattr__(
            self, "faprbs_amplitude", np.asarray(self.faprbs_amplitude, dtype=float)
        )
        lo, up, amp = self.lower, self.upper, self.faprbs_amplitude
        if not (lo.shape == up.shape == amp.shape) or lo.ndim != 1:
            raise ConfigError("lower/upper/amplitude must be 1-D arrays of equal length")
        for i in range(lo.size):
            if not lo[i] < up[i]:
                raise ConfigError(f"channel {i}: lower bound must be < upper bound")
            if not amp[i] > 0:
                raise ConfigError(f"channel {i}: FAPRBS amplitude must be > 0")
            if amp[i] > (up[i] - lo[i]) / 2 + 1e-15:
                raise ConfigError(
                    f"channel {i}: amplitude {amp[i]} exceeds half the control "
                    f"range {(up[i] - lo[i]) / 2}"
                )

    @property
    def n_channels(self) -> int:
        return self.lower.size


@dataclass(frozen=True)
class ControlSignal:
    """Piecewise-constant multichannel input trajectory.

    breakpoints[k] is the start time of plateau k (breakpoints[0] == 0);
    levels[k] is the control vector held on [breakpoints[k], breakpoints[k+1]).
    """

    breakpoints: np.ndarray  # (n_plateaus,)
    levels: np.ndarray  # (n_plateaus, n_channels)
    mean_u: np.ndarray
    total_duration: float

    @property
    def n_plateaus(self) -> int:
        return self.levels.shape[0]


def generate_faprbs(
    mean_u: np.ndarray,
    segments: list[FaprbsSegment],
    bounds: ControlBounds,
    rng_seed: int,
) -> ControlSignal:
    """Draw a FAPRBS around mean_u.

    Every plateau level is drawn independently per channel, uniform on
    [mean - A, mean + A], then clipped to [lower, upper].  Deterministic
    for a fixed seed.
    """
    mean_u = np.asarray(mean_u, dtype=float)
    if not segments:
        raise ConfigError("need at least one FAPRBS segment")
    if mean_u.shape != bounds.lower.shape:
        raise ConfigError("mean_u dimension does not match bounds")
    if np.any(mean_u < bounds.lower - 1e-12) or np.any(mean_u > bounds.upper + 1e-12):
        raise ConfigError("mean_u outside control bounds")

    rng = np.random.default_rng(rng_seed)
    amp = bounds.faprbs_amplitude
    times = []
    levels = []
    t = 0.0
    for seg in segments:
        for _ in range(seg.n_holds):
            level = rng.uniform(mean_u - amp, mean_u + amp)
            level = np.clip(level, bounds.lower, bounds.upper)
            times.append(t)
            levels.append(level)
            t += seg.hold_duration
    total = sum(seg.n_holds * seg.hold_duration for seg in segments)
    return ControlSignal(
        breakpoints=np.array(times),
        levels=np.array(levels),
        mean_u=mean_u,
        total_duration=float(total),
    )


def sample_at(signal: ControlSignal, t: float) -> np.ndarray:
    """Control vector of the plateau containing t.

    Intervals are right-open: t exactly at a breakpoint returns the new
    level; t == total_duration returns the last level.
    """
    if t < 0 or t > signal.total_duration * (1 + 1e-12) + 1e-12:
        raise ValueError(f"t={t} outside [0, {signal.total_duration}]")
    idx = int(np.searchsorted(signal.breakpoints, t, side="right")) - 1
    idx = max(0, min(idx, signal.n_plateaus - 1))
    return signal.levels[idx]
