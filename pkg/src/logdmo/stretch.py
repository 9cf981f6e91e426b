"""
Logarithmic time stretch, tau = ln(t / t_c), and its inverse.

Resampling uses an 8-point Kaiser-windowed sinc whose weights are normalised
over the taps that fall inside the trace, so constants are preserved exactly
and nothing leaks past the trace ends.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

TAPS = 8
KAISER_BETA = 7.5


@dataclass(frozen=True)
class Trace:
    samples: np.ndarray
    dt: float
    t_start: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size < 2:
            raise ValueError("a trace needs at least 2 samples")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.t_start > 0:
            raise ValueError(f"t_start must be > 0, got {self.t_start}")

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def t_end(self) -> float:
        return self.t_start + (self.n - 1) * self.dt

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n)


@dataclass(frozen=True)
class StretchedTrace:
    samples: np.ndarray
    dtau: float
    tau_start: float
    t_c: float

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        if self.samples.ndim != 1 or self.samples.size < 2:
            raise ValueError("a stretched trace needs at least 2 samples")
        if not self.dtau > 0:
            raise ValueError(f"dtau must be > 0, got {self.dtau}")
        if not self.t_c > 0:
            raise ValueError(f"t_c must be > 0, got {self.t_c}")

    @property
    def n_tau(self) -> int:
        return self.samples.size

    @property
    def tau_end(self) -> float:
        return self.tau_start + (self.n_tau - 1) * self.dtau

    @property
    def taus(self) -> np.ndarray:
        return self.tau_start + self.dtau * np.arange(self.n_tau)

    @property
    def times(self) -> np.ndarray:
        return self.t_c * np.exp(self.taus)


def default_n_tau(n: int) -> int:
    """Smallest power of two >= 2*n."""
    return 1 << max(1, (2 * n - 1).bit_length())


def _kaiser_sinc(d: np.ndarray) -> np.ndarray:
    half = TAPS / 2
    arg = np.clip(1.0 - (d / half) ** 2, 0.0, None)
    return np.sinc(d) * np.i0(KAISER_BETA * np.sqrt(arg)) / np.i0(KAISER_BETA)


def interpolation_weights(positions: np.ndarray, n: int):
    """Tap indices and normalised weights for fractional ``positions``.

    Returns ``(idx, w)`` of shape ``(len(positions), TAPS)``; ``idx`` is
    clipped into range and out-of-range taps carry zero weight.
    """
    positions = np.asarray(positions, dtype=float)
    base = np.floor(positions).astype(np.int64)
    offsets = np.arange(-TAPS // 2 + 1, TAPS // 2 + 1)
    idx = base[:, None] + offsets[None, :]
    w = _kaiser_sinc(positions[:, None] - idx)
    inside = (idx >= 0) & (idx < n)
    w = np.where(inside, w, 0.0)
    total = w.sum(axis=1, keepdims=True)
    w = np.divide(w, total, out=np.zeros_like(w), where=total != 0)
    return np.clip(idx, 0, n - 1), w


def interpolate(samples: np.ndarray, positions: np.ndarray, workers: int | None = 1) -> np.ndarray:
    """Resample ``samples`` (along axis 0) at fractional sample ``positions``.

    A 2-D input is treated as a set of traces in its columns; columns are
    split across ``workers`` threads. The result does not depend on the
    number of workers.
    """
    samples = np.asarray(samples, dtype=float)
    idx, w = interpolation_weights(positions, samples.shape[0])

    def run(block):
        # fixed tap order keeps results bit-identical under any column split
        ww = w if block.ndim == 1 else w[:, :, None]
        out = ww[:, 0] * block[idx[:, 0]]
        for j in range(1, TAPS):
            out += ww[:, j] * block[idx[:, j]]
        return out

    if samples.ndim == 1 or not workers or workers <= 1 or samples.shape[1] < 2:
        return run(samples)
    chunks = np.array_split(np.arange(samples.shape[1]), min(workers, samples.shape[1]))
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(lambda c: run(samples[:, c]), chunks))
    return np.concatenate(parts, axis=1)


def tau_axis(t_start: float, t_end: float, t_c: float, n_tau: int):
    """``(tau_start, dtau)`` of the uniform log-time grid covering [t_start, t_end]."""
    if not t_c > 0:
        raise ValueError(f"t_c must be > 0, got {t_c}")
    if t_start < t_c:
        raise ValueError(f"t_start={t_start} is earlier than the cutoff time t_c={t_c}")
    if n_tau < 2:
        raise ValueError(f"n_tau must be >= 2, got {n_tau}")
    tau_start = math.log(t_start / t_c)
    tau_end = math.log(t_end / t_c)
    return tau_start, (tau_end - tau_start) / (n_tau - 1)


def stretch_samples(samples, dt, t_start, t_c, n_tau, workers=1):
    """Forward stretch of one trace or of the columns of a 2-D array."""
    samples = np.asarray(samples, dtype=float)
    t_end = t_start + (samples.shape[0] - 1) * dt
    tau_start, dtau = tau_axis(t_start, t_end, t_c, n_tau)
    taus = tau_start + dtau * np.arange(n_tau)
    pos = (t_c * np.exp(taus) - t_start) / dt
    pos = np.clip(pos, 0.0, samples.shape[0] - 1)
    return interpolate(samples, pos, workers), tau_start, dtau


def unstretch_samples(samples, dtau, tau_start, t_c, t_start, dt, n, workers=1):
    """Inverse stretch of one trace or of the columns of a 2-D array."""
    samples = np.asarray(samples, dtype=float)
    if n < 1:
        raise ValueError("output grid is empty")
    if not dt > 0 or not t_start > 0:
        raise ValueError("output grid needs dt > 0 and t_start > 0")
    times = t_start + dt * np.arange(n)
    pos = (np.log(times / t_c) - tau_start) / dtau
    last = samples.shape[0] - 1
    # one sample of slack on either side; beyond that the grid is not covered
    slack = 1.0 + 1e-9
    if pos[0] < -slack or pos[-1] > last + slack:
        raise ValueError(
            f"output times [{times[0]}, {times[-1]}] fall outside the stretched trace "
            f"[{t_c * math.exp(tau_start)}, {t_c * math.exp(tau_start + last * dtau)}]"
        )
    return interpolate(samples, np.clip(pos, 0.0, last), workers)


def log_stretch(tr: Trace, t_c: float | None = None, n_tau: int | None = None) -> StretchedTrace:
    """Resample a trace onto a uniform log-time grid.

    Parameters
    ----------
    tr : Trace
    t_c : float, optional
        Cutoff time; defaults to ``tr.t_start``.
    n_tau : int, optional
        Output sample count; defaults to :func:`default_n_tau`.
    """
    t_c = tr.t_start if t_c is None else t_c
    n_tau = default_n_tau(tr.n) if n_tau is None else n_tau
    out, tau_start, dtau = stretch_samples(tr.samples, tr.dt, tr.t_start, t_c, n_tau)
    return StretchedTrace(out, dtau, tau_start, t_c)


def inverse_log_stretch(st: StretchedTrace, out_grid: tuple[float, float, int]) -> Trace:
    """Resample a stretched trace back onto ``out_grid = (t_start, dt, n)``."""
    t_start, dt, n = out_grid
    out = unstretch_samples(st.samples, st.dtau, st.tau_start, st.t_c, t_start, dt, int(n))
    return Trace(out, dt, t_start)
