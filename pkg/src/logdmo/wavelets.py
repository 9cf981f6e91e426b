import math

import numpy as np

from .stretch import Trace


def ricker_samples(t, freq):
    a = (np.pi * freq * np.asarray(t, dtype=float)) ** 2
    return (1.0 - 2.0 * a) * np.exp(-a)


def ricker(freq: float, dt: float, half_width: float | None = None) -> Trace:
    """Zero-phase Ricker wavelet with its peak on the middle sample.

    The returned trace is odd-length; ``half_width`` (seconds) defaults to
    1.5 / freq, where the wavelet has decayed below 1e-9.
    """
    if not freq > 0 or not dt > 0:
        raise ValueError("freq and dt must be > 0")
    half_width = 1.5 / freq if half_width is None else half_width
    m = max(1, math.ceil(half_width / dt))
    t = dt * np.arange(-m, m + 1)
    # t_start is nominal: a wavelet has no absolute time, only its centre
    return Trace(ricker_samples(t, freq), dt, dt)
