"""
Independent references in the unstretched (t, x) / (omega, k) domain.

Black's kinematics map an input sample and ray parameter p = k/omega to its
zero-offset position and trace the DMO ellipse. Hale's relations keep the
midpoint and delay the time. ``direct_dmo`` evaluates the Hale and Black
f-k integrals by brute-force quadrature at desk scale.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fk import Section, Spectrum

MAX_DIRECT_SIZE = 128


class DirectMethod(str, Enum):
    HALE = "hale"
    BLACK = "black"


@dataclass(frozen=True)
class KinematicMap:
    t_n: float
    x_n: float
    h: float
    p: float

    def __post_init__(self):
        if not self.t_n > 0:
            raise ValueError(f"t_n must be > 0, got {self.t_n}")


def amplitude_factor(t_n, h, p):
    """A = sqrt(1 + (h p / t_n)^2); always >= 1."""
    r = h * np.asarray(p, dtype=float) / np.asarray(t_n, dtype=float)
    return np.sqrt(1.0 + r * r)


def black_map(m: KinematicMap) -> tuple[float, float, float]:
    """(t_0, x_0, A) from Black's time and midpoint relations."""
    A = float(amplitude_factor(m.t_n, m.h, m.p))
    t0 = m.t_n / A
    x0 = m.x_n - (m.h * m.h / m.t_n) * m.p / A
    return t0, x0, A


def hale_map(m: KinematicMap) -> tuple[float, float, float]:
    """(t_0, x_0, A) from Hale's relations t_0 = A t_n, x_0 = x_n."""
    A = float(amplitude_factor(m.t_n, m.h, m.p))
    return A * m.t_n, m.x_n, A


@dataclass(frozen=True)
class EllipseCurve:
    t_n: float
    x_n: float
    h: float
    x0: np.ndarray
    t0: np.ndarray

    def t0_at(self, x) -> np.ndarray:
        """Closed-form ellipse time at midpoints ``x`` (NaN outside |x-x_n|<=h)."""
        u = (np.asarray(x, dtype=float) - self.x_n) / self.h
        with np.errstate(invalid="ignore"):
            return np.where(np.abs(u) <= 1, self.t_n * np.sqrt(1.0 - np.minimum(u * u, 1.0)), np.nan)

    def residual(self) -> np.ndarray:
        """((x_0-x_n)/h)^2 + (t_0/t_n)^2 - 1 at every stored point."""
        return ((self.x0 - self.x_n) / self.h) ** 2 + (self.t0 / self.t_n) ** 2 - 1.0


def ellipse(t_n: float, x_n: float, h: float, n_points: int = 201) -> EllipseCurve:
    """DMO impulse ellipse sampled uniformly in x_0 over [x_n - h, x_n + h]."""
    if not t_n > 0 or not h > 0:
        raise ValueError("t_n and h must be > 0")
    if n_points < 2:
        raise ValueError("need at least 2 points")
    x0 = x_n + h * np.linspace(-1.0, 1.0, n_points)
    u = np.linspace(-1.0, 1.0, n_points)
    t0 = t_n * np.sqrt(np.clip(1.0 - u * u, 0.0, None))
    return EllipseCurve(t_n, x_n, h, x0, t0)


def ellipse_sweep(t_n: float, x_n: float, h: float, n_points: int = 201) -> EllipseCurve:
    """The same ellipse traced by :func:`black_map` over all ray parameters.

    p = tan(theta) * t_n / h on an open uniform theta grid in (-pi/2, pi/2).
    """
    theta = np.pi * ((np.arange(n_points) + 0.5) / n_points - 0.5)
    p = np.tan(theta) * t_n / h
    A = amplitude_factor(t_n, h, p)
    t0 = t_n / A
    x0 = x_n - (h * h / t_n) * p / A
    return EllipseCurve(t_n, x_n, h, x0, t0)


def direct_weight(method: DirectMethod, A):
    A = np.asarray(A, dtype=float)
    if DirectMethod(method) is DirectMethod.HALE:
        return 1.0 / A
    return (2.0 * A * A - 1.0) / A**3


def _trapezoid_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def direct_dmo(
    sec: Section,
    method: DirectMethod,
    omega_grid,
    k_grid,
    workers: int | None = None,
) -> Spectrum:
    """Brute-force Hale or Black DMO integral onto an (omega, k) grid.

    Sums w(A) * exp(i(omega t_n A - k x_n)) * P_n(t_n, x_n) dt dx over the
    section samples with trapezoid weights, where
    A = sqrt(1 + (h k / (t_n omega))^2) and w = 1/A (Hale) or
    (2A^2 - 1)/A^3 (Black). At omega = 0, A and w are 1.

    Parameters
    ----------
    sec : Section
        NMO-corrected input; times must be positive.
    method : DirectMethod
    omega_grid, k_grid : array_like
        Output bins (rad/s, rad/m).
    workers : int, optional
        Threads over omega rows. The result is independent of it.
    """
    method = DirectMethod(method)
    omegas = np.atleast_1d(np.asarray(omega_grid, dtype=float))
    ks = np.atleast_1d(np.asarray(k_grid, dtype=float))
    sizes = (sec.n_t, sec.n_x, omegas.size, ks.size)
    if max(sizes) > MAX_DIRECT_SIZE:
        raise ValueError(
            f"direct DMO is desk-scale only: grid sizes {sizes} exceed {MAX_DIRECT_SIZE}"
        )
    if sec.t_start <= 0:
        raise ValueError("direct DMO needs strictly positive input times")

    quad = np.outer(_trapezoid_weights(sec.n_t), _trapezoid_weights(sec.n_x)) * sec.dt * sec.dx
    it, ix = np.nonzero(sec.grid)
    t = sec.times[it]
    x = sec.xs[ix]
    amp = sec.grid[it, ix] * quad[it, ix]
    h = sec.h

    def row(w):
        if w == 0:
            A = np.ones((ks.size, t.size))
        else:
            A = amplitude_factor(t[None, :], h, ks[:, None] / w)
        weight = direct_weight(method, A)
        phase = w * t[None, :] * A - ks[:, None] * x[None, :]
        return (weight * amp[None, :] * np.exp(1j * phase)).sum(axis=1)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, omegas))
    else:
        rows = [row(w) for w in omegas]
    grid = np.array(rows).reshape(omegas.size, ks.size)
    return Spectrum(grid, omegas, ks, h, sec.with_grid(np.zeros_like(sec.grid)))
