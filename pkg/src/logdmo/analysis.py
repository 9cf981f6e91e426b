"""
Phase decomposition, asymptotic diagnostics and impulse-geometry metrics.

Any log-stretch DMO phase splits as

    Phi = k * (x_n - x_0) + Omega * (tau_0 - tau_n)

into a midpoint (space) part and a log-time part. The full-log operator is
all time, the Notfors operator all space, and the exact operator uses
Liner's stationary point for the space part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .fk import Section
from .kernel import (
    SINGULAR_EPS,
    FkPoint,
    OperatorKind,
    Validity,
    bale_curve,
    evaluate,
    exact_curve,
    liner_beta,
    notfors_curve,
)
from .oracle import EllipseCurve

HILBERT_TAPS = 64
NOISE_FLOOR_DB = -40.0


@dataclass(frozen=True)
class PhaseDecomposition:
    """Split of one phase value.

    ``space_shift`` is x_0 - x_n (m), ``time_shift`` is tau_0 - tau_n.
    ``space_phase = -k * space_shift`` and ``time_phase = omega * time_shift``.
    """

    space_shift: float
    time_shift: float
    space_phase: float
    time_phase: float
    validity: Validity = Validity.VALID

    @property
    def total(self) -> float:
        return self.space_phase + self.time_phase


def bale_log_shift(xi):
    """tau_0 - tau_n implied by the full-log operator, -0.5*ln(1 - xi^2)."""
    return bale_curve(xi)


def notfors_log_shift(xi):
    """tau_0 - tau_n of the Notfors approximation, sqrt(1 + xi^2) - 1."""
    return notfors_curve(xi)


def notfors_midpoint_shift(xi, h):
    """Equivalent midpoint repositioning x_0 - x_n = (h/xi)(1 - sqrt(1 + xi^2)).

    Evaluated as -h*xi/(1 + sqrt(1 + xi^2)), which is the same expression
    without the removable singularity at xi = 0.
    """
    xi = np.asarray(xi, dtype=float)
    return -h * xi / (1.0 + np.sqrt(1.0 + xi * xi))


def decompose(op: OperatorKind, p: FkPoint) -> PhaseDecomposition:
    op = OperatorKind(op)
    if p.omega == 0:
        raise ValueError("omega must be non-zero to decompose a phase")
    x = p.h * p.k / p.omega
    if op is OperatorKind.BALE_FULL:
        if abs(x) >= 1.0 - SINGULAR_EPS:
            nan = float("nan")
            return PhaseDecomposition(nan, nan, nan, nan, Validity.SINGULAR)
        dtau = float(bale_log_shift(x))
        return PhaseDecomposition(0.0, dtau, 0.0, p.omega * dtau)
    if op is OperatorKind.NOTFORS:
        dx = float(notfors_midpoint_shift(x, p.h))
        return PhaseDecomposition(dx, 0.0, -p.k * dx, 0.0)
    # exact: Liner's stationary point and log-time term
    beta = float(liner_beta(x))
    y_s = p.h * beta
    delta_s = 0.5 * math.log1p(-beta * beta)
    return PhaseDecomposition(y_s, delta_s, -p.k * y_s, p.omega * delta_s)


@dataclass
class AsymptoticReport:
    xi_grid: np.ndarray
    omega: float
    phases: dict = field(default_factory=dict)
    small_ratio: dict = field(default_factory=dict)
    large_ratio: dict = field(default_factory=dict)
    correction: np.ndarray | None = None

    def rows(self):
        """Column name -> values, ready for :func:`logdmo.gridio.write_csv`."""
        cols = {"xi": self.xi_grid}
        for op in self.phases:
            name = op.value
            cols[f"phase_{name}"] = self.phases[op]
            cols[f"small_ratio_{name}"] = self.small_ratio[op]
            cols[f"large_ratio_{name}"] = self.large_ratio[op]
        cols["log_correction"] = self.correction
        return cols


_CURVES = {
    OperatorKind.BALE_FULL: bale_curve,
    OperatorKind.NOTFORS: notfors_curve,
    OperatorKind.LINER_EXACT: exact_curve,
    OperatorKind.ZHOU_EXACT: exact_curve,
}


def asymptotic_report(ops: Iterable[OperatorKind], xi_grid, omega: float = 1.0) -> AsymptoticReport:
    """Tabulate each operator against the small- and large-dip limits.

    ``small_ratio`` is Phi / (omega*xi^2/2), ``large_ratio`` is
    Phi / (omega*xi) and ``correction`` is ln(xi)/(2 xi). The full-log
    operator reports NaN where it is singular.
    """
    xi_grid = np.asarray(xi_grid, dtype=float)
    if xi_grid.ndim != 1 or np.any(xi_grid <= 0):
        raise ValueError("xi grid must be a 1-D array of positive values")
    if np.any(np.diff(xi_grid) <= 0):
        raise ValueError("xi grid must be strictly increasing")
    report = AsymptoticReport(xi_grid, omega)
    for op in ops:
        op = OperatorKind(op)
        phase = omega * _CURVES[op](xi_grid)
        if op is OperatorKind.BALE_FULL:
            phase = np.where(xi_grid >= 1.0 - SINGULAR_EPS, np.nan, phase)
        report.phases[op] = phase
        report.small_ratio[op] = phase / (0.5 * omega * xi_grid**2)
        report.large_ratio[op] = phase / (omega * xi_grid)
    report.correction = np.log(xi_grid) / (2.0 * xi_grid)
    return report


def quadrature_pair(taps: int = HILBERT_TAPS):
    """In-phase and quadrature FIRs sharing a (taps-1)/2 sample delay.

    The in-phase branch is a delayed windowed sinc and the quadrature branch
    the matching windowed Hilbert kernel.
    """
    c = (taps - 1) / 2
    n = np.arange(taps) - c
    window = np.blackman(taps)
    with np.errstate(divide="ignore", invalid="ignore"):
        inphase = np.where(n == 0, 1.0, np.sin(np.pi * n) / (np.pi * n))
        quad = np.where(n == 0, 0.0, (1.0 - np.cos(np.pi * n)) / (np.pi * n))
    return inphase * window, quad * window


def envelope(samples: np.ndarray, taps: int = HILBERT_TAPS):
    """Quadrature-filter envelope of a trace.

    Returns
    -------
    env : ndarray
    offset : float
        Sample position of ``env[0]`` on the input's sample axis (a half
        sample for even ``taps``).
    """
    samples = np.asarray(samples, dtype=float)
    fi, fq = quadrature_pair(taps)
    i = np.convolve(samples, fi)
    q = np.convolve(samples, fq)
    lo = math.ceil((taps - 1) / 2)
    stop = lo + samples.size
    offset = lo - (taps - 1) / 2
    return np.hypot(i[lo:stop], q[lo:stop]), offset


def _refine_peak(env: np.ndarray, i: int) -> float:
    if 0 < i < env.size - 1:
        a, b, c = env[i - 1], env[i], env[i + 1]
        denom = a - 2 * b + c
        if denom < 0:
            return i + 0.5 * (a - c) / denom
    return float(i)


@dataclass
class RidgeReport:
    x: np.ndarray
    pick_time: np.ndarray
    oracle_time: np.ndarray
    residual_samples: np.ndarray
    missing: np.ndarray

    @property
    def max_abs_residual(self) -> float:
        r = self.residual_samples[~self.missing]
        return float(np.max(np.abs(r))) if r.size else float("nan")

    @property
    def mean_abs_residual(self) -> float:
        r = self.residual_samples[~self.missing]
        return float(np.mean(np.abs(r))) if r.size else float("nan")

    def max_abs_in(self, lo: float, hi: float, x_centre: float = 0.0) -> float:
        """Max |residual| over traces with lo <= |x - x_centre| <= hi."""
        d = np.abs(self.x - x_centre)
        sel = (d >= lo) & (d <= hi) & ~self.missing
        return float(np.max(np.abs(self.residual_samples[sel]))) if sel.any() else float("nan")

    def rows(self):
        return {
            "x": self.x,
            "pick_time": self.pick_time,
            "oracle_time": self.oracle_time,
            "residual_samples": self.residual_samples,
            "missing": self.missing.astype(int),
        }


def ridge_metrics(
    response: Section,
    oracle_curve: EllipseCurve,
    window: float = 0.8,
    floor_db: float = NOISE_FLOOR_DB,
) -> RidgeReport:
    """Pick the envelope peak on each trace and compare with the ellipse.

    Only traces with |x - x_n| <= window*h are picked. Traces whose peak is
    below ``floor_db`` of the global envelope peak are flagged missing.
    """
    if response.h != oracle_curve.h:
        raise ValueError("response and oracle curve have different half-offsets")
    xs = response.xs
    sel = np.flatnonzero(np.abs(xs - oracle_curve.x_n) <= window * oracle_curve.h)
    envs = []
    offset = 0.0
    for j in sel:
        env, offset = envelope(response.grid[:, j])
        envs.append(env)
    envs = np.array(envs).reshape(len(sel), -1)
    global_peak = envs.max() if envs.size else 0.0
    floor = global_peak * 10 ** (floor_db / 20)

    picks = np.full(len(sel), np.nan)
    missing = np.zeros(len(sel), dtype=bool)
    for row, env in enumerate(envs):
        i = int(np.argmax(env))
        if global_peak == 0 or env[i] < floor:
            missing[row] = True
            continue
        picks[row] = response.t_start + (offset + _refine_peak(env, i)) * response.dt
    oracle = oracle_curve.t0_at(xs[sel])
    residual = (picks - oracle) / response.dt
    return RidgeReport(xs[sel], picks, oracle, residual, missing)


def kernel_phase(op: OperatorKind, p: FkPoint) -> float:
    res = evaluate(op, p)
    return float("nan") if res.phase is None else res.phase
