"""
Five-step log-stretch DMO driver and impulse-response generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fk import Section, SingularPolicy, apply_phase_filter, forward_fk, inverse_fk
from .kernel import OperatorKind
from .stretch import Trace, default_n_tau, interpolate, stretch_samples, unstretch_samples


@dataclass(frozen=True)
class DmoConfig:
    """Pipeline settings.

    ``None`` selects the default: ``t_c`` the section's first time,
    ``n_tau`` the smallest power of two >= 2*n_t, ``pad_tau`` equal to
    ``n_tau`` and ``pad_x`` of ceil(h/dx) traces.
    """

    operator: OperatorKind = OperatorKind.ZHOU_EXACT
    t_c: float | None = None
    n_tau: int | None = None
    singular_policy: SingularPolicy = SingularPolicy.ZERO
    pad_x: int | None = None
    pad_tau: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "operator", OperatorKind(self.operator))
        object.__setattr__(self, "singular_policy", SingularPolicy(self.singular_policy))
        if self.t_c is not None and not self.t_c > 0:
            raise ValueError(f"t_c must be > 0, got {self.t_c}")
        if self.n_tau is not None and self.n_tau < 2:
            raise ValueError(f"n_tau must be >= 2, got {self.n_tau}")
        for name in ("pad_x", "pad_tau"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be >= 0, got {value}")

    def resolve(self, sec: Section) -> "DmoConfig":
        """Copy with every default filled in for ``sec``."""
        n_tau = self.n_tau or default_n_tau(sec.n_t)
        return DmoConfig(
            operator=self.operator,
            t_c=sec.t_start if self.t_c is None else self.t_c,
            n_tau=n_tau,
            singular_policy=self.singular_policy,
            pad_x=math.ceil(sec.h / sec.dx) if self.pad_x is None else self.pad_x,
            pad_tau=n_tau if self.pad_tau is None else self.pad_tau,
        )


def run_dmo(sec: Section, cfg: DmoConfig = DmoConfig(), workers: int | None = None) -> Section:
    """Apply log-stretch DMO to an NMO-corrected common-offset section.

    Runs stretch, forward transform, phase filter, inverse transform and
    inverse stretch. Only the change made by the filter travels back through
    the inverse stretch; the input is added back on the native grid, so
    whatever the filter leaves alone (zero offset, flat events) comes out
    without resampling error.

    Parameters
    ----------
    sec : Section
        Input in (t_n, x_n); ``sec.t_start`` must not precede ``cfg.t_c``.
    cfg : DmoConfig
    workers : int, optional
        Thread cap for stretching and FFTs. Output is independent of it.

    Returns
    -------
    Section
        Output in (t_0, x_0) on the input geometry.
    """
    if sec.h < 0:
        raise ValueError(f"half-offset must be >= 0, got {sec.h}")
    cfg = cfg.resolve(sec)
    if sec.t_start < cfg.t_c:
        raise ValueError(f"section starts at {sec.t_start} s, before t_c={cfg.t_c} s")
    stretch_workers = workers or 1

    tau_grid, tau_start, dtau = stretch_samples(
        sec.grid, sec.dt, sec.t_start, cfg.t_c, cfg.n_tau, stretch_workers
    )
    stretched = Section(tau_grid, dtau, sec.dx, tau_start, sec.x_start, sec.h)
    spec_n = forward_fk(stretched, pad_t=cfg.pad_tau, pad_x=cfg.pad_x, workers=workers)
    spec_0 = apply_phase_filter(spec_n, cfg.operator, cfg.singular_policy)
    out_tau = inverse_fk(spec_0, workers=workers)

    change = out_tau.grid - tau_grid
    delta = unstretch_samples(
        change, dtau, tau_start, cfg.t_c, sec.t_start, sec.dt, sec.n_t, stretch_workers
    )
    return sec.with_grid(sec.grid + delta)


def paint_impulse(geometry: Section, t_impulse: float, x_impulse: float, wavelet: Trace) -> Section:
    """Empty copy of ``geometry`` with ``wavelet`` centred at (t_impulse, x_impulse).

    The wavelet's middle sample is its zero time; it is placed at sub-sample
    precision in time and on the nearest trace in x.
    """
    times, xs = geometry.times, geometry.xs
    if not times[0] <= t_impulse <= times[-1]:
        raise ValueError(f"impulse time {t_impulse} outside [{times[0]}, {times[-1]}]")
    half_dx = 0.5 * geometry.dx
    if not xs[0] - half_dx <= x_impulse <= xs[-1] + half_dx:
        raise ValueError(f"impulse midpoint {x_impulse} outside [{xs[0]}, {xs[-1]}]")
    col = int(np.clip(np.rint((x_impulse - geometry.x_start) / geometry.dx), 0, geometry.n_x - 1))

    centre = (wavelet.n - 1) / 2
    pos = (times - t_impulse) / wavelet.dt + centre
    live = (pos >= 0) & (pos <= wavelet.n - 1)
    trace = np.zeros(geometry.n_t)
    if live.any():
        trace[live] = interpolate(wavelet.samples, pos[live])
    grid = np.zeros((geometry.n_t, geometry.n_x))
    grid[:, col] = trace
    return geometry.with_grid(grid)


def impulse_response(
    cfg: DmoConfig,
    t_impulse: float,
    x_impulse: float,
    wavelet: Trace,
    geometry: Section,
    workers: int | None = None,
) -> Section:
    """DMO response of a single wavelet placed in an otherwise empty section."""
    painted = paint_impulse(geometry, t_impulse, x_impulse, wavelet)
    return run_dmo(painted, cfg, workers=workers)
