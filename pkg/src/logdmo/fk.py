"""
2-D (Omega, k) transforms of sections and phase-shift filtering.

Forward kernel is exp(+i(Omega*tau - k*x)) with tau and x counted from the
grid origin; the inverse carries the 1/(N*M) factor. Grids are zero-padded
to fast transform sizes and cropped back on the way out.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
import scipy.fft

from .kernel import OperatorKind, evaluate_grid


class SingularPolicy(str, Enum):
    ZERO = "zero"
    HOLD_MAGNITUDE_ZERO_PHASE = "hold"


@dataclass(frozen=True)
class Section:
    """A common-offset section sampled as ``grid[time, midpoint]``.

    The same type carries log-stretched sections, in which case ``dt`` and
    ``t_start`` are the log-time step and origin.
    """

    grid: np.ndarray
    dt: float
    dx: float
    t_start: float
    x_start: float
    h: float

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        object.__setattr__(self, "grid", grid)
        if grid.ndim != 2 or grid.shape[0] < 2 or grid.shape[1] < 2:
            raise ValueError(f"section grid must be at least 2x2, got shape {grid.shape}")
        if not (self.dt > 0 and self.dx > 0):
            raise ValueError("dt and dx must be > 0")
        if not self.h >= 0:
            raise ValueError(f"half-offset must be >= 0, got {self.h}")

    @property
    def n_t(self) -> int:
        return self.grid.shape[0]

    @property
    def n_x(self) -> int:
        return self.grid.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n_t)

    @property
    def xs(self) -> np.ndarray:
        return self.x_start + self.dx * np.arange(self.n_x)

    def same_geometry(self, other: "Section") -> bool:
        return (
            self.grid.shape == other.grid.shape
            and (self.dt, self.dx, self.t_start, self.x_start, self.h)
            == (other.dt, other.dx, other.t_start, other.x_start, other.h)
        )

    def with_grid(self, grid) -> "Section":
        return replace(self, grid=grid)


@dataclass(frozen=True)
class Spectrum:
    """Complex samples on an (omega, k) grid.

    ``omegas`` and ``ks`` are the bin coordinates (FFT ordering for spectra
    from :func:`forward_fk`). ``source`` is the (unpadded) section geometry
    the spectrum came from, with an all-zero grid of the original shape.
    """

    grid: np.ndarray
    omegas: np.ndarray
    ks: np.ndarray
    h: float
    source: Section | None = None

    @property
    def d_omega(self) -> float:
        return float(abs(self.omegas[1] - self.omegas[0])) if self.omegas.size > 1 else 0.0

    @property
    def dk(self) -> float:
        return float(abs(self.ks[1] - self.ks[0])) if self.ks.size > 1 else 0.0

    @property
    def padded_shape(self) -> tuple[int, int]:
        return self.grid.shape

    def with_grid(self, grid) -> "Spectrum":
        return replace(self, grid=grid)


def padded_sizes(n_t: int, n_x: int, pad_t: int = 0, pad_x: int = 0) -> tuple[int, int]:
    return (
        scipy.fft.next_fast_len(n_t + pad_t, real=True),
        scipy.fft.next_fast_len(n_x + pad_x, real=True),
    )


def forward_fk(sec: Section, pad_t: int = 0, pad_x: int = 0, workers: int | None = None) -> Spectrum:
    """2-D transform of a (log-stretched) section.

    Both axes are zero-padded by at least ``pad_t``/``pad_x`` samples up to
    the next fast length.
    """
    if sec.grid.size == 0:
        raise ValueError("empty grid")
    n_w, n_k = padded_sizes(sec.n_t, sec.n_x, pad_t, pad_x)
    padded = np.zeros((n_w, n_k))
    padded[: sec.n_t, : sec.n_x] = sec.grid
    # exp(-ikx) along x is the usual forward FFT; exp(+i Omega tau) along tau
    # is an unnormalised inverse FFT
    spec = scipy.fft.fft(padded, axis=1, workers=workers)
    spec = scipy.fft.ifft(spec, axis=0, norm="forward", workers=workers)
    omegas = 2 * np.pi * scipy.fft.fftfreq(n_w, sec.dt)
    ks = 2 * np.pi * scipy.fft.fftfreq(n_k, sec.dx)
    return Spectrum(spec, omegas, ks, sec.h, sec.with_grid(np.zeros((sec.n_t, sec.n_x))))


def imag_residual(values: np.ndarray) -> float:
    norm = np.linalg.norm(values)
    if norm == 0:
        return 0.0
    return float(np.linalg.norm(values.imag) / norm)


def inverse_fk(sp: Spectrum, workers: int | None = None, tol: float | None = 1e-10) -> Section:
    """Inverse of :func:`forward_fk`, cropped to the source geometry.

    Raises ``ValueError`` if the imaginary part of the result exceeds ``tol``
    of its L2 norm (i.e. the spectrum was not Hermitian); ``tol=None``
    skips the check. The imaginary part is discarded.
    """
    if sp.grid.size == 0:
        raise ValueError("empty spectrum")
    if sp.source is None:
        raise ValueError("spectrum has no source geometry to invert onto")
    out = scipy.fft.fft(sp.grid, axis=0, norm="forward", workers=workers)
    out = scipy.fft.ifft(out, axis=1, workers=workers)
    src = sp.source
    out = out[: src.n_t, : src.n_x]
    if tol is not None:
        resid = imag_residual(out)
        if resid > tol:
            raise ValueError(f"inverse transform is not real (imaginary residual {resid:.3e})")
    return src.with_grid(out.real.copy())


def filter_response(
    omegas: np.ndarray,
    ks: np.ndarray,
    h: float,
    op: OperatorKind,
    policy: SingularPolicy = SingularPolicy.ZERO,
) -> np.ndarray:
    """Complex filter on an FFT-ordered (omega, k) grid.

    Only the non-negative-frequency rows are evaluated; the negative rows are
    the conjugate mirror, so the response is Hermitian by construction. An
    even-length Nyquist row is its own mirror and is passed unchanged.
    """
    n_w, n_k = omegas.size, ks.size
    H = np.ones((n_w, n_k), dtype=complex)
    n_pos = (n_w - 1) // 2 + 1
    phase, amp, singular = evaluate_grid(op, omegas[:n_pos, None], ks[None, :], h)
    H[:n_pos] = amp * np.exp(1j * phase)
    if SingularPolicy(policy) is SingularPolicy.ZERO:
        H[:n_pos][singular] = 0.0
    else:
        H[:n_pos][singular] = amp[singular]
    rows = np.arange(n_w // 2 + 1, n_w)
    kmirror = (-np.arange(n_k)) % n_k
    H[rows] = np.conj(H[n_w - rows][:, kmirror])
    return H


def singular_mask(omegas: np.ndarray, ks: np.ndarray, h: float, op: OperatorKind) -> np.ndarray:
    _, _, singular = evaluate_grid(op, omegas[:, None], ks[None, :], h)
    return singular


def apply_phase_filter(
    sp: Spectrum,
    op: OperatorKind,
    policy: SingularPolicy = SingularPolicy.ZERO,
) -> Spectrum:
    """Multiply every bin by amplitude * exp(+i*phase) of ``op``."""
    H = filter_response(sp.omegas, sp.ks, sp.h, op, policy)
    return sp.with_grid(sp.grid * H)
