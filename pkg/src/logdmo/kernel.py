"""
Log-stretch DMO phase functions.

Every operator acts in the (Omega, k) domain of a log-stretched common-offset
section, where Omega is dual to log-time tau and k to midpoint x. All phases
depend on (Omega, k, h) through Omega and the dip variable xi = h*k/Omega only,
and are written for the forward transform kernel exp(+i(Omega*tau - k*x)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

# |xi| >= 1 - SINGULAR_EPS is singular for the full-log operator
SINGULAR_EPS = 1e-9


class OperatorKind(str, Enum):
    BALE_FULL = "bale"
    NOTFORS = "notfors"
    LINER_EXACT = "liner"
    ZHOU_EXACT = "zhou"

    @classmethod
    def parse(cls, name: str) -> "OperatorKind":
        key = name.strip().lower().replace("_", "-")
        aliases = {
            "bale": cls.BALE_FULL,
            "bale-full": cls.BALE_FULL,
            "full": cls.BALE_FULL,
            "notfors": cls.NOTFORS,
            "liner": cls.LINER_EXACT,
            "liner-exact": cls.LINER_EXACT,
            "zhou": cls.ZHOU_EXACT,
            "zhou-exact": cls.ZHOU_EXACT,
            "exact": cls.ZHOU_EXACT,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown operator {name!r}") from None


class Validity(str, Enum):
    VALID = "valid"
    SINGULAR = "singular"
    OUT_OF_DOMAIN = "out_of_domain"


@dataclass(frozen=True)
class FkPoint:
    omega: float
    k: float
    h: float

    def __post_init__(self):
        if not self.h >= 0:
            raise ValueError(f"half-offset must be >= 0, got {self.h}")

    @property
    def xi(self) -> float | None:
        return xi(self)


@dataclass(frozen=True)
class PhaseResult:
    phase: float | None
    amplitude: float
    validity: Validity

    @property
    def factor(self) -> complex:
        """Complex multiplier amplitude * exp(i*phase); 0 when singular."""
        if self.validity is not Validity.VALID:
            return 0j
        return self.amplitude * complex(math.cos(self.phase), math.sin(self.phase))


class LinerComponents(NamedTuple):
    y_s: float
    beta_s: float
    delta_s: float
    amplitude: float


def xi(p: FkPoint) -> float | None:
    """Dip variable h*k/omega, or None where omega == 0."""
    if p.omega == 0:
        return None
    return p.h * p.k / p.omega


# Per-unit-Omega phase curves f(xi), Phi = Omega * f(xi). Written in forms that
# avoid cancellation for small xi; all are even in xi.

def bale_curve(xi):
    xi = np.asarray(xi, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return -0.5 * np.log1p(-xi * xi)


def notfors_curve(xi):
    xi = np.asarray(xi, dtype=float)
    x2 = xi * xi
    return x2 / (np.sqrt(1.0 + x2) + 1.0)


def exact_curve(xi):
    xi = np.asarray(xi, dtype=float)
    s = np.sqrt(1.0 + 4.0 * xi * xi)
    # s - 1 computed without cancellation
    u = 4.0 * xi * xi / (s + 1.0)
    return 0.5 * (u - np.log1p(0.5 * u))


def _check_xi(xi) -> bool:
    return xi is not None and math.isfinite(xi)


def phase_bale(omega: float, xi: float) -> PhaseResult:
    if not _check_xi(xi):
        return PhaseResult(None, 1.0, Validity.OUT_OF_DOMAIN)
    if abs(xi) >= 1.0 - SINGULAR_EPS:
        return PhaseResult(None, 1.0, Validity.SINGULAR)
    return PhaseResult(omega * float(bale_curve(xi)), 1.0, Validity.VALID)


def phase_notfors(omega: float, xi: float) -> PhaseResult:
    if not _check_xi(xi):
        return PhaseResult(None, 1.0, Validity.OUT_OF_DOMAIN)
    return PhaseResult(omega * float(notfors_curve(xi)), 1.0, Validity.VALID)


def phase_exact(omega: float, xi: float) -> PhaseResult:
    if not _check_xi(xi):
        return PhaseResult(None, 1.0, Validity.OUT_OF_DOMAIN)
    return PhaseResult(omega * float(exact_curve(xi)), 1.0, Validity.VALID)


def liner_beta(xi):
    """Normalised stationary point beta_s = y_s / h as a function of xi.

    Uses (1 - sqrt(1 + 4 xi^2)) / (2 xi) = -2 xi / (1 + sqrt(1 + 4 xi^2)),
    which is regular at xi = 0.
    """
    xi = np.asarray(xi, dtype=float)
    return -2.0 * xi / (1.0 + np.sqrt(1.0 + 4.0 * xi * xi))


def liner_amplitude(xi):
    beta = liner_beta(xi)
    return 1.0 / np.sqrt(1.0 + beta * beta)


def liner_components(omega: float, k: float, h: float) -> LinerComponents:
    """Stationary-point quantities of the Liner operator.

    Parameters
    ----------
    omega : float
        Log-time angular frequency, must be non-zero.
    k : float
        Midpoint wavenumber (rad/m).
    h : float
        Half-offset (m), must be positive.

    Returns
    -------
    LinerComponents
        ``(y_s, beta_s, delta_s, amplitude)``. The time term is
        ``delta_s = 0.5 * ln(1 - beta_s**2)`` so that
        ``omega * delta_s - k * y_s`` is the exact phase.
    """
    if omega == 0:
        raise ValueError("omega must be non-zero (xi is undefined at DC)")
    if not h > 0:
        raise ValueError(f"half-offset must be > 0, got {h}")
    x = h * k / omega
    beta = float(liner_beta(x))
    delta = 0.5 * math.log1p(-beta * beta)
    return LinerComponents(h * beta, beta, delta, 1.0 / math.sqrt(1.0 + beta * beta))


_CURVES = {
    OperatorKind.BALE_FULL: bale_curve,
    OperatorKind.NOTFORS: notfors_curve,
    OperatorKind.LINER_EXACT: exact_curve,
    OperatorKind.ZHOU_EXACT: exact_curve,
}


def evaluate(op: OperatorKind, p: FkPoint) -> PhaseResult:
    """Phase, amplitude and validity of ``op`` at one (Omega, k, h) bin.

    DC (omega == 0) is the identity for every operator.
    """
    op = OperatorKind(op)
    x = xi(p)
    if x is None:
        return PhaseResult(0.0, 1.0, Validity.VALID)
    if op is OperatorKind.BALE_FULL:
        return phase_bale(p.omega, x)
    if op is OperatorKind.NOTFORS:
        return phase_notfors(p.omega, x)
    res = phase_exact(p.omega, x)
    if op is OperatorKind.LINER_EXACT and res.validity is Validity.VALID:
        return PhaseResult(res.phase, float(liner_amplitude(x)), res.validity)
    return res


def evaluate_grid(op: OperatorKind, omega, k, h: float):
    """Vectorised :func:`evaluate` over broadcastable ``omega`` and ``k``.

    Returns
    -------
    phase, amplitude : ndarray
        Phase is 0 on singular bins.
    singular : ndarray of bool
    """
    op = OperatorKind(op)
    omega, k = np.broadcast_arrays(np.asarray(omega, float), np.asarray(k, float))
    dc = omega == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(dc, 0.0, h * k / np.where(dc, 1.0, omega))
    if op is OperatorKind.BALE_FULL:
        singular = (np.abs(x) >= 1.0 - SINGULAR_EPS) & ~dc
        x = np.where(singular, 0.0, x)
    else:
        singular = np.zeros(x.shape, dtype=bool)
    phase = omega * _CURVES[op](x)
    if op is OperatorKind.LINER_EXACT:
        amplitude = liner_amplitude(x)
    else:
        amplitude = np.ones(x.shape)
    return phase, amplitude, singular
