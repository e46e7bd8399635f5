"""Scale-invariant vacuum gauge and the two time scales.

The gauge factor is ``lambda(t) = t0 / t`` in the dimensionless time ``t``
(``t0 = 1`` today).  Physical ("user") time ``tau`` runs from 0 at the Big
Bang to ``tau0`` today and is linearly related to ``t``::

    tau = tau0 * (t - t_in) / (1 - t_in),    t_in = omega_m ** (1/3)

All derivatives here are closed forms.  Functions accept scalars or numpy
arrays.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from sivkit.errors import DomainError

T0 = 1.0
DEFAULT_TAU0_GYR = 13.8
DEFAULT_LAMBDA_E = 3.0
NEAR_CRITICAL_OMEGA = 0.999


class NearCriticalDensityWarning(UserWarning):
    """omega_m is so close to 1 that scale-invariant effects all but vanish."""


def _check_positive(name, value):
    if np.any(np.asarray(value) <= 0) or np.any(np.isnan(value)):
        raise DomainError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class CosmologyParams:
    """Background model parameters.

    ``tau0`` is in whatever time unit the caller works in (Gyr for the
    cosmology tables, the orbit's own time unit for dynamics).  ``lambda_E``
    is the Einstein-frame cosmological constant in t-units; ``3 / t0**2``
    is the only value consistent with ``lambda(t0) = 1``.
    """

    omega_m: float = 0.3
    k: int = 0
    cs2: float = 0.0
    tau0: float = DEFAULT_TAU0_GYR
    lambda_E: float = DEFAULT_LAMBDA_E

    def __post_init__(self):
        om = self.omega_m
        if not np.isfinite(om) or om < 0:
            raise DomainError(f"omega_m must be in [0, 1), got {om!r}")
        if om >= 1:
            raise DomainError(
                f"no scale-invariant solution for omega_m >= 1 (got {om!r})"
            )
        if om >= NEAR_CRITICAL_OMEGA:
            warnings.warn(
                f"omega_m={om!r} is near 1; psi0={1 - np.cbrt(om):.3g} makes "
                "scale-invariant effects numerically negligible",
                NearCriticalDensityWarning,
                stacklevel=3,
            )
        if self.k not in (-1, 0, 1):
            raise DomainError(f"curvature k must be -1, 0 or +1, got {self.k!r}")
        if not 0 <= self.cs2 <= 1:
            raise DomainError(f"cs2 must be in [0, 1], got {self.cs2!r}")
        if not self.tau0 > 0:
            raise DomainError(f"tau0 must be > 0, got {self.tau0!r}")
        if not self.lambda_E > 0:
            raise DomainError(f"lambda_E must be > 0, got {self.lambda_E!r}")

    def t_in(self) -> float:
        return float(np.cbrt(self.omega_m))

    @property
    def psi0(self) -> float:
        return 1.0 - self.t_in()

    @property
    def is_flat_dust(self) -> bool:
        return self.k == 0 and self.cs2 == 0


@dataclass(frozen=True)
class TimeScales:
    """One epoch expressed on both time scales."""

    t: float
    tau: float

    @classmethod
    def from_t(cls, t: float, params: CosmologyParams) -> "TimeScales":
        return cls(t=float(t), tau=float(tau_of_t(t, params)))

    @classmethod
    def from_tau(cls, tau: float, params: CosmologyParams) -> "TimeScales":
        return cls(t=float(t_of_tau(tau, params)), tau=float(tau))


# -- gauge factor and connection -------------------------------------------


def lambda_t(t, t0: float = T0):
    """Gauge factor ``t0 / t``."""
    _check_positive("t", t)
    return t0 / t


def lambda_from_cosmological_constant(t, lambda_E: float = DEFAULT_LAMBDA_E):
    """General solution ``sqrt(3 / lambda_E) / t``; equals ``lambda_t`` iff
    ``lambda_E = 3 / t0**2``."""
    _check_positive("t", t)
    return math.sqrt(3.0 / lambda_E) / t


def lambda_dot(t, t0: float = T0):
    _check_positive("t", t)
    return -t0 / (t * t)


def lambda_ddot(t, t0: float = T0):
    _check_positive("t", t)
    return 2.0 * t0 / (t * t * t)


def kappa_t(t):
    """Metrical connection ``kappa = -lambda_dot / lambda = 1 / t``."""
    _check_positive("t", t)
    return 1.0 / t


def kappa_dot(t):
    """Closed-form ``d kappa / dt = -1 / t**2`` (``= -kappa**2``)."""
    _check_positive("t", t)
    return -1.0 / (t * t)


def vacuum_field_rate(t):
    """The rolling field ``-lambda_dot / lambda`` that sets the vacuum density.

    Not to be confused with ``psi_factor``, the dynamical-gravity factor.
    """
    return kappa_t(t)


def vacuum_density(t, G: float):
    """Vacuum energy density ``(1/2) C (lambda_dot / lambda)**2`` with
    ``C = 3 / (4 pi G)``, i.e. ``3 / (8 pi G t**2)``."""
    _check_positive("t", t)
    _check_positive("G", G)
    C = 3.0 / (4.0 * math.pi * G)
    return 0.5 * C * vacuum_field_rate(t) ** 2


def gauge_residuals(t, params: CosmologyParams | None = None, t0: float = T0):
    """Residuals of the two vacuum gauge conditions at ``lambda = t0 / t``.

    Returns ``(r1, r2)`` with::

        r1 = 3 lambda_dot**2 / lambda**2 - lambda**2 * lambda_E
        r2 = 6 lambda_ddot - 4 lambda**3 * lambda_E

    Both vanish identically when ``lambda_E = 3 / t0**2``.
    """
    lam_E = DEFAULT_LAMBDA_E if params is None else params.lambda_E
    lam = lambda_t(t, t0)
    # lambda_dot = -lambda^2/t0 and lambda_ddot = 2 lambda^3/t0^2, written via
    # lambda so both sides round alike; near t = 0.1 the terms are ~1e4.
    ld = -lam * lam / t0
    ldd = 2.0 * lam**3 / (t0 * t0)
    r1 = 3.0 * ld * ld / (lam * lam) - lam * lam * lam_E
    r2 = 6.0 * ldd - 4.0 * lam**3 * lam_E
    return r1, r2


# -- time scales -----------------------------------------------------------


def t_in(params: CosmologyParams) -> float:
    """Big-Bang epoch ``omega_m ** (1/3)`` in t-units."""
    return params.t_in()


def dtau_dt(params: CosmologyParams) -> float:
    return params.tau0 / (1.0 - params.t_in())


def dt_dtau(params: CosmologyParams) -> float:
    return (1.0 - params.t_in()) / params.tau0


def tau_of_t(t, params: CosmologyParams):
    tin = params.t_in()
    if np.any(np.asarray(t) < tin) or np.any(np.isnan(t)):
        raise DomainError(f"t must be >= t_in = {tin!r}, got {t!r}")
    return params.tau0 * (t - tin) / (1.0 - tin)


def t_of_tau(tau, params: CosmologyParams):
    if np.any(np.asarray(tau) < 0) or np.any(np.isnan(tau)):
        raise DomainError(f"tau must be >= 0, got {tau!r}")
    tin = params.t_in()
    return tin + (tau / params.tau0) * (1.0 - tin)


# -- dynamical-gravity factor ----------------------------------------------


def psi_factor(tau, params: CosmologyParams):
    """Numerical factor ``psi(tau) = (1 - t_in) / t(tau)``; ``psi(tau0) = 1 - t_in``."""
    t = t_of_tau(tau, params)
    if np.any(np.asarray(t) == 0):
        raise DomainError("psi diverges at the Big Bang when omega_m = 0 (t = 0)")
    return (1.0 - params.t_in()) / t


psi_tau = psi_factor


def psi0(params: CosmologyParams) -> float:
    return params.psi0


def psi_rate(psi, tau0: float):
    """``d psi / d tau = -psi**2 / tau0``."""
    if np.any(np.asarray(psi) < 0):
        raise DomainError(f"psi must be >= 0, got {psi!r}")
    _check_positive("tau0", tau0)
    return -(psi * psi) / tau0


def psi_relative_rate(psi, tau0: float):
    """``psi_dot / psi = -psi / tau0``."""
    if np.any(np.asarray(psi) < 0):
        raise DomainError(f"psi must be >= 0, got {psi!r}")
    _check_positive("tau0", tau0)
    return -psi / tau0
