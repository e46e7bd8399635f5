"""Two-body motion with scale-invariant corrections, in physical time ``tau``.

The equation of motion is Newton's law plus a drag-like term along the
velocity, with a slowly growing mass::

    d2r/dtau2 = -G M(tau) r / |r|^3 + (psi(tau) / tau0) dr/dtau
    M(tau)    = M0 * t(tau)

``(psi / tau0) r^2 phi_dot`` is conserved, orbits expand like ``t(tau)``, and
the eccentricity and circular speed stay fixed.  In comoving coordinates
``rho = r / t`` with log-time ``ln t`` the problem is autonomous (Kepler plus
a weak repulsive ``rho`` term), which is what makes the "secular track"
states built here exact solutions rather than approximations.

Integration runs on elapsed time ``s = tau - tau_start`` so that sub-period
timings keep full precision when ``tau`` itself is ~1e10 periods.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from sivkit import _ode
from sivkit.errors import CollisionError, DomainError, IllConditionedFitError
from sivkit.gauge import CosmologyParams, dt_dtau, psi_factor, t_of_tau

DEFAULT_TOL = 1e-12
DEFAULT_R_MIN = 1e-12
WEAK_FIELD_LIMIT = 0.01


@dataclass(frozen=True)
class GravitySystem:
    """Central mass, gravitational constant and background model.

    ``M0`` is the total system mass at ``tau0``.  With ``siv_enabled=False``
    the mass is constant and the velocity term vanishes (plain Newton).
    """

    G: float
    M0: float
    params: CosmologyParams = field(default_factory=CosmologyParams)
    siv_enabled: bool = True
    c: float = math.inf
    r_min: float = DEFAULT_R_MIN

    def __post_init__(self):
        if not self.G > 0:
            raise DomainError(f"G must be > 0, got {self.G!r}")
        if not self.M0 > 0:
            raise DomainError(f"M0 must be > 0, got {self.M0!r}")
        if not self.r_min >= 0:
            raise DomainError(f"r_min must be >= 0, got {self.r_min!r}")

    @property
    def tau0(self) -> float:
        return self.params.tau0

    def t_at(self, tau):
        return t_of_tau(tau, self.params)

    def kappa(self, tau):
        """Coefficient of the velocity term, ``psi(tau) / tau0`` (0 in Newton mode)."""
        if not self.siv_enabled:
            if np.any(np.asarray(tau) < 0):
                raise DomainError(f"tau must be >= 0, got {tau!r}")
            return np.zeros(np.shape(tau)) if np.ndim(tau) else 0.0
        return psi_factor(tau, self.params) / self.params.tau0

    def mass(self, tau):
        return mass_at(tau, self)

    def newtonian(self) -> "GravitySystem":
        return GravitySystem(self.G, self.M0, self.params, False, self.c, self.r_min)


@dataclass(frozen=True, eq=False)
class OrbitState:
    tau: float
    r_vec: np.ndarray
    v_vec: np.ndarray

    def __post_init__(self):
        for name in ("r_vec", "v_vec"):
            arr = np.array(getattr(self, name), dtype=float).reshape(2)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def r(self) -> float:
        return float(math.hypot(*self.r_vec))

    @property
    def speed(self) -> float:
        return float(math.hypot(*self.v_vec))

    @property
    def phi(self) -> float:
        return float(math.atan2(self.r_vec[1], self.r_vec[0]))

    @property
    def r2_phi_dot(self) -> float:
        """Specific angular momentum ``r^2 phi_dot = x vy - y vx``."""
        x, y = self.r_vec
        vx, vy = self.v_vec
        return float(x * vy - y * vx)


@dataclass(frozen=True)
class ConicOrbit:
    """Instantaneous conic ``r = r_c / (1 + e cos(phi - phi0))`` at ``tau_ref``.

    ``r_c = L^2 tau0^2 / (G M(tau_ref) psi(tau_ref)^2)``; use the two
    constructors to keep that relation.
    """

    L: float
    r_c: float
    e: float
    phi0: float
    tau_ref: float

    def __post_init__(self):
        if not self.r_c > 0:
            raise DomainError(f"r_c must be > 0, got {self.r_c!r}")
        if not self.e >= 0:
            raise DomainError(f"e must be >= 0, got {self.e!r}")

    @classmethod
    def from_angular_momentum(cls, L, e, phi0, tau_ref, system: GravitySystem):
        w = _angular_weight(tau_ref, system)
        r_c = L * L / (system.G * mass_at(tau_ref, system) * w * w)
        return cls(float(L), float(r_c), float(e), float(phi0), float(tau_ref))

    @classmethod
    def from_radius(cls, r_c, e, phi0, tau_ref, system: GravitySystem):
        w = _angular_weight(tau_ref, system)
        L = w * math.sqrt(r_c * system.G * mass_at(tau_ref, system))
        return cls(float(L), float(r_c), float(e), float(phi0), float(tau_ref))

    @property
    def semi_major(self) -> float:
        if self.e >= 1:
            raise DomainError("semi-major axis undefined for e >= 1")
        return self.r_c / (1.0 - self.e * self.e)

    def r_c_at(self, tau, system: GravitySystem):
        """``r_c`` carried along its secular drift, ``r_c * t(tau) / t(tau_ref)``."""
        if not system.siv_enabled:
            return self.r_c
        return self.r_c * system.t_at(tau) / system.t_at(self.tau_ref)

    def radius(self, phi):
        return binet_radius(phi, self)


@dataclass(frozen=True)
class SecularRates:
    """Relative rates per unit ``tau``."""

    a_dot_over_a: float
    M_dot_over_M: float
    T_dot_over_T: float
    psi_dot_over_psi: float


# -- point quantities ------------------------------------------------------


def _angular_weight(tau, system):
    return system.kappa(tau) if system.siv_enabled else 1.0


def mass_at(tau, system: GravitySystem):
    """``M(tau) = M0 * t(tau)``; ``M0`` when SIV is disabled."""
    if np.any(np.asarray(tau) < 0):
        raise DomainError(f"tau must be >= 0, got {tau!r}")
    if not system.siv_enabled:
        return system.M0 * np.ones_like(tau, dtype=float) if np.ndim(tau) else system.M0
    return system.M0 * system.t_at(tau)


def potential_gradient(r_vec, tau, system: GravitySystem) -> np.ndarray:
    """``grad Phi = G M(tau) r / |r|^3`` for ``Phi = -G M / r``."""
    r_vec = np.asarray(r_vec, dtype=float)
    rn = math.hypot(*r_vec)
    if rn <= system.r_min:
        raise CollisionError(f"|r| = {rn!r} below r_min = {system.r_min!r}", tau)
    return system.G * mass_at(tau, system) * r_vec / rn**3


def acceleration(state: OrbitState, system: GravitySystem) -> np.ndarray:
    """Newtonian pull plus the dynamical-gravity term ``(psi/tau0) v``."""
    grad = potential_gradient(state.r_vec, state.tau, system)
    return -grad + system.kappa(state.tau) * state.v_vec


def angular_momentum(state: OrbitState, system: GravitySystem) -> float:
    """Conserved angular quantity: ``(psi/tau0) r^2 phi_dot`` in SIV mode,
    plain ``r^2 phi_dot`` in Newton mode."""
    return float(_angular_weight(state.tau, system) * state.r2_phi_dot)


def orbital_energy(state: OrbitState, system: GravitySystem) -> float:
    """Specific energy ``v^2/2 - G M(tau)/r`` (conserved only in Newton mode)."""
    return 0.5 * state.speed**2 - system.G * mass_at(state.tau, system) / state.r


def binet_radius(phi, conic: ConicOrbit):
    denom = 1.0 + conic.e * np.cos(np.asarray(phi) - conic.phi0)
    if np.any(denom <= 0):
        raise DomainError(f"phi={phi!r} is at or beyond the conic asymptote (e={conic.e})")
    return conic.r_c / denom


def circular_speed(r_c, tau, system: GravitySystem):
    """``sqrt(G M(tau) / r_c)``."""
    if np.any(np.asarray(r_c) <= 0):
        raise DomainError(f"r_c must be > 0, got {r_c!r}")
    return np.sqrt(system.G * mass_at(tau, system) / r_c)


def secular_rates(tau, system: GravitySystem | CosmologyParams) -> SecularRates:
    """Relative drift of semi-major axis, mass, period and psi at ``tau``.

    The first three all equal ``psi/tau0``; psi itself decays at the same
    rate.  Zero in Newton mode.
    """
    if isinstance(system, GravitySystem):
        if not system.siv_enabled:
            if tau < 0:
                raise DomainError(f"tau must be >= 0, got {tau!r}")
            return SecularRates(0.0, 0.0, 0.0, 0.0)
        params = system.params
    else:
        params = system
    rate = float(psi_factor(tau, params) / params.tau0)
    return SecularRates(rate, rate, rate, -rate)


def recession_rate(a_semi: float, tau: float, params: CosmologyParams) -> float:
    """``da/dtau = a * psi(tau) / tau0`` in length per unit of ``tau``."""
    return a_semi * secular_rates(tau, params).a_dot_over_a


def kepler_ratio(r_c, M_total, T, G):
    """``4 pi^2 r_c^3 / (G M T^2)``; 1 for a consistent circular orbit."""
    for name, v in (("r_c", r_c), ("M_total", M_total), ("T", T), ("G", G)):
        if np.any(np.asarray(v) <= 0):
            raise DomainError(f"{name} must be > 0, got {v!r}")
    return 4.0 * math.pi**2 * r_c**3 / (G * M_total * T * T)


def weak_field_consistency(state: OrbitState, system: GravitySystem,
                           kappa_t: float | None = None) -> float:
    """Discrepancy between the slow-motion geodesic form and ``acceleration``.

    The geodesic limit is evaluated in t-units, ``dv/dt = -grad Phi_t +
    kappa v`` with ``kappa = 1/t`` and ``G_t = G (dtau/dt)^2``, then mapped
    back to tau-units.  Returns the norm of the difference, which is zero
    up to rounding unless ``kappa_t`` is overridden with a wrong value.
    """
    if state.speed / system.c >= WEAK_FIELD_LIMIT:
        raise DomainError(
            f"weak-field form needs |v|/c < {WEAK_FIELD_LIMIT}, got {state.speed / system.c!r}"
        )
    if system.siv_enabled:
        s = dt_dtau(system.params)
        t = system.t_at(state.tau)
        mass = system.M0 * t
        k = 1.0 / t if kappa_t is None else kappa_t
    else:
        s, mass = 1.0, system.M0
        k = 0.0 if kappa_t is None else kappa_t
    G_t = system.G / (s * s)
    v_t = state.v_vec / s
    r = state.r_vec
    acc_t = -G_t * mass * r / math.hypot(*r) ** 3 + k * v_t
    return float(np.linalg.norm(s * s * acc_t - acceleration(state, system)))


# -- initial states --------------------------------------------------------


def _rotate(radial, tangential, phase):
    c, s = math.cos(phase), math.sin(phase)
    return np.array([radial * c - tangential * s, radial * s + tangential * c])


def circular_track_state(r, tau, system: GravitySystem, phase: float = 0.0) -> OrbitState:
    """State on the exact expanding circular orbit through radius ``r`` at ``tau``.

    The radial velocity is ``r psi/tau0`` and the total speed is
    ``sqrt(G M / r)``, so ``r`` grows exactly like ``t(tau)`` and the speed
    never changes.  In Newton mode this is the ordinary circular orbit.
    """
    if not r > 0:
        raise DomainError(f"r must be > 0, got {r!r}")
    v_r = r * system.kappa(tau)
    v2 = system.G * mass_at(tau, system) / r
    v_t = math.sqrt(v2 - v_r * v_r)
    pos = _rotate(r, 0.0, phase)
    vel = _rotate(v_r, v_t, phase)
    return OrbitState(tau, pos, vel)


def pericenter_state(a_semi, e, tau, system: GravitySystem, phase: float = 0.0) -> OrbitState:
    """Pericenter of an orbit with semi-major axis ``a_semi`` and eccentricity
    ``e`` at ``tau``, comoving with the secular expansion in SIV mode."""
    if not 0 <= e < 1:
        raise DomainError(f"e must be in [0, 1), got {e!r}")
    if e == 0:
        return circular_track_state(a_semi, tau, system, phase)
    r_p = a_semi * (1.0 - e)
    v_t = math.sqrt(system.G * mass_at(tau, system) * (1.0 + e) / r_p)
    v_r = r_p * system.kappa(tau)
    return OrbitState(tau, _rotate(r_p, 0.0, phase), _rotate(v_r, v_t, phase))


# -- integration -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OrbitTrajectory(Sequence):
    """Integrated orbit sampled at ``tau_start + elapsed``.

    Behaves as a sequence of ``OrbitState``; ``sample`` and ``state_at``
    evaluate the integrator's interpolant at arbitrary elapsed times.
    """

    system: GravitySystem
    tau_start: float
    elapsed: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    knots: np.ndarray = field(repr=False)
    _dense: Callable = field(repr=False)

    def __len__(self):
        return len(self.elapsed)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return OrbitState(self.tau_start + self.elapsed[i], self.positions[i],
                          self.velocities[i])

    @property
    def tau(self) -> np.ndarray:
        return self.tau_start + self.elapsed

    @property
    def duration(self) -> float:
        return float(self.knots[-1])

    def t_at_elapsed(self, s):
        """``t`` at elapsed time ``s`` without forming ``tau_start + s``."""
        t0 = self.system.t_at(self.tau_start)
        return t0 + np.asarray(s) * dt_dtau(self.system.params)

    def kappa_at_elapsed(self, s):
        if not self.system.siv_enabled:
            return np.zeros_like(np.asarray(s, dtype=float))
        return dt_dtau(self.system.params) / self.t_at_elapsed(s)

    def mass_at_elapsed(self, s):
        if not self.system.siv_enabled:
            return self.system.M0 * np.ones_like(np.asarray(s, dtype=float))
        return self.system.M0 * self.t_at_elapsed(s)

    def sample(self, s):
        """Positions and velocities, shapes ``(..., 2)``, at elapsed ``s``."""
        y = self._dense(np.asarray(s, dtype=float))
        return np.moveaxis(y[:2], 0, -1), np.moveaxis(y[2:], 0, -1)

    def state_at(self, s: float) -> OrbitState:
        pos, vel = self.sample(s)
        return OrbitState(self.tau_start + s, pos, vel)

    def angular_momentum(self) -> np.ndarray:
        """Conserved angular quantity at every sample."""
        r2pd = self.positions[:, 0] * self.velocities[:, 1] - self.positions[:, 1] * self.velocities[:, 0]
        if self.system.siv_enabled:
            return self.kappa_at_elapsed(self.elapsed) * r2pd
        return r2pd

    def energy(self) -> np.ndarray:
        r = np.hypot(self.positions[:, 0], self.positions[:, 1])
        v2 = np.sum(self.velocities**2, axis=1)
        return 0.5 * v2 - self.system.G * self.mass_at_elapsed(self.elapsed) / r


def integrate_orbit(
    initial: OrbitState,
    system: GravitySystem,
    tau_end: float | None = None,
    tol: float = DEFAULT_TOL,
    n_samples: int = 1001,
    sample_taus=None,
    duration: float | None = None,
) -> OrbitTrajectory:
    """Integrate from ``initial`` to ``tau_end`` (or for ``duration``).

    Samples are ``n_samples`` evenly spaced times, or ``sample_taus`` if
    given, all taken from the dense interpolant.
    """
    _ode.check_tol(tol)
    if (tau_end is None) == (duration is None):
        raise DomainError("give exactly one of tau_end and duration")
    span = tau_end - initial.tau if duration is None else float(duration)
    if not span > 0:
        raise DomainError(f"tau_end must be after the initial tau {initial.tau!r}")
    if initial.r <= system.r_min:
        raise CollisionError(f"initial |r| = {initial.r!r} below r_min", initial.tau)

    G, M0, siv = system.G, system.M0, system.siv_enabled
    rate = dt_dtau(system.params)
    t_start = float(system.t_at(initial.tau))
    if siv and t_start <= 0:
        raise DomainError("cannot start at the Big Bang of an empty model (t = 0)")
    r_min = system.r_min

    def rhs(s, y):
        x, yy, vx, vy = y
        r2 = x * x + yy * yy
        r3 = r2 * math.sqrt(r2)
        if siv:
            t = t_start + s * rate
            gm = G * M0 * t
            k = rate / t
        else:
            gm, k = G * M0, 0.0
        return [vx, vy, -gm * x / r3 + k * vx, -gm * yy / r3 + k * vy]

    def collide(s, y):
        return math.hypot(y[0], y[1]) - r_min

    collide.terminal = True
    collide.direction = -1

    v_scale = max(initial.speed, math.sqrt(G * mass_at(initial.tau, system) / initial.r))
    atol = tol * 1e-3 * np.array([initial.r, initial.r, v_scale, v_scale])
    y0 = np.concatenate([initial.r_vec, initial.v_vec])
    sol = _ode.solve(rhs, (0.0, span), y0, tol, atol, events=collide)
    if sol.status == 1:
        s_hit = float(sol.t_events[0][0])
        raise CollisionError(
            f"collision (|r| < {r_min!r}) at tau = {initial.tau + s_hit!r}",
            initial.tau + s_hit,
        )

    if sample_taus is None:
        elapsed = np.linspace(0.0, span, max(int(n_samples), 2))
    else:
        elapsed = np.asarray(sample_taus, dtype=float) - initial.tau
        if np.any(elapsed < 0) or np.any(elapsed > span):
            raise DomainError("sample_taus must lie inside the integration span")
    y = sol.sol(elapsed)
    return OrbitTrajectory(
        system=system,
        tau_start=initial.tau,
        elapsed=elapsed,
        positions=y[:2].T.copy(),
        velocities=y[2:].T.copy(),
        knots=np.asarray(sol.t),
        _dense=sol.sol,
    )


# -- event timing ----------------------------------------------------------

_SCAN_SUBDIVISIONS = 8


def _roots(traj: OrbitTrajectory, g, rising=True, accept=None):
    """Elapsed times where ``g(s)`` changes sign (upward if ``rising``).

    ``g`` must accept an array of times; it is scanned on a grid refined
    from the integrator's own steps, then each bracket is solved by brentq.
    """
    knots = traj.knots
    grid = np.concatenate([
        np.linspace(a, b, _SCAN_SUBDIVISIONS, endpoint=False)
        for a, b in zip(knots[:-1], knots[1:])
    ] + [knots[-1:]])
    vals = g(grid)
    if rising:
        idx = np.nonzero((vals[:-1] < 0) & (vals[1:] >= 0))[0]
    else:
        idx = np.nonzero((vals[:-1] > 0) & (vals[1:] <= 0))[0]
    out = []
    for i in idx:
        lo, hi = grid[i], grid[i + 1]
        root = brentq(lambda x: float(g(x)), lo, hi,
                      xtol=max(1e-12 * (hi - lo), 1e-300),
                      rtol=4 * np.finfo(float).eps)
        if accept is None or accept(root):
            out.append(root)
    return np.array(out)


def angle_crossings(traj: OrbitTrajectory, phi: float = 0.0) -> np.ndarray:
    """Elapsed times of counter-clockwise passages through direction ``phi``."""
    d = np.array([math.cos(phi), math.sin(phi)])

    def g(s):
        pos, _ = traj.sample(s)
        return d[0] * pos[..., 1] - d[1] * pos[..., 0]

    def ahead(s):
        pos, _ = traj.sample(s)
        return float(pos @ d) > 0

    return _roots(traj, g, rising=True, accept=ahead)


def pericenter_times(traj: OrbitTrajectory) -> np.ndarray:
    """Elapsed times of pericenter in comoving radius ``r / t``.

    ``d ln(r/t) / dtau = r.v / r^2 - psi/tau0``; pericenters are its upward
    zero crossings.  In Newton mode these are ordinary pericenters.
    """

    def g(s):
        pos, vel = traj.sample(s)
        radial = np.sum(pos * vel, axis=-1) / np.sum(pos * pos, axis=-1)
        return radial - traj.kappa_at_elapsed(s)

    return _roots(traj, g, rising=True)


def _log_mean_offset(x: float) -> float:
    """``x / log1p(x) - 1`` without cancellation for small ``x``."""
    if abs(x) < 1e-4:
        return x * (0.5 + x * (-1.0 / 12.0 + x * (1.0 / 24.0 - x * 19.0 / 720.0)))
    return x / math.log1p(x) - 1.0


@dataclass(frozen=True)
class PeriodMeasurement:
    """One orbital period measured between successive crossings.

    ``epoch`` is the elapsed time at which ``2 pi / phi_dot`` equals ``T``
    on an expanding circular orbit (the log-mean of ``t`` across the period);
    ``radius`` and ``mass`` are evaluated there.
    """

    start: float
    T: float
    epoch: float
    radius: float
    mass: float
    kepler_ratio: float


def measure_periods(traj: OrbitTrajectory, phi: float = 0.0) -> list[PeriodMeasurement]:
    """Periods from successive passages through ``phi`` and their Kepler ratios."""
    cross = angle_crossings(traj, phi)
    out = []
    rate = dt_dtau(traj.system.params)
    for s_a, s_b in zip(cross[:-1], cross[1:]):
        T = float(s_b - s_a)
        if traj.system.siv_enabled:
            t_a = float(traj.t_at_elapsed(s_a))
            off = _log_mean_offset(T * rate / t_a)
            epoch = float(s_a + t_a * off / rate)
        else:
            epoch = float(s_a + 0.5 * T)
        pos, _ = traj.sample(epoch)
        radius = float(math.hypot(*pos))
        mass = float(traj.mass_at_elapsed(epoch))
        ratio = float(kepler_ratio(radius, mass, T, traj.system.G))
        out.append(PeriodMeasurement(float(s_a), T, epoch, radius, mass, ratio))
    return out


# -- conic fitting ---------------------------------------------------------


def fit_conic(trajectory, system: GravitySystem, tau_ref: float | None = None):
    """Least-squares conic through the samples, with ``r_c`` drifting as ``t``.

    Fits ``u * t(tau)/t(tau_ref) = (1 + e cos(phi - phi0)) / r_c`` (linear
    in ``1/r_c``, ``e cos phi0``, ``e sin phi0``).  Returns
    ``(ConicOrbit, rms)`` where ``rms`` is the RMS of ``u - u_model``.
    """
    states = list(trajectory)
    if len(states) < 8:
        raise IllConditionedFitError(f"need >= 8 samples, got {len(states)}")
    tau = np.array([s.tau for s in states])
    if tau_ref is None:
        tau_ref = float(tau[0])
    pos = np.array([s.r_vec for s in states])
    r = np.hypot(pos[:, 0], pos[:, 1])
    phi = np.arctan2(pos[:, 1], pos[:, 0])
    if np.ptp(np.unwrap(phi)) < math.pi:
        raise IllConditionedFitError("arc shorter than half a revolution")

    if system.siv_enabled:
        scale = system.t_at(tau) / system.t_at(tau_ref)
    else:
        scale = np.ones_like(r)
    u = 1.0 / r
    X = np.column_stack([np.ones_like(phi), np.cos(phi), np.sin(phi)])
    if np.linalg.cond(X) > 1e8:
        raise IllConditionedFitError("design matrix is ill-conditioned")
    coef, *_ = np.linalg.lstsq(X, u * scale, rcond=None)
    A, B, C = coef
    if not A > 0:
        raise IllConditionedFitError("fit gives a non-positive 1/r_c")
    u_model = (X @ coef) / scale
    rms = float(np.sqrt(np.mean((u - u_model) ** 2)))
    conic = ConicOrbit.from_radius(1.0 / A, math.hypot(B, C) / A,
                                   math.atan2(C, B), tau_ref, system)
    return conic, rms


def eccentricity_by_period(traj: OrbitTrajectory, samples_per_window: int = 64) -> np.ndarray:
    """Fitted eccentricity over each pericenter-to-pericenter window."""
    peri = pericenter_times(traj)
    es = []
    for s_a, s_b in zip(peri[:-1], peri[1:]):
        s = np.linspace(s_a, s_b, samples_per_window, endpoint=False)
        states = [traj.state_at(x) for x in s]
        conic, _ = fit_conic(states, traj.system, tau_ref=traj.tau_start + s_a)
        es.append(conic.e)
    return np.array(es)


# -- polar cross-check -----------------------------------------------------


def polar_residuals(traj: OrbitTrajectory, s: float, h: float | None = None):
    """Radial and azimuthal equation residuals at elapsed ``s``.

    Acceleration comes from a central difference of the interpolated
    velocity, so this checks the trajectory against the polar form of the
    equations rather than against the right-hand side that produced it.
    Residuals are divided by ``G M / r^2``.
    """
    pos, vel = traj.sample(s)
    r = math.hypot(*pos)
    if h is None:
        h = 1e-3 * r / max(math.hypot(*vel), 1e-300)
    _, v_plus = traj.sample(s + h)
    _, v_minus = traj.sample(s - h)
    acc = (v_plus - v_minus) / (2.0 * h)
    r_dot = float(pos @ vel) / r
    phi_dot = float(pos[0] * vel[1] - pos[1] * vel[0]) / (r * r)
    r_ddot = (float(vel @ vel) + float(pos @ acc)) / r - r_dot * r_dot / r
    phi_ddot = float(pos[0] * acc[1] - pos[1] * acc[0]) / (r * r) - 2.0 * r_dot * phi_dot / r
    k = float(traj.kappa_at_elapsed(s))
    gm = traj.system.G * float(traj.mass_at_elapsed(s))
    scale = gm / (r * r)
    res_r = r_ddot - r * phi_dot**2 + gm / (r * r) - k * r_dot
    res_phi = r * phi_ddot + 2.0 * r_dot * phi_dot - k * r * phi_dot
    return res_r / scale, res_phi / scale
