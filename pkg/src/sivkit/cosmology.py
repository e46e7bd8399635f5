"""Background expansion of scale-invariant cosmological models.

Units: dimensionless t-time with ``t0 = 1``, ``a(t0) = 1``, and densities in
units where ``8 pi G = 1``.  In these units the cosmological equations read,
with ``lambda_dot / lambda = -1 / t``::

    constraint:    rho / 3          = k/a^2 + H^2 - 2 H / t
    pressure:      -p               = k/a^2 + 2 a_ddot/a + H^2 - 4 H / t
    acceleration:  -(3p + rho) / 6  = a_ddot / a - H / t
    conservation:  rho * a^(3(1+cs2)) * lambda^(1+3cs2) = const

The integrator advances the acceleration equation with ``rho`` eliminated
through the conservation law; the constraint and pressure equations are then
independent residual checks.  ``freeze_gauge=True`` zeroes every
``lambda_dot / lambda`` term and sets ``lambda = 1``, which recovers the
classical Friedmann equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from sivkit import _ode
from sivkit.errors import DomainError, ToleranceError, UnsupportedModelError
from sivkit.gauge import CosmologyParams, lambda_t, t_of_tau, tau_of_t

DEFAULT_TOL = 1e-10
COLLAPSE_FRACTION = 1e-3
TABLE_COLUMNS = ("t", "tau", "a", "a_dot_over_a", "lambda", "rho")


@dataclass(frozen=True)
class BackgroundState:
    """One sample ``(t, a, a_dot, rho)`` of an expansion history.

    ``a_ddot`` is optional; it is needed only for the pressure and
    acceleration residuals.
    """

    t: float
    a: float
    a_dot: float
    rho: float
    a_ddot: float = math.nan

    @property
    def hubble(self) -> float:
        return self.a_dot / self.a


@dataclass(frozen=True)
class BackgroundHistory:
    params: CosmologyParams
    samples: tuple[BackgroundState, ...]
    conservation_constant: float
    freeze_gauge: bool = False
    _dense: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        ts = np.array([s.t for s in self.samples])
        if len(ts) > 1 and not np.all(np.diff(ts) > 0):
            raise DomainError("history samples must be strictly increasing in t")

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples])

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    @property
    def a(self) -> np.ndarray:
        return self.column("a")

    def at(self, t: float) -> BackgroundState:
        """State at ``t`` from the integrator's dense output."""
        if self._dense is None:
            raise DomainError("history carries no dense output")
        lo, hi = self.samples[0].t, self.samples[-1].t
        if not lo <= t <= hi:
            raise DomainError(f"t={t!r} outside integrated span [{lo!r}, {hi!r}]")
        a, a_dot = self._dense(t)
        return _state(t, a, a_dot, self.params, self.conservation_constant,
                      self.freeze_gauge)

    def conservation_values(self) -> np.ndarray:
        """``rho * a^p * lambda^q`` at every sample, with rho taken from the constraint."""
        p, q = conservation_exponents(self.params.cs2)
        lam = 1.0 if self.freeze_gauge else lambda_t(self.t)
        return self.column("rho") * self.a**p * lam**q

    def conservation_drift(self) -> float:
        """Largest relative departure of ``conservation_values`` from the
        constant the integration was started with."""
        c = self.conservation_constant
        if c == 0:
            raise DomainError("relative drift undefined for an empty model (rho = 0)")
        return float(np.max(np.abs(self.conservation_values() / c - 1.0)))


def conservation_exponents(cs2: float) -> tuple[float, float]:
    """Powers of ``a`` and ``lambda`` in the conserved combination."""
    return 3.0 * (1.0 + cs2), 1.0 + 3.0 * cs2


# -- closed forms for the flat dust model ----------------------------------


def _require_flat_dust(params: CosmologyParams) -> None:
    if not params.is_flat_dust:
        raise UnsupportedModelError(
            f"closed form exists only for k=0, cs2=0 (got k={params.k}, cs2={params.cs2})"
        )


def _check_after_bang(t, params, strict):
    tin = params.t_in()
    arr = np.asarray(t)
    bad = np.any(arr <= tin) if strict else np.any(arr < tin)
    if bad or np.any(np.isnan(arr)):
        op = ">" if strict else ">="
        raise DomainError(f"t must be {op} t_in = {tin!r}, got {t!r}")


def _cube_gap(t, params):
    """``t^3 - omega_m`` factored through ``t_in`` so it vanishes exactly at ``t_in``."""
    tin = params.t_in()
    return (t - tin) * (t * t + t * tin + tin * tin)


def scale_factor_analytic(t, params: CosmologyParams):
    """Flat matter-era solution ``[(t^3 - omega_m) / (1 - omega_m)]^(2/3)``."""
    _require_flat_dust(params)
    _check_after_bang(t, params, strict=False)
    om = params.omega_m
    x = _cube_gap(t, params) / (1.0 - om)
    return np.maximum(x, 0.0) ** (2.0 / 3.0)


def hubble_analytic(t, params: CosmologyParams):
    """``a_dot / a = 2 t^2 / (t^3 - omega_m)``."""
    _require_flat_dust(params)
    _check_after_bang(t, params, strict=True)
    return 2.0 * t**2 / _cube_gap(t, params)


def a_ddot_over_a_analytic(t, params: CosmologyParams):
    """``a_ddot / a = 2 t (t^3 - 2 omega_m) / (t^3 - omega_m)^2``."""
    _require_flat_dust(params)
    _check_after_bang(t, params, strict=True)
    om = params.omega_m
    d = _cube_gap(t, params)
    return 2.0 * t * (d - om) / (d * d)


def analytic_state(t: float, params: CosmologyParams) -> BackgroundState:
    a = float(scale_factor_analytic(t, params))
    h = float(hubble_analytic(t, params))
    return BackgroundState(
        t=float(t),
        a=a,
        a_dot=h * a,
        rho=float(density_from_friedmann(t, params)),
        a_ddot=float(a_ddot_over_a_analytic(t, params)) * a,
    )


def present_day_hubble(params: CosmologyParams) -> float:
    """``H0`` in t-units from the constraint at ``t = a = 1`` with ``rho0 = 3 omega_m H0^2``.

    Solves ``(1 - omega_m) H0^2 - 2 H0 + k = 0`` for the expanding root.
    """
    om, k = params.omega_m, params.k
    disc = 1.0 - k * (1.0 - om)
    return (1.0 + math.sqrt(disc)) / (1.0 - om)


# -- Friedmann relations ---------------------------------------------------


def _constraint_density(t, a, a_dot, k, freeze_gauge=False):
    h = a_dot / a
    gauge = 0.0 if freeze_gauge else 2.0 * h / t
    return 3.0 * (k / (a * a) + h * h - gauge)


def density_from_friedmann(t, params: CosmologyParams,
                           history: BackgroundHistory | None = None):
    """Matter density from the constraint (units ``8 pi G = 1``).

    Uses the closed form for flat dust, otherwise the dense output of
    ``history``.
    """
    if history is None:
        _require_flat_dust(params)
        _check_after_bang(t, params, strict=True)
        om = params.omega_m
        d = _cube_gap(t, params)
        return 12.0 * om * t / (d * d)
    s = history.at(float(t))
    return _constraint_density(s.t, s.a, s.a_dot, params.k, history.freeze_gauge)


def friedmann_residuals(state: BackgroundState, params: CosmologyParams,
                        freeze_gauge: bool = False) -> tuple[float, float, float]:
    """Constraint, pressure and acceleration residuals at ``state`` (lhs minus rhs).

    The last two come back NaN when ``state.a_ddot`` is not set.
    """
    t, a, a_dot, rho = state.t, state.a, state.a_dot, state.rho
    h = a_dot / a
    lam_rate = 0.0 if freeze_gauge else -1.0 / t
    curv = params.k / (a * a)
    p = params.cs2 * rho
    add = state.a_ddot / a
    r1 = rho / 3.0 - (curv + h * h + 2.0 * h * lam_rate)
    r2 = -p - (curv + 2.0 * add + h * h + 4.0 * h * lam_rate)
    r3 = -(3.0 * p + rho) / 6.0 - (add + h * lam_rate)
    return r1, r2, r3


# -- numerical integration -------------------------------------------------


def _make_rhs(params, const, freeze_gauge):
    p_exp, q_exp = conservation_exponents(params.cs2)
    w = 1.0 + 3.0 * params.cs2

    def rhs(t, y):
        a, a_dot = y
        lam = 1.0 if freeze_gauge else 1.0 / t
        rho = const / (a**p_exp * lam**q_exp)
        a_ddot = -w * rho / 6.0 * a
        if not freeze_gauge:
            a_ddot += a_dot / t
        return [a_dot, a_ddot]

    return rhs


def _state(t, a, a_dot, params, const, freeze_gauge):
    rhs = _make_rhs(params, const, freeze_gauge)
    a_ddot = rhs(t, (a, a_dot))[1]
    return BackgroundState(
        t=float(t),
        a=float(a),
        a_dot=float(a_dot),
        rho=float(_constraint_density(t, a, a_dot, params.k, freeze_gauge)),
        a_ddot=float(a_ddot),
    )


def _solve(params, t_from, y_from, t_to, tol, freeze_gauge, const):
    rhs = _make_rhs(params, const, freeze_gauge)

    def hit_bang(t, y):
        return y[0]

    hit_bang.terminal = True
    atol = tol * 1e-6 * np.abs(np.asarray(y_from, dtype=float))
    sol = _ode.solve(rhs, (t_from, t_to), y_from, tol, atol, events=hit_bang, strict=False)
    # A collapse usually stalls the step controller before a crosses zero.
    collapsed = sol.status == -1 and sol.y[0, -1] < COLLAPSE_FRACTION * abs(y_from[0])
    if sol.status == 1 or collapsed:
        raise DomainError(f"scale factor reached zero at t={sol.t[-1]!r}")
    if sol.status == -1:
        raise ToleranceError(f"integrator failed at t={sol.t[-1]!r}: {sol.message}")
    return sol


def _initial_constant(t, a, a_dot, params, freeze_gauge):
    p_exp, q_exp = conservation_exponents(params.cs2)
    lam = 1.0 if freeze_gauge else 1.0 / t
    rho = _constraint_density(t, a, a_dot, params.k, freeze_gauge)
    h = a_dot / a
    if rho < 0 and -rho <= 1e-12 * 3.0 * (h * h + abs(params.k) / (a * a)):
        rho = 0.0  # cancellation noise in an empty universe
    if rho < 0:
        raise DomainError(f"initial state implies negative density rho={rho!r}")
    return rho * a**p_exp * lam**q_exp


def integrate_background(
    params: CosmologyParams,
    t_span: tuple[float, float],
    tol: float = DEFAULT_TOL,
    initial: tuple[float, float] | None = None,
    n_samples: int = 200,
    sample_t: Sequence[float] | None = None,
    freeze_gauge: bool = False,
) -> BackgroundHistory:
    """Integrate the acceleration equation plus the conservation law over ``t_span``.

    ``initial`` is ``(a, a_dot)`` at ``t_span[0]``.  It defaults to the
    closed-form flat-dust state, or with ``freeze_gauge`` to the
    Einstein-de Sitter state ``a = t^(2/3)``; any other model needs it
    supplied.  The conserved constant comes from the closed form when the
    default initial state is used, otherwise from the constraint.
    """
    _ode.check_tol(tol)
    t_start, t_end = map(float, t_span)
    if not t_start < t_end:
        raise DomainError(f"t_span must be increasing, got {t_span!r}")
    if not freeze_gauge and t_start <= params.t_in():
        raise DomainError(f"t_start must be > t_in = {params.t_in()!r}")
    if t_start <= 0:
        raise DomainError("t_start must be > 0")

    const = None
    if initial is None:
        if not params.is_flat_dust:
            raise DomainError("initial (a, a_dot) is required unless k=0 and cs2=0")
        if freeze_gauge:
            a0 = t_start ** (2.0 / 3.0)
            initial = (a0, (2.0 / 3.0) * a0 / t_start)
        else:
            a0 = float(scale_factor_analytic(t_start, params))
            initial = (a0, a0 * float(hubble_analytic(t_start, params)))
            # rho a^3 lambda is exactly 12 omega_m / (1 - omega_m)^2 here
            const = 12.0 * params.omega_m / (1.0 - params.omega_m) ** 2
    a0, ad0 = map(float, initial)
    if not a0 > 0:
        raise DomainError(f"initial a must be > 0, got {a0!r}")

    if const is None:
        const = _initial_constant(t_start, a0, ad0, params, freeze_gauge)

    sol = _solve(params, t_start, (a0, ad0), t_end, tol, freeze_gauge, const)

    if sample_t is None:
        ts = np.linspace(t_start, t_end, max(int(n_samples), 2))
    else:
        ts = np.asarray(sample_t, dtype=float)
        if np.any(ts < t_start) or np.any(ts > t_end):
            raise DomainError("sample_t must lie inside t_span")
    ys = sol.sol(ts)
    samples = tuple(
        _state(t, a, ad, params, const, freeze_gauge)
        for t, a, ad in zip(ts, ys[0], ys[1])
    )
    return BackgroundHistory(params, samples, const, freeze_gauge, _dense=sol.sol)


def integrate_from_present(params: CosmologyParams, t_min: float, t_max: float,
                           tol: float = DEFAULT_TOL,
                           n_samples: int = 200) -> BackgroundHistory:
    """History anchored at ``a(1) = 1, a_dot(1) = H0`` for any (k, cs2).

    Integrates backward to ``t_min`` and forward to ``t_max``.
    """
    _ode.check_tol(tol)
    if not 0 < t_min < t_max:
        raise DomainError(f"need 0 < t_min < t_max, got {t_min!r}, {t_max!r}")
    h0 = present_day_hubble(params)
    y0 = (1.0, h0)
    const = 3.0 * params.omega_m * h0 * h0
    pieces = []
    if t_min < 1.0:
        pieces.append(_solve(params, 1.0, y0, t_min, tol, False, const))
    if t_max > 1.0:
        pieces.append(_solve(params, 1.0, y0, t_max, tol, False, const))

    def dense(t):
        if t <= 1.0 and t_min < 1.0:
            return pieces[0].sol(t)
        return pieces[-1].sol(t)

    ts = np.linspace(t_min, t_max, max(int(n_samples), 2))
    samples = tuple(
        _state(t, *dense(t), params, const, False) for t in ts
    )
    return BackgroundHistory(params, samples, const, False, _dense=dense)


# -- tables ----------------------------------------------------------------


@dataclass(frozen=True)
class ExpansionTable:
    """Columns ``t, tau, a, a_dot_over_a, lambda, rho`` as numpy arrays."""

    params: CosmologyParams
    columns: dict

    def __len__(self) -> int:
        return len(self.columns["t"])

    def rows(self):
        return list(zip(*(self.columns[c] for c in TABLE_COLUMNS)))


def default_start_offset(params: CosmologyParams) -> float:
    return 1e-6 * (1.0 - params.t_in())


def expansion_table(
    params: CosmologyParams,
    n_samples: int,
    spacing: str = "linear-t",
    t_max: float = 1.0,
    eps: float | None = None,
    t_min: float | None = None,
    tol: float = DEFAULT_TOL,
) -> ExpansionTable:
    """Deterministic table over ``[t_in + eps, t_max]``.

    Flat dust uses the closed forms.  Other models are integrated from the
    present-day anchor and need ``t_min`` (their Big Bang is not at
    ``omega_m ** (1/3)``).
    """
    if n_samples < 2:
        raise DomainError(f"n_samples must be >= 2, got {n_samples!r}")
    if spacing not in ("linear-t", "linear-tau"):
        raise DomainError(f"spacing must be 'linear-t' or 'linear-tau', got {spacing!r}")
    tin = params.t_in()
    if t_min is None:
        if not params.is_flat_dust:
            raise DomainError("t_min is required for non-flat or radiative models")
        t_min = tin + (default_start_offset(params) if eps is None else eps)
    if not tin < t_min < t_max:
        raise DomainError(f"need t_in < t_min < t_max, got {t_min!r}, {t_max!r}")

    if spacing == "linear-t":
        ts = np.linspace(t_min, t_max, n_samples)
    else:
        taus = np.linspace(tau_of_t(t_min, params), tau_of_t(t_max, params), n_samples)
        ts = t_of_tau(taus, params)
        ts[0], ts[-1] = t_min, t_max

    if params.is_flat_dust:
        a = scale_factor_analytic(ts, params)
        h = hubble_analytic(ts, params)
        rho = density_from_friedmann(ts, params)
    else:
        hist = integrate_from_present(params, float(ts[0]), float(ts[-1]), tol,
                                      n_samples=2)
        states = [hist.at(float(t)) for t in ts]
        a = np.array([s.a for s in states])
        h = np.array([s.hubble for s in states])
        rho = np.array([s.rho for s in states])

    cols = {
        "t": ts,
        "tau": tau_of_t(ts, params),
        "a": np.asarray(a, dtype=float),
        "a_dot_over_a": np.asarray(h, dtype=float),
        "lambda": lambda_t(ts),
        "rho": np.asarray(rho, dtype=float),
    }
    return ExpansionTable(params, cols)
