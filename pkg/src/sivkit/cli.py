"""Command-line front end: ``sivkit {gauge,cosmo,orbit,secular}``.

Tables go to stdout (or ``--output``); diagnostics and summaries go to
stderr.  Exit codes: 0 ok, 2 domain error, 3 tolerance failure, 4 collision.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings

import numpy as np

from sivkit import cosmology, dynamics, gauge
from sivkit.errors import SIVError, ToleranceError
from sivkit.presets import orbit_preset, preset_names
from sivkit.tables import render

TIN_TABLE_OMEGAS = (0.0, 0.01, 0.1, 0.3, 0.5)
PSI0_TABLE_OMEGAS = (0.0, 0.05, 0.10, 0.20, 0.30, 1.0 - 1e-9)
GAUGE_CHECK_LIMIT = 1e-12
GYR = 1e9
NUMERIC_VERIFY_OFFSET = 1e-3


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--omega-m", type=float, default=gauge.CosmologyParams.omega_m,
                   help="matter density parameter, 0 <= omega_m < 1")
    g.add_argument("--tau0", type=float, default=None,
                   help="present age; Gyr for gauge/cosmo/secular, preset time "
                        f"units for orbit (default {gauge.DEFAULT_TAU0_GYR} Gyr or preset)")
    g.add_argument("--tol", type=float, default=None,
                   help=f"relative tolerance (default {cosmology.DEFAULT_TOL:g} for "
                        f"cosmo, {dynamics.DEFAULT_TOL:g} for orbit)")
    g.add_argument("--format", choices=("table", "csv"), default="csv")
    g.add_argument("--output", default="-", help="output file, '-' for stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="sivkit", description=__doc__, formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gauge", parents=[common], formatter_class=fmt,
                       help="gauge factor, connection, psi and gauge residuals")
    g.add_argument("--table", choices=("tin", "psi0"), help="print a reference table")
    g.add_argument("--check", action="store_true",
                   help=f"report max relative gauge residuals (fail above {GAUGE_CHECK_LIMIT:g})")
    g.add_argument("--t-min", type=float, default=None, help="grid start (default t_in + 1e-6 (1 - t_in))")
    g.add_argument("--t-max", type=float, default=1.0)
    g.add_argument("--n", type=int, default=11, help="grid points")
    g.add_argument("--lambda-e", type=float, default=gauge.DEFAULT_LAMBDA_E)

    c = sub.add_parser("cosmo", parents=[common], formatter_class=fmt,
                       help="expansion history table")
    c.add_argument("--samples", type=int, default=100)
    c.add_argument("--k", type=int, default=0, choices=(-1, 0, 1))
    c.add_argument("--cs2", type=float, default=0.0)
    c.add_argument("--t-max", type=float, default=1.0)
    c.add_argument("--t-min", type=float, default=None,
                   help="table start; required unless k=0 and cs2=0")
    c.add_argument("--eps", type=float, default=None,
                   help="start offset after t_in (default 1e-6 (1 - t_in))")
    c.add_argument("--spacing", choices=("linear-t", "linear-tau"), default="linear-t")
    c.add_argument("--verify", action="store_true",
                   help="report residuals, oracle deviation and conservation drift")
    c.add_argument("--verify-limit", type=float, default=None,
                   help="exit 3 if any verification figure exceeds this (default 100 * tol)")

    o = sub.add_parser("orbit", parents=[common], formatter_class=fmt,
                       help="integrate a two-body orbit")
    o.add_argument("--preset", choices=preset_names(), default="circular-unit")
    o.add_argument("--newton", action="store_true", help="disable scale-invariant terms")
    o.add_argument("--G", type=float, default=None, help="gravitational constant (preset units)")
    o.add_argument("--M0", type=float, default=None, help="present-day central mass (preset units)")
    o.add_argument("--a", type=float, default=None, help="semi-major axis (preset default)")
    o.add_argument("--e", type=float, default=None, help="eccentricity (preset default)")
    o.add_argument("--periods", type=float, default=None, help="duration in Kepler periods")
    o.add_argument("--tau-start", type=float, default=None, help="start epoch (default tau0)")
    o.add_argument("--samples", type=int, default=1001)
    o.add_argument("--rates", action="store_true",
                   help="print secular rates for the preset instead of integrating")

    s = sub.add_parser("secular", parents=[common], formatter_class=fmt,
                       help="secular drift rates")
    s.add_argument("--tau", type=float, nargs="+", default=None,
                   help="epochs in Gyr (default tau0)")
    return parser


def _params(args, tau0_default=gauge.DEFAULT_TAU0_GYR, **kw) -> gauge.CosmologyParams:
    tau0 = tau0_default if args.tau0 is None else args.tau0
    return gauge.CosmologyParams(omega_m=args.omega_m, tau0=tau0, **kw)


def _emit(args, header, rows) -> None:
    text = render(header, rows, args.format)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _report(pairs) -> None:
    for key, value in pairs:
        v = value if isinstance(value, str) else format(float(value), ".6g")
        sys.stderr.write(f"{key}={v}\n")


# -- gauge -----------------------------------------------------------------


def cmd_gauge(args) -> int:
    if args.table == "tin":
        rows = [(om, gauge.CosmologyParams(omega_m=om).t_in()) for om in TIN_TABLE_OMEGAS]
        _emit(args, ("omega_m", "t_in"), rows)
        return 0
    if args.table == "psi0":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", gauge.NearCriticalDensityWarning)
            rows = [(om, gauge.CosmologyParams(omega_m=om).psi0) for om in PSI0_TABLE_OMEGAS]
        _emit(args, ("omega_m", "psi0"), rows)
        return 0

    params = _params(args, lambda_E=args.lambda_e)
    tin = params.t_in()
    t_min = tin + 1e-6 * (1.0 - tin) if args.t_min is None else args.t_min
    if args.n < 2:
        raise gauge.DomainError("--n must be >= 2")
    ts = np.linspace(t_min, args.t_max, args.n)
    taus = gauge.tau_of_t(ts, params)
    lam = gauge.lambda_t(ts)
    r1, r2 = gauge.gauge_residuals(ts, params)
    rows = zip(ts, taus, lam, gauge.kappa_t(ts), gauge.psi_factor(taus, params), r1, r2)
    _emit(args, ("t", "tau", "lambda", "kappa", "psi", "r1", "r2"), rows)
    if args.check:
        scale = lam * lam * params.lambda_E
        rel1 = float(np.max(np.abs(r1) / scale))
        rel2 = float(np.max(np.abs(r2) / (lam * scale)))
        _report([("max_rel_r1", rel1), ("max_rel_r2", rel2)])
        if max(rel1, rel2) > GAUGE_CHECK_LIMIT:
            raise ToleranceError(f"gauge residuals exceed {GAUGE_CHECK_LIMIT:g}")
    return 0


# -- cosmo -----------------------------------------------------------------


def _residual_scale(state, params):
    h = state.hubble
    return h * h + abs(params.k) / state.a**2 + abs(state.rho) + abs(2.0 * h / state.t)


def _verify_cosmo(params, table, tol):
    ts = table.columns["t"]
    out = []
    # Integrations skip the first 1e-3 after the big bang, where a -> 0 and
    # the expansion rate diverges; the closed form covers the full table.
    t_lo = max(float(ts[0]), params.t_in() + NUMERIC_VERIFY_OFFSET)
    ts_num = ts[ts >= t_lo]
    if params.is_flat_dust:
        worst = 0.0
        for t in ts:
            st = cosmology.analytic_state(float(t), params)
            worst = max(worst, max(abs(r) for r in cosmology.friedmann_residuals(st, params))
                        / _residual_scale(st, params))
        out.append(("max_rel_residual_analytic", worst))
        hist = cosmology.integrate_background(params, (t_lo, float(ts[-1])), tol,
                                              sample_t=ts_num)
        a_ref = cosmology.scale_factor_analytic(ts_num, params)
        dev = np.max(np.abs(hist.a / a_ref - 1.0))
        out.append(("max_rel_deviation_numeric_vs_analytic", dev))
    else:
        hist = cosmology.integrate_from_present(params, t_lo, float(ts[-1]), tol,
                                                n_samples=len(ts_num))
    worst = 0.0
    for st in hist.samples:
        worst = max(worst, max(abs(r) for r in cosmology.friedmann_residuals(st, params))
                    / _residual_scale(st, params))
    out.append(("max_rel_residual_numeric", worst))
    if hist.conservation_constant != 0:
        out.append(("conservation_drift", hist.conservation_drift()))
    return out


def cmd_cosmo(args) -> int:
    params = _params(args, k=args.k, cs2=args.cs2)
    tol = cosmology.DEFAULT_TOL if args.tol is None else args.tol
    table = cosmology.expansion_table(params, args.samples, args.spacing, args.t_max,
                                      eps=args.eps, t_min=args.t_min, tol=tol)
    _emit(args, cosmology.TABLE_COLUMNS, table.rows())
    if args.verify:
        figures = _verify_cosmo(params, table, tol)
        _report(figures)
        limit = 100.0 * tol if args.verify_limit is None else args.verify_limit
        bad = [k for k, v in figures if v > limit]
        if bad:
            raise ToleranceError(f"verification above {limit:g}: {', '.join(bad)}")
    return 0


# -- orbit -----------------------------------------------------------------


def _orbit_rates(args, preset, params, tau) -> int:
    units = preset.units
    a = preset.a if args.a is None else args.a
    rate = dynamics.secular_rates(tau, params).a_dot_over_a
    rows = [
        ("psi", float(gauge.psi_factor(tau, params)), "1"),
        ("a_dot_over_a", rate, f"1/{units.time}"),
        ("a_dot", a * rate, f"{units.length}/{units.time}"),
    ]
    if units.yr_per_time:
        rows.append(("a_dot_over_a_per_yr", rate / units.yr_per_time, "1/yr"))
    if units.cm_per_length and units.yr_per_time:
        rows.append(("a_dot_cm_per_yr", a * rate * units.cm_per_length / units.yr_per_time,
                     "cm/yr"))
    _emit(args, ("quantity", "value", "unit"), rows)
    return 0


def cmd_orbit(args) -> int:
    preset = orbit_preset(args.preset)
    params = _params(args, tau0_default=preset.tau0)
    tau_start = params.tau0 if args.tau_start is None else args.tau_start
    if args.rates:
        return _orbit_rates(args, preset, params, tau_start)

    G = preset.units.G if args.G is None else args.G
    M0 = preset.M0 if args.M0 is None else args.M0
    system = dynamics.GravitySystem(G, M0, params,
                                    siv_enabled=not args.newton, c=preset.units.c)
    a = preset.a if args.a is None else args.a
    e = preset.e if args.e is None else args.e
    periods = preset.periods if args.periods is None else args.periods
    tol = dynamics.DEFAULT_TOL if args.tol is None else args.tol

    init = dynamics.pericenter_state(a, e, tau_start, system)
    T = 2.0 * math.pi * math.sqrt(a**3 / (system.G * dynamics.mass_at(tau_start, system)))
    traj = dynamics.integrate_orbit(init, system, duration=periods * T, tol=tol,
                                    n_samples=args.samples)

    pos, vel = traj.positions, traj.velocities
    r = np.hypot(pos[:, 0], pos[:, 1])
    L = traj.angular_momentum()
    energy = traj.energy()
    rows = zip(traj.tau, pos[:, 0], pos[:, 1], vel[:, 0], vel[:, 1], r,
               np.arctan2(pos[:, 1], pos[:, 0]), L, energy)
    _emit(args, ("tau", "x", "y", "vx", "vy", "r", "phi", "L", "energy"), rows)

    speed = np.hypot(vel[:, 0], vel[:, 1])
    summary = [("L_drift", np.max(np.abs(L / L[0] - 1.0)))]
    if not system.siv_enabled:
        summary.append(("energy_drift", np.max(np.abs(energy / energy[0] - 1.0))))
    if e == 0:
        summary.append(("speed_drift", np.max(np.abs(speed / speed[0] - 1.0))))
        summary.append(("radius_drift", np.max(np.abs(r / r[0] - 1.0))))
        if system.siv_enabled:
            track = r[0] * traj.t_at_elapsed(traj.elapsed) / traj.t_at_elapsed(0.0)
            summary.append(("r_track_deviation", np.max(np.abs(r / track - 1.0))))
        ratios = [m.kepler_ratio for m in dynamics.measure_periods(traj)]
        if ratios:
            summary.append(("kepler_ratio_max_deviation", max(abs(x - 1.0) for x in ratios)))
    else:
        es = dynamics.eccentricity_by_period(traj)
        if len(es) >= 2:
            summary.append(("e_fitted", es[0]))
            summary.append(("e_drift", float(np.ptp(es))))
    _report(summary)
    return 0


# -- secular ---------------------------------------------------------------


def cmd_secular(args) -> int:
    params = _params(args)
    taus = [params.tau0] if args.tau is None else args.tau
    rows = []
    for tau in taus:
        r = dynamics.secular_rates(tau, params)
        per_gyr = (r.a_dot_over_a, r.M_dot_over_M, r.T_dot_over_T, r.psi_dot_over_psi)
        rows.append((tau, float(gauge.psi_factor(tau, params)), *per_gyr,
                     *(x / GYR for x in per_gyr)))
    header = ("tau_gyr", "psi",
              "a_dot_over_a_per_gyr", "M_dot_over_M_per_gyr", "T_dot_over_T_per_gyr",
              "psi_dot_over_psi_per_gyr",
              "a_dot_over_a_per_yr", "M_dot_over_M_per_yr", "T_dot_over_T_per_yr",
              "psi_dot_over_psi_per_yr")
    _emit(args, header, rows)
    return 0


COMMANDS = {"gauge": cmd_gauge, "cosmo": cmd_cosmo, "orbit": cmd_orbit, "secular": cmd_secular}


def _one_line_warning(message, category, filename, lineno, file=None, line=None):
    sys.stderr.write(f"warning: {message}\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    old = warnings.showwarning
    warnings.showwarning = _one_line_warning
    try:
        return COMMANDS[args.command](args)
    except SIVError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    finally:
        warnings.showwarning = old


if __name__ == "__main__":
    sys.exit(main())
