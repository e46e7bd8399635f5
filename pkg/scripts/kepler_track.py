"""Kepler ratio 4 pi^2 r^3 / (G M T^2) along the secular circular track of a 1 au orbit.

Each epoch gets its own short integration starting on the exact expanding
circular orbit; T is measured from successive crossings of phi = 0.
"""

import argparse
import math
import sys

import numpy as np

from sivkit import dynamics
from sivkit.dynamics import GravitySystem
from sivkit.gauge import CosmologyParams
from sivkit.presets import unit_system
from sivkit.tables import render


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--omega-m", type=float, default=0.3)
    ap.add_argument("--tau0", type=float, default=13.8e9, help="present age in years")
    ap.add_argument("--epochs", type=int, default=20)
    ap.add_argument("--format", choices=("csv", "table"), default="table")
    args = ap.parse_args(argv)

    units = unit_system("astro")
    system = GravitySystem(units.G, 1.0, CosmologyParams(omega_m=args.omega_m, tau0=args.tau0),
                           c=units.c)
    rows = []
    for frac in np.linspace(0.05, 1.0, args.epochs):
        tau = frac * system.tau0
        r = float(system.t_at(tau) / system.t_at(system.tau0))
        T = 2 * math.pi * math.sqrt(r**3 / (system.G * dynamics.mass_at(tau, system)))
        init = dynamics.circular_track_state(r, tau, system)
        traj = dynamics.integrate_orbit(init, system, duration=2.2 * T, n_samples=3)
        m = dynamics.measure_periods(traj)[0]
        rows.append((tau / 1e9, m.radius, m.T, m.kepler_ratio - 1.0))
    header = ("tau_gyr", "radius_au", "period_yr", "kepler_ratio_minus_1")
    sys.stdout.write(render(header, rows, args.format))


if __name__ == "__main__":
    main()
