"""Secular Earth-Moon recession rate as a function of omega_m.

Usage: python3 scripts/lunar_recession.py [--omegas 0 0.1 0.2 0.3 0.5]
"""

import argparse
import sys

from sivkit import dynamics
from sivkit.gauge import CosmologyParams
from sivkit.presets import orbit_preset
from sivkit.tables import render


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--omegas", type=float, nargs="+", default=[0.0, 0.1, 0.2, 0.3, 0.5])
    ap.add_argument("--format", choices=("csv", "table"), default="table")
    args = ap.parse_args(argv)

    preset = orbit_preset("earth-moon")
    units = preset.units
    rows = []
    for om in args.omegas:
        p = CosmologyParams(omega_m=om, tau0=preset.tau0)
        rate = dynamics.recession_rate(preset.a, p.tau0, p)
        rows.append((om, p.psi0, rate * units.cm_per_length / units.yr_per_time))
    sys.stdout.write(render(("omega_m", "psi0", "a_dot_cm_per_yr"), rows, args.format))


if __name__ == "__main__":
    main()
