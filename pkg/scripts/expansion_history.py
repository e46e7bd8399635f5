"""Scale factor a(tau) for several omega_m, with the frozen-gauge (Einstein-de Sitter) curve.

Prints one column per model on a common grid of tau / tau0 in (0, 1].
"""

import argparse
import sys

import numpy as np

from sivkit import cosmology
from sivkit.gauge import CosmologyParams, t_of_tau
from sivkit.tables import render


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--omegas", type=float, nargs="+", default=[0.0, 0.1, 0.3, 0.5])
    ap.add_argument("--samples", type=int, default=21)
    ap.add_argument("--format", choices=("csv", "table"), default="table")
    args = ap.parse_args(argv)

    x = np.linspace(0.05, 1.0, args.samples)
    cols = [x]
    for om in args.omegas:
        p = CosmologyParams(omega_m=om)
        cols.append(cosmology.scale_factor_analytic(t_of_tau(x * p.tau0, p), p))
    # Classical flat dust with the same present age: a = (tau / tau0)^(2/3)
    edS = cosmology.integrate_background(CosmologyParams(), (x[0], 1.0), tol=1e-12,
                                         sample_t=x, freeze_gauge=True)
    cols.append(edS.a)
    header = ["tau_over_tau0"] + [f"a_omega_{om:g}" for om in args.omegas] + ["a_frozen_gauge"]
    sys.stdout.write(render(header, zip(*cols), args.format))


if __name__ == "__main__":
    main()
