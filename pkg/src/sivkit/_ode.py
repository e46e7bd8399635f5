"""Thin wrapper over scipy's DOP853 with sivkit error semantics."""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from sivkit.errors import DomainError, ToleranceError

TOL_MIN = 1e-14
TOL_MAX = 1e-3


def check_tol(tol: float) -> None:
    if not TOL_MIN <= tol <= TOL_MAX:
        raise DomainError(f"tol must be in [{TOL_MIN:g}, {TOL_MAX:g}], got {tol!r}")


def solve(fun, t_span, y0, tol, atol, events=None, strict=True):
    """Integrate with dense output; raise ToleranceError on controller failure.

    Returns scipy's OdeResult.  ``status == 1`` (terminal event) is passed
    through for the caller to interpret, as is ``status == -1`` when
    ``strict`` is false.
    """
    sol = solve_ivp(
        fun,
        t_span,
        np.asarray(y0, dtype=float),
        method="DOP853",
        rtol=tol,
        atol=atol,
        dense_output=True,
        events=events,
    )
    if strict and sol.status == -1:
        raise ToleranceError(f"integrator failed at t={sol.t[-1]!r}: {sol.message}")
    return sol
