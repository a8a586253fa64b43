"""Closed-hemisphere test for finite direction sets.

A finite set {v_i} lies in some closed hemisphere iff there is a unit xi
with v_i . xi <= 0 for every i.  This is decided by one small LP in the n
coordinates of xi (box-bounded so the optimum value has a scale):

    maximise  sum_i (-v_i . xi)   s.t.  V xi <= 0,  -1 <= xi <= 1.

If the directions span R^n the only xi with V xi <= 0 and zero objective
is xi = 0, so a strictly positive optimum is exactly a witness.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.optimize import linprog

_LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10,
               "dual_feasibility_tolerance": 1e-10}


def open_hemisphere_witness(directions, tol: float = 1e-10) -> Optional[np.ndarray]:
    """Return a unit xi with ``directions @ xi <= 0`` or ``None`` if none exists."""
    v = np.atleast_2d(np.asarray(directions, dtype=float))
    m, n = v.shape
    if m == 0:
        raise ValueError("empty direction set")

    # rank-deficient sets live in a hyperplane: its normal is a witness
    evals, evecs = np.linalg.eigh(v.T @ v)
    if evals[0] <= 1e-20 * evals[-1]:
        xi = evecs[:, 0]
        return xi / np.linalg.norm(xi)

    res = linprog(c=v.sum(axis=0), A_ub=v, b_ub=np.zeros(m),
                  bounds=[(-1.0, 1.0)] * n, method="highs",
                  options=_LP_OPTIONS)
    if res.status != 0:  # pragma: no cover - the LP is always feasible (xi = 0)
        raise RuntimeError(f"hemisphere LP failed: {res.message}")
    if -res.fun <= tol * m:
        return None
    xi = np.asarray(res.x, dtype=float)
    return xi / np.linalg.norm(xi)
