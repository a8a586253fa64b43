"""Orlicz function pairs and the linear Orlicz radial addition.

A pair is the triple (phi, phi', varphi) of vectorised callables on (0, inf):

* family ``A_decreasing``: phi strictly decreasing, phi' < 0,
  varphi(t) = -phi'(t) t, phi(0+) = inf, phi(inf) = 0;
* family ``B_increasing``: phi strictly increasing, phi' > 0,
  varphi(t) = phi'(t) t, phi(0+) = 0, phi(inf) = inf.

``phi`` weights the quermassintegral, ``varphi`` the curvature measure.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

A_DECREASING = "A_decreasing"
B_INCREASING = "B_increasing"
FAMILIES = (A_DECREASING, B_INCREASING)

DEFAULT_PROBE = np.logspace(-3, 3, 61)
RELATION_RTOL = 1e-10

Func = Callable[[np.ndarray], np.ndarray]


class PairError(ValueError):
    """Invalid pair definition or pair specification string."""


class RadialAdditionError(RuntimeError):
    """The defining equation could not be bracketed at some node."""


@dataclass(frozen=True)
class OrliczPair:
    family: str
    phi: Func
    phi_prime: Func
    varphi: Func
    label: str = "custom"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise PairError(f"family must be one of {FAMILIES}, got {self.family!r}")

    @property
    def sign(self) -> int:
        """Sign of d/dt V_phi([h e^{tg}]) relative to int g dC_varphi."""
        return -1 if self.family == A_DECREASING else 1


def make_power_pair(q: float) -> OrliczPair:
    """Power pair with varphi(t) = t^q.

    ``q < 0`` gives family A with phi(t) = -t^q/q; ``q > 0`` gives family B
    with phi(t) = t^q/q.  ``q = 0`` (the logarithmic case) is rejected.
    """
    q = float(q)
    if q == 0.0 or not np.isfinite(q):
        raise PairError("power pair requires a finite nonzero exponent")
    family = A_DECREASING if q < 0 else B_INCREASING

    def phi(t):
        return np.abs(np.power(np.asarray(t, dtype=float), q) / q)

    def phi_prime(t):
        # d/dt |t^q / q| = sign(q) t^(q-1)
        return np.sign(q) * np.power(np.asarray(t, dtype=float), q - 1.0)

    def varphi(t):
        return np.power(np.asarray(t, dtype=float), q)

    label = f"power:{q:g}"
    return OrliczPair(family, phi, phi_prime, varphi, label)


@dataclass
class ValidationReport:
    """Probe-based check of conditions A1)-A3) / B1)-B3).

    ``checks`` maps condition name to pass/fail.  The ``limits`` check is a
    heuristic for phi(0+) and phi(inf); failing it alone is a warning
    (see :attr:`core_passed`), except for the solver which needs it.
    """

    family: str
    checks: Dict[str, bool] = field(default_factory=dict)
    max_relation_mismatch: float = float("nan")
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def core_passed(self) -> bool:
        return all(v for k, v in self.checks.items() if k != "limits")

    @property
    def warnings(self) -> List[str]:
        if self.core_passed and not self.checks.get("limits", True):
            return ["limit heuristic failed: phi(0+)/phi(inf) do not match the family"]
        return []

    def summary(self) -> str:
        parts = [f"{k}={'pass' if v else 'FAIL'}" for k, v in self.checks.items()]
        return f"{self.family}: " + ", ".join(parts)


def validate_pair(pair: OrliczPair, probe=None) -> ValidationReport:
    """Check the pair's internal consistency on a sorted positive probe set.

    Non-finite values are reported as failures, never raised.
    """
    t = np.asarray(DEFAULT_PROBE if probe is None else probe, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise PairError("probe must be a nonempty 1-D sequence")
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise PairError("probe must be strictly positive and strictly increasing")

    decreasing = pair.family == A_DECREASING
    report = ValidationReport(family=pair.family)
    with np.errstate(all="ignore"):
        phi = np.asarray(pair.phi(t), dtype=float)
        dphi = np.asarray(pair.phi_prime(t), dtype=float)
        vphi = np.asarray(pair.varphi(t), dtype=float)

        finite = bool(np.all(np.isfinite(phi)) and np.all(np.isfinite(dphi))
                      and np.all(np.isfinite(vphi)))
        report.checks["finite"] = finite
        if not finite:
            report.notes.append("non-finite function values on the probe set")

        report.checks["positive"] = bool(np.all(phi > 0) and np.all(vphi > 0))

        steps = np.diff(phi)
        report.checks["monotone"] = bool(
            np.all(steps < 0) if decreasing else np.all(steps > 0))
        report.checks["derivative_sign"] = bool(
            np.all(dphi < 0) if decreasing else np.all(dphi > 0))

        implied = -dphi * t if decreasing else dphi * t
        mismatch = np.abs(vphi - implied) / np.abs(vphi)
        report.max_relation_mismatch = float(np.max(mismatch)) if finite else float("inf")
        report.checks["relation"] = bool(finite and report.max_relation_mismatch <= RELATION_RTOL)

        report.checks["limits"] = _limit_heuristic(pair.phi, t[0], t[-1], decreasing)
    return report


def _limit_heuristic(phi: Func, t_min: float, t_max: float, decreasing: bool) -> bool:
    # phi must keep moving by a factor >= 2 when the probe is pushed 12
    # decades further out: it blows up (or vanishes) at the right ends.
    lo, hi = t_min * 1e-12, t_max * 1e12
    vals = np.asarray(phi(np.array([lo, t_min, t_max, hi])), dtype=float)
    if not np.all(np.isfinite(vals[1:3])):
        return False
    p_lo, p_min, p_max, p_hi = vals
    if decreasing:
        ok_zero = (not np.isfinite(p_lo) and p_lo > 0) or p_lo >= 2.0 * p_min
        ok_inf = np.isfinite(p_hi) and 0 <= p_hi <= 0.5 * p_max
    else:
        ok_zero = np.isfinite(p_lo) and 0 <= p_lo <= 0.5 * p_min
        ok_inf = (not np.isfinite(p_hi) and p_hi > 0) or p_hi >= 2.0 * p_max
    return bool(ok_zero and ok_inf)


# --------------------------------------------------------------------------
# sampled (table) pairs
# --------------------------------------------------------------------------

def table_pair(t, phi_values, phi_prime_values, label: str = "table") -> OrliczPair:
    """Pair from samples (t, phi, phi') with linear interpolation inside the
    table and power-law tails outside it.

    The family is read off the direction of ``phi``; varphi is derived from
    the interpolated phi' through the A/B relation.
    """
    t = np.asarray(t, dtype=float)
    p = np.asarray(phi_values, dtype=float)
    dp = np.asarray(phi_prime_values, dtype=float)
    if t.ndim != 1 or t.size < 2 or p.shape != t.shape or dp.shape != t.shape:
        raise PairError("table needs >= 2 rows of (t, phi, phi_prime)")
    order = np.argsort(t)
    t, p, dp = t[order], p[order], dp[order]
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise PairError("table abscissae must be positive and distinct")
    if np.any(p <= 0):
        raise PairError("table phi values must be positive")
    steps = np.diff(p)
    if np.all(steps < 0):
        family = A_DECREASING
    elif np.all(steps > 0):
        family = B_INCREASING
    else:
        raise PairError("table phi values must be strictly monotone")

    # log-log slopes of the tails, consistent with the end derivatives
    s_lo = dp[0] * t[0] / p[0]
    s_hi = dp[-1] * t[-1] / p[-1]

    def _eval(x):
        x = np.asarray(x, dtype=float)
        val = np.interp(x, t, p)
        der = np.interp(x, t, dp)
        below, above = x < t[0], x > t[-1]
        if np.any(below):
            val = np.where(below, p[0] * np.power(x / t[0], s_lo), val)
            der = np.where(below, s_lo * val / x, der)
        if np.any(above):
            val = np.where(above, p[-1] * np.power(x / t[-1], s_hi), val)
            der = np.where(above, s_hi * val / x, der)
        return val, der

    sgn = -1.0 if family == A_DECREASING else 1.0
    return OrliczPair(
        family=family,
        phi=lambda x: _eval(x)[0],
        phi_prime=lambda x: _eval(x)[1],
        varphi=lambda x: sgn * _eval(x)[1] * np.asarray(x, dtype=float),
        label=label,
    )


def load_table_pair(path) -> OrliczPair:
    """Read a CSV of rows ``t, phi, phi_prime`` (a header row is allowed)."""
    path = Path(path)
    rows = []
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append([float(x) for x in row[:3]])
            except ValueError:
                if lineno == 1:
                    continue  # header
                raise PairError(f"{path}:{lineno}: expected three numbers, got {row}")
    if not rows:
        raise PairError(f"{path}: no data rows")
    arr = np.asarray(rows)
    return table_pair(arr[:, 0], arr[:, 1], arr[:, 2], label=f"table:{path}")


def parse_pair_spec(spec: str) -> OrliczPair:
    """``power:<q>`` or ``table:<path>``."""
    kind, _, arg = spec.partition(":")
    if kind == "power":
        try:
            q = float(arg)
        except ValueError:
            raise PairError(f"bad exponent in pair spec {spec!r}") from None
        return make_power_pair(q)
    if kind == "table":
        if not arg:
            raise PairError("table pair spec needs a path")
        return load_table_pair(arg)
    raise PairError(f"unknown pair spec {spec!r} (expected power:<q> or table:<path>)")


def parse_function_spec(spec: str) -> Func:
    """Positive scalar function for mixed volumes: ``power:<q>`` is t^q."""
    kind, _, arg = spec.partition(":")
    if kind == "power":
        try:
            q = float(arg)
        except ValueError:
            raise PairError(f"bad exponent in function spec {spec!r}") from None
        return lambda t: np.power(np.asarray(t, dtype=float), q)
    if kind == "table":
        return load_table_pair(arg).phi
    raise PairError(f"unknown function spec {spec!r}")


# --------------------------------------------------------------------------
# linear Orlicz radial addition
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialAdditionSpec:
    """Two functions monotone in the same sense and a positive epsilon."""

    phi1: Func
    phi2: Func
    epsilon: float

    def __post_init__(self):
        if not (self.epsilon > 0 and np.isfinite(self.epsilon)):
            raise PairError("epsilon must be positive and finite")
        d1, d2 = _direction(self.phi1), _direction(self.phi2)
        if d1 == 0 or d2 == 0 or d1 != d2:
            raise PairError("phi1 and phi2 must be strictly monotone in the same sense")

    @property
    def increasing(self) -> bool:
        return _direction(self.phi1) > 0


def _direction(f: Func) -> int:
    vals = np.asarray(f(np.logspace(-3, 3, 13)), dtype=float)
    steps = np.diff(vals)
    if np.all(steps > 0):
        return 1
    if np.all(steps < 0):
        return -1
    return 0


def radial_addition(rho_k, rho_l, spec: RadialAdditionSpec,
                    rtol: float = 1e-15, max_expansions: int = 10) -> np.ndarray:
    """Per-node root rho of  phi1(rho_K/rho) + eps phi2(rho_L/rho) = 1.

    Bisection in log(rho) on the bracket [min*1e-6, max*1e6], widened by a
    factor 1e3 on each side up to ``max_expansions`` times.  Bisection stops
    once every bracket is narrower than ``rtol`` (relative) or can no longer
    be split in floating point.
    """
    rk = np.asarray(rho_k, dtype=float)
    rl = np.asarray(rho_l, dtype=float)
    if rk.shape != rl.shape:
        raise PairError("radial samples must have the same shape")
    if np.any(~(rk > 0)) or np.any(~(rl > 0)):
        raise PairError("radial samples must be strictly positive")

    # F is decreasing in rho for increasing phi_i, increasing otherwise
    sgn = 1.0 if spec.increasing else -1.0

    def F(rho):
        with np.errstate(all="ignore"):
            return sgn * (spec.phi1(rk / rho) + spec.epsilon * spec.phi2(rl / rho) - 1.0)

    lo = np.minimum(rk, rl) * 1e-6
    hi = np.maximum(rk, rl) * 1e6
    for _ in range(max_expansions + 1):
        bad_lo = ~(F(lo) > 0)
        bad_hi = ~(F(hi) < 0)
        if not (bad_lo.any() or bad_hi.any()):
            break
        lo = np.where(bad_lo, lo * 1e-3, lo)
        hi = np.where(bad_hi, hi * 1e3, hi)
    else:
        bad = np.flatnonzero(~(F(lo) > 0) | ~(F(hi) < 0))
        raise RadialAdditionError(
            f"could not bracket the root at node {int(bad[0])} "
            f"({bad.size} node(s) failed); check monotonicity/limits of phi1, phi2")

    log_lo, log_hi = np.log(lo), np.log(hi)
    tol = np.log1p(rtol)
    for _ in range(400):
        if np.all(log_hi - log_lo <= tol):
            break
        mid = 0.5 * (log_lo + log_hi)
        if np.array_equal(mid, log_lo) or np.array_equal(mid, log_hi):
            break  # float resolution reached everywhere
        pos = F(np.exp(mid)) > 0
        log_lo = np.where(pos, mid, log_lo)
        log_hi = np.where(pos, log_hi, mid)
    return np.exp(0.5 * (log_lo + log_hi))


def addition_residual(rho, rho_k, rho_l, spec: RadialAdditionSpec) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    return (spec.phi1(np.asarray(rho_k) / rho)
            + spec.epsilon * spec.phi2(np.asarray(rho_l) / rho) - 1.0)
