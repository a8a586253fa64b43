"""Numerical solution of the dual Orlicz-Minkowski problem for discrete data.

Given atoms (v_j, mu_j) and a family-A pair, find support numbers h_j with

    mu_j / |mu| = c_j / V_varphi,    c = C_varphi([h], .),

by maximising Phi(h) = -(1/|mu|) sum_j mu_j log h_j on the constraint
surface V_phi([h]) = |mu|.  The unknowns are x = log h.  Each iteration
takes a projected gradient step in x (the constraint gradient is -c, from
the variational formula), backtracks on Phi, and restores the constraint
exactly by dilating the Wulff shape.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .body_kernel import HalfspacePolytope
from .measure_engine import (
    DiscreteSphericalMeasure,
    dual_orlicz_curvature_measure,
    hemisphere_concentration_check,
    radial_samples,
)
from .orlicz_pairs import A_DECREASING, OrliczPair, validate_pair
from .sphere_quadrature import SphericalGrid, build_grid, default_grid, sphere_area

CONVERGED = "converged"
MAX_ITERS = "max_iters"
DEGENERATE = "degenerate_measure"
INVALID_PAIR = "invalid_pair"


class SolverError(RuntimeError):
    pass


@dataclass
class SolverConfig:
    """Solver settings; every field has a default."""

    grid_rule: Optional[str] = None       # None: equal-angle (n=2), Fibonacci (n=3), MC
    resolution: Optional[int] = None      # None: 4096 (n=2), 100000 (n>=3)
    step: float = 0.5                     # initial step in log h
    backtrack: float = 0.5
    armijo: float = 1e-4                  # sufficient-ascent fraction in the line search
    max_halvings: int = 30
    step_growth: float = 2.0              # step multiplier after an accepted step
    max_step: float = 64.0
    tol_res: float = 1e-5
    tol_con: float = 1e-8
    max_iters: int = 5000
    rescale_bracket: Tuple[float, float] = (1e-6, 1e6)
    seed: Optional[int] = None
    init_jitter: float = 0.0              # uniform perturbation of log h0, needs a seed
    t_fd: float = 1e-5

    def __post_init__(self):
        for name in ("step", "tol_res", "tol_con", "t_fd", "max_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.armijo < 1:
            raise ValueError("armijo must lie in [0, 1)")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack must lie in (0, 1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.init_jitter < 0:
            raise ValueError("init_jitter must be nonnegative")
        lo, hi = self.rescale_bracket
        if not 0 < lo < 1 < hi:
            raise ValueError("rescale_bracket must satisfy 0 < lo < 1 < hi")
        self.rescale_bracket = (float(lo), float(hi))

    def make_grid(self, dim: int) -> SphericalGrid:
        if self.grid_rule is None:
            return default_grid(dim, self.resolution, self.seed)
        res = self.resolution or (4096 if dim == 2 else 100_000)
        seed = self.seed if self.seed is not None or self.grid_rule != "monte_carlo" else 0
        return build_grid(dim, self.grid_rule, res, seed)

    @classmethod
    def from_dict(cls, data: dict) -> "SolverConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config field(s): {sorted(unknown)}")
        data = dict(data)
        if "rescale_bracket" in data:
            data["rescale_bracket"] = tuple(data["rescale_bracket"])
        return cls(**data)


@dataclass
class SolveReport:
    body: Optional[HalfspacePolytope]
    tau: float
    residuals: np.ndarray
    phi_trace: List[float]
    vphi_trace: List[float]
    iterations: int
    termination: str
    curvature_masses: Optional[np.ndarray] = None
    vphi: float = float("nan")        # V_phi of the final body (constraint value)
    vvarphi: float = float("nan")     # V_varphi of the final body
    message: str = ""
    witness: Optional[np.ndarray] = None
    grid_rule: str = ""
    grid_resolution: int = 0

    @property
    def converged(self) -> bool:
        return self.termination == CONVERGED

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residuals))) if self.residuals.size else float("nan")

    def to_dict(self) -> dict:
        return {
            "termination": self.termination,
            "iterations": self.iterations,
            "tau": self.tau,
            "max_residual": self.max_residual,
            "residuals": np.asarray(self.residuals).tolist(),
            "curvature_masses": (None if self.curvature_masses is None
                                 else np.asarray(self.curvature_masses).tolist()),
            "vphi": self.vphi,
            "vvarphi": self.vvarphi,
            "phi_trace": list(self.phi_trace),
            "vphi_trace": list(self.vphi_trace),
            "body": None if self.body is None else self.body.to_dict(),
            "witness": None if self.witness is None else np.asarray(self.witness).tolist(),
            "grid": {"rule": self.grid_rule, "resolution": self.grid_resolution},
            "message": self.message,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# --------------------------------------------------------------------------
# elementary pieces
# --------------------------------------------------------------------------

def objective_phi(h, mu: DiscreteSphericalMeasure) -> float:
    """Phi(h) = -(1/|mu|) sum_j mu_j log h_j."""
    h = np.asarray(h, dtype=float)
    if h.shape != (len(mu),):
        raise ValueError(f"expected {len(mu)} support numbers, got shape {h.shape}")
    if not np.all(h > 0):
        raise ValueError("support numbers must be positive")
    return -float(np.dot(mu.masses, np.log(h))) / mu.total


def constraint_directional_derivative(P: HalfspacePolytope, pair: OrliczPair,
                                      grid: SphericalGrid, g) -> float:
    """d/dt V_phi([h e^{t g}]) at t = 0, i.e. -sum_j g_j c_j for family A
    and +sum_j g_j c_j for family B."""
    g = np.asarray(g, dtype=float)
    if g.shape != (P.n_facets,):
        raise ValueError(f"expected {P.n_facets} values (one per facet/atom), got {g.shape}")
    c = dual_orlicz_curvature_measure(P, pair, grid).masses
    return pair.sign * float(np.dot(g, c))


def _solve_scale(values_at: callable, target: float, bracket, what: str) -> float:
    """log-scale s with values_at(s) = target for a monotone values_at."""
    lo, hi = math.log(bracket[0]), math.log(bracket[1])
    f = lambda s: values_at(s) - target
    f_lo, f_hi = f(lo), f(hi)
    cap = 0.9 * math.log(np.finfo(float).max)   # keep exp(s) finite
    for _ in range(10):
        if f_lo * f_hi < 0:
            break
        lo, hi = max(3 * lo, -cap), min(3 * hi, cap)
        with np.errstate(over="ignore"):
            f_lo, f_hi = f(lo), f(hi)
    else:
        raise SolverError(f"could not bracket the {what}; the pair violates its limit "
                          "conditions on this range")
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def rescale_to_constraint(P: HalfspacePolytope, pair: OrliczPair, grid: SphericalGrid,
                          target: float, tol_con: float = 1e-8,
                          bracket=(1e-6, 1e6)) -> Tuple[float, HalfspacePolytope]:
    """Unique lambda with V_phi(lambda P) = target (phi strictly monotone)."""
    if not target > 0:
        raise ValueError("target must be positive")
    smp = radial_samples(grid, P)
    rho = smp.rho[0]
    w = smp.weights / P.dim
    s = _solve_scale(lambda s: float(np.dot(w, pair.phi(math.exp(s) * rho))),
                     target, bracket, "constraint scale")
    lam = math.exp(s)
    body = HalfspacePolytope._trusted(P.normals, P.offsets * lam)
    got = float(np.dot(w, pair.phi(lam * rho)))
    if abs(got - target) > tol_con * target:
        raise SolverError(f"rescale reached {got!r}, target {target!r}")
    return lam, body


def stationarity_residual(mu: DiscreteSphericalMeasure, P: HalfspacePolytope,
                          pair: OrliczPair, grid: SphericalGrid) -> Tuple[float, np.ndarray]:
    """tau = |mu| / V_varphi(P) and r_j = mu_j/|mu| - c_j/V_varphi(P)."""
    if P.n_facets != len(mu) or not np.allclose(P.normals, mu.directions, atol=1e-12):
        raise ValueError("body facets must correspond one-to-one with the atoms")
    c = dual_orlicz_curvature_measure(P, pair, grid).masses
    v = float(c.sum())
    return mu.total / v, mu.masses / mu.total - c / v


def ball_radius_for(pair: OrliczPair, dim: int, target: float, bracket=(1e-6, 1e6)) -> float:
    """r0 with V_phi(r0 B) = phi(r0) |S^{n-1}| / n = target."""
    area = sphere_area(dim) / dim
    s = _solve_scale(lambda s: area * float(pair.phi(math.exp(s))), target, bracket,
                     "initial ball radius")
    return math.exp(s)


# --------------------------------------------------------------------------
# the solver
# --------------------------------------------------------------------------

class _WulffFamily:
    """Wulff shapes on fixed atom directions, evaluated on one grid."""

    def __init__(self, mu, pair, grid):
        self.normals = np.asarray(mu.directions)
        self.mu = mu
        self.pair = pair
        self.grid = grid
        self.m = len(mu)

    def state(self, x: np.ndarray, target: float, tol_con: float, bracket) -> dict:
        """Rescale log-support numbers onto the constraint, then evaluate."""
        body = HalfspacePolytope._trusted(self.normals, np.exp(x))
        smp = radial_samples(self.grid, body)
        rho, idx = smp.rho[0], smp.facet[0]
        w = smp.weights / self.mu.dim
        s = _solve_scale(lambda s: float(np.dot(w, self.pair.phi(math.exp(s) * rho))),
                         target, bracket, "constraint scale")
        x = x + s
        rho = rho * math.exp(s)
        vphi = float(np.dot(w, self.pair.phi(rho)))
        c = np.bincount(idx, weights=w * self.pair.varphi(rho), minlength=self.m)
        return {"x": x, "c": c, "vvarphi": float(c.sum()), "vphi": vphi,
                "Phi": -float(np.dot(self.mu.masses, x)) / self.mu.total}


def solve_dual_orlicz_minkowski(mu: DiscreteSphericalMeasure, pair: OrliczPair,
                                config: Optional[SolverConfig] = None,
                                grid: Optional[SphericalGrid] = None) -> SolveReport:
    """Find a polytope with normalised curvature measure mu / |mu|.

    Returns a :class:`SolveReport`; bad inputs are reported through its
    ``termination`` field (``degenerate_measure`` / ``invalid_pair``) rather
    than raised.
    """
    cfg = config or SolverConfig()
    empty = np.zeros(0)

    def failed(termination, message, witness=None):
        return SolveReport(body=None, tau=float("nan"), residuals=empty, phi_trace=[],
                           vphi_trace=[], iterations=0, termination=termination,
                           message=message, witness=witness)

    validation = validate_pair(pair)
    if pair.family != A_DECREASING or not validation.passed:
        return failed(INVALID_PAIR, "solver needs a fully valid family-A pair; "
                      + validation.summary())
    check = hemisphere_concentration_check(mu)
    if not check.passed:
        xi = check.witness
        return failed(DEGENERATE, "measure is concentrated on the closed hemisphere "
                      f"{{u : u . xi <= 0}}, xi = {np.round(xi, 12).tolist()}", witness=xi)

    if grid is None:
        grid = cfg.make_grid(mu.dim)
    if grid.dim != mu.dim:
        raise ValueError("grid and measure dimensions differ")
    family = _WulffFamily(mu, pair, grid)
    target = mu.total
    weights = mu.masses / target
    bracket = cfg.rescale_bracket

    x = np.full(len(mu), math.log(ball_radius_for(pair, mu.dim, target, bracket)))
    if cfg.init_jitter > 0:
        if cfg.seed is None:
            raise ValueError("init_jitter needs a seed")
        rng = np.random.default_rng(cfg.seed)
        x = x + rng.uniform(-cfg.init_jitter, cfg.init_jitter, size=x.shape)

    st = family.state(x, target, cfg.tol_con, bracket)
    phi_trace, vphi_trace = [st["Phi"]], [st["vphi"]]
    best = st
    alpha = cfg.step
    termination, message = MAX_ITERS, ""
    it = 0

    def residual(s):
        return weights - s["c"] / s["vvarphi"]

    def worst(s):
        return float(np.max(np.abs(residual(s))))

    for it in range(1, cfg.max_iters + 1):
        if worst(st) <= cfg.tol_res:
            it -= 1
            termination = CONVERGED
            break
        grad_phi = -weights
        grad_con = pair.sign * st["c"]
        d = grad_phi - (grad_phi @ grad_con) / (grad_con @ grad_con) * grad_con
        # Phi is concave-like along the surface: ask for a fixed fraction of
        # the linear ascent so that steps cannot bounce across the optimum
        slope = float(d @ d)

        accepted = None
        for _ in range(cfg.max_halvings + 1):
            trial = family.state(st["x"] + alpha * d, target, cfg.tol_con, bracket)
            if trial["Phi"] >= st["Phi"] + cfg.armijo * alpha * slope - 1e-12:
                accepted = trial
                break
            alpha *= cfg.backtrack
        if accepted is None:
            message = "line search stalled: no ascent step along the projected gradient"
            break
        st = accepted
        alpha = min(alpha * cfg.step_growth, cfg.max_step)
        phi_trace.append(st["Phi"])
        vphi_trace.append(st["vphi"])
        if worst(st) < worst(best):
            best = st
    else:
        if worst(st) <= cfg.tol_res:
            termination = CONVERGED

    final = st if termination == CONVERGED else best
    if termination != CONVERGED and not message:
        message = f"iteration limit reached; best max residual {worst(final):.3e}"
    body = HalfspacePolytope._trusted(mu.directions, np.exp(final["x"]))
    return SolveReport(
        body=body,
        tau=target / final["vvarphi"],
        residuals=residual(final),
        phi_trace=phi_trace,
        vphi_trace=vphi_trace,
        iterations=it,
        termination=termination,
        curvature_masses=final["c"],
        vphi=final["vphi"],
        vvarphi=final["vvarphi"],
        message=message,
        grid_rule=grid.rule,
        grid_resolution=grid.resolution,
    )
