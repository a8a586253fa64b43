"""Identity suite behind ``orlimink verify``.

Each check computes one identity two ways, or against a closed form, and
records the worst deviation next to its tolerance.  ``run_suite`` returns
the list of :class:`Check` rows; the process exit code is derived from
``all(c.passed for c in checks)``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np
from scipy.spatial import ConvexHull

from .body_kernel import (
    HalfspacePolytope,
    InvalidBodyError,
    RadialSampleBody,
    convex_hull_of_radial,
    dilate,
    facet_areas,
    hypercube,
    nonredundant_mask,
    polar,
    radial_distance,
    radial_function,
    radial_gauss_assignment,
    support_function,
    vertices,
    volume,
    wulff_shape,
)
from .measure_engine import (
    cone_volume_measure,
    dual_orlicz_curvature_measure,
    dual_orlicz_mixed_volume,
    dual_orlicz_quermassintegral,
    surface_area_measure,
)
from .minkowski_solver import constraint_directional_derivative
from .orlicz_pairs import make_power_pair
from .sphere_quadrature import build_grid

LEVELS = {
    # (2-D resolution, 3-D resolution, bodies per dimension)
    "quick": (1024, 20_000, 5),
    "full": (4096, 100_000, 10),
}


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    seconds: float = 0.0
    detail: str = ""

    def row(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name:<34s} {self.value:11.3e}  tol {self.tol:.1e}  {self.seconds:6.2f}s  {self.detail}"


# --------------------------------------------------------------------------
# corpus
# --------------------------------------------------------------------------

def random_polytope(rng: np.random.Generator, dim: int, n_facets: int,
                    offset_range=(0.5, 2.0)) -> HalfspacePolytope:
    """Random unit normals and uniform offsets; redraws hemisphere cases."""
    for _ in range(100):
        normals = rng.standard_normal((n_facets, dim))
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        offsets = rng.uniform(*offset_range, size=n_facets)
        try:
            return HalfspacePolytope(normals, offsets)
        except InvalidBodyError:
            continue
    raise RuntimeError("could not draw a bounded polytope")


def corpus(seed: int, count: int, dims=(2, 3), facets=(6, 40)) -> List[HalfspacePolytope]:
    """``count`` random polytopes per dimension, facet counts in ``facets``."""
    rng = np.random.default_rng(seed)
    out = []
    for dim in dims:
        for _ in range(count):
            out.append(random_polytope(rng, dim, int(rng.integers(facets[0], facets[1] + 1))))
    return out


def polar_from_vertices(P: HalfspacePolytope) -> HalfspacePolytope:
    """P* = {y : y . x <= 1 for every vertex x of P}.

    Independent of :func:`polar`, which takes the hull of v_i / h_i.
    """
    verts = vertices(P)
    r = np.linalg.norm(verts, axis=1)
    return HalfspacePolytope._trusted(verts / r[:, None], 1.0 / r)


def hull_of_points(points: np.ndarray) -> HalfspacePolytope:
    """Halfspace form of conv(points) read straight off qhull's facets."""
    eq = ConvexHull(points).equations
    return HalfspacePolytope._trusted(eq[:, :-1], -eq[:, -1])


def _grid_for(dim: int, level: str):
    res2, res3, _ = LEVELS[level]
    if dim == 2:
        return build_grid(2, "equal_angle_2d", res2)
    return build_grid(3, "fibonacci_3d", res3)


def _timed(fn: Callable[[], Check]) -> Check:
    t0 = time.perf_counter()
    check = fn()
    check.seconds = time.perf_counter() - t0
    return check


# --------------------------------------------------------------------------
# body_kernel identities
# --------------------------------------------------------------------------

def check_duality(level: str, seed: int = 0) -> Check:
    """rho_{P*} h_P = 1 at every node, P* from the hull of v_i / h_i."""
    worst = 0.0
    bodies = corpus(seed, LEVELS[level][2])
    for P in bodies:
        grid = _grid_for(P.dim, "quick")
        rho_star = radial_function(polar(P), grid.nodes)[0]
        h = support_function(P, grid.nodes)
        worst = max(worst, float(np.max(np.abs(rho_star * h - 1.0))))
    return Check("duality rho_P* h_P = 1", worst, 1e-9, worst <= 1e-9,
                 detail=f"{len(bodies)} bodies")


def check_bipolar(level: str, seed: int = 0) -> Check:
    worst = 0.0
    bodies = corpus(seed, LEVELS[level][2])
    for P in bodies:
        grid = _grid_for(P.dim, "quick")
        worst = max(worst, radial_distance(polar(polar(P)), P, grid))
    return Check("bipolar P** = P", worst, 1e-9, worst <= 1e-9,
                 detail=f"{len(bodies)} bodies")


def check_wulff_hull(level: str, seed: int = 1) -> Check:
    """[f]* = <1/f>: polar via the vertices of [f] against the hull of u / f(u)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for dim in (2, 3):
        grid = _grid_for(dim, "quick")
        for _ in range(5):
            dirs = rng.standard_normal((64, dim))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            f = rng.uniform(0.5, 2.0, 64)
            lhs = polar_from_vertices(wulff_shape(dim, dirs, f))
            rhs = hull_of_points(dirs / f[:, None])
            worst = max(worst, radial_distance(lhs, rhs, grid))
            # the library route must agree with the oracle route too
            lib = convex_hull_of_radial(RadialSampleBody(dirs, 1.0 / f))
            worst = max(worst, radial_distance(lib, rhs, grid))
    return Check("Wulff/hull [f]* = <1/f>", worst, 1e-9, worst <= 1e-9, detail="10 samples")


def check_support_bound(level: str, seed: int = 2) -> Check:
    """h_[f](v_i) <= f_i, with equality exactly on the kept directions."""
    rng = np.random.default_rng(seed)
    worst, mismatched = 0.0, 0
    for dim in (2, 3):
        for _ in range(5):
            dirs = rng.standard_normal((40, dim))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            f = rng.uniform(0.5, 2.0, 40)
            body = wulff_shape(dim, dirs, f, prune=False)
            h = support_function(body, dirs)
            worst = max(worst, float(np.max(h - f)))
            tight = np.abs(h - f) <= 1e-9 * f
            mismatched += int(np.sum(tight != nonredundant_mask(dirs, f)))
    ok = worst <= 1e-9 and mismatched == 0
    return Check("support bound h_[f] <= f", max(worst, 0.0), 1e-9, ok,
                 detail=f"{mismatched} tight/kept mismatches")


def check_assignment_partition(level: str, seed: int = 3) -> Check:
    """Class sums of a node function add up to its full-grid sum."""
    worst = 0.0
    for P in corpus(seed, 3):
        grid = _grid_for(P.dim, level)
        idx = radial_gauss_assignment(P, grid)
        vals = grid.nodes[:, 0] ** 2 + 1.0
        classes = np.bincount(idx, weights=vals, minlength=P.n_facets)
        worst = max(worst, abs(float(classes.sum()) - float(vals.sum())) / float(vals.sum()))
    return Check("assignment partition", worst, 1e-12, worst <= 1e-12)


# --------------------------------------------------------------------------
# measure_engine identities
# --------------------------------------------------------------------------

def check_cone_volume(level: str) -> Check:
    """phi = t^n masses of the square / cube against exact cone volumes."""
    res2, res3, _ = LEVELS[level]
    tol2, tol3 = (1e-3, 1e-2) if level == "full" else (4e-3, 3e-2)
    sq = cone_volume_measure(hypercube(2), build_grid(2, "equal_angle_2d", res2))
    cu = cone_volume_measure(hypercube(3), build_grid(3, "fibonacci_3d", res3))
    e2 = max(float(np.max(np.abs(sq.masses - 1.0))), abs(sq.total - 4.0))
    e3 = max(float(np.max(np.abs(cu.masses - 4.0 / 3.0))), abs(cu.total - 8.0))
    ok = e2 <= tol2 and e3 <= tol3
    return Check("cone-volume oracle", max(e2 / tol2, e3 / tol3), 1.0, ok,
                 detail=f"square {e2:.1e} (tol {tol2:g}), cube {e3:.1e} (tol {tol3:g})")


def check_total_equals_quermass(level: str, seed: int = 4) -> Check:
    worst = 0.0
    for q in (-1.0, -2.0, 2.0):
        pair = make_power_pair(q)
        for P in corpus(seed, 2):
            grid = _grid_for(P.dim, level)
            cm = dual_orlicz_curvature_measure(P, pair, grid)
            direct = dual_orlicz_quermassintegral(P, pair.varphi, grid)
            worst = max(worst, abs(cm.total - direct) / direct)
    return Check("C_varphi total = V_varphi", worst, 1e-12, worst <= 1e-12)


def check_absolute_continuity(level: str) -> Check:
    """A redundant halfspace appended without pruning gets zero mass."""
    worst = 0.0
    for dim in (2, 3):
        P = hypercube(dim)
        extra = np.ones(dim) / math.sqrt(dim)
        Q = HalfspacePolytope(np.vstack((P.normals, extra)),
                              np.append(P.offsets, 2.0 * math.sqrt(dim)))
        cm = dual_orlicz_curvature_measure(Q, make_power_pair(-1.0), _grid_for(dim, level))
        worst = max(worst, float(cm.masses[-1]))
    return Check("redundant facet has zero mass", worst, 0.0, worst == 0.0)


def check_additivity(level: str, seed: int = 10) -> Check:
    """Masses summed over a random facet grouping add up to the total."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for P in corpus(seed, 2):
        cm = dual_orlicz_curvature_measure(P, make_power_pair(-1.0), _grid_for(P.dim, level))
        groups = rng.integers(0, 3, P.n_facets)
        grouped = np.bincount(groups, weights=cm.masses, minlength=3)
        worst = max(worst, abs(float(grouped.sum()) - cm.total) / cm.total)
    return Check("additivity over facet groups", worst, 1e-12, worst <= 1e-12)


def check_weak_continuity(level: str) -> Check:
    """Cube with offsets perturbed by delta: masses approach the cube's."""
    grid = _grid_for(3, level)
    pair = make_power_pair(-1.0)
    cube = hypercube(3)
    base = dual_orlicz_curvature_measure(cube, pair, grid).masses
    pattern = np.array([1.0, -0.5, 0.8, -1.0, 0.3, 0.6])
    devs = []
    for delta in (1e-2, 1e-3, 1e-4):
        P = cube.with_offsets(cube.offsets + delta * pattern)
        devs.append(float(np.max(np.abs(dual_orlicz_curvature_measure(P, pair, grid).masses - base))))
    ok = devs[0] > devs[1] > devs[2]
    return Check("weak continuity (cube + delta)", devs[-1], devs[0], ok,
                 detail="max deviation " + ", ".join(f"{d:.1e}" for d in devs))


def check_uniqueness_data(level: str) -> Check:
    """Square against 1.1 x square, varphi = 1/t: some facet mass moves."""
    grid = _grid_for(2, level)
    pair = make_power_pair(-1.0)
    a = dual_orlicz_curvature_measure(hypercube(2), pair, grid).masses
    b = dual_orlicz_curvature_measure(hypercube(2, 1.1), pair, grid).masses
    gap = float(np.max(np.abs(a - b)))
    return Check("distinct bodies, distinct masses", gap, 1e-4, gap > 1e-4,
                 detail="needs gap > 10 x 1e-5")


def check_surface_area(level: str, seed: int = 5) -> Check:
    """Cone-volume inversion against exact hull facet areas (relative)."""
    worst = 0.0
    # enough facets that the bodies are not needle-like
    for P in corpus(seed, 3, facets=(16, 30)):
        grid = _grid_for(P.dim, level)
        exact = facet_areas(P)
        est = surface_area_measure(P, grid)
        worst = max(worst, float(np.max(np.abs(est - exact))) / float(exact.sum()))
    tol = 1e-2 if level == "full" else 3e-2
    return Check("surface area vs exact facets", worst, tol, worst <= tol)


def check_mixed_volume(level: str, seed: int = 6) -> Check:
    """K = L gives psi(1) V(K) exactly; psi(t) = t^n gives V(L) to quadrature."""
    same_err, vol_err = 0.0, 0.0
    bodies = corpus(seed, 2, facets=(16, 30))
    for K, L in zip(bodies[::2], bodies[1::2]):
        grid = _grid_for(K.dim, level)
        n = K.dim
        vl = dual_orlicz_mixed_volume(K, L, lambda t: t ** n, grid)
        vol_err = max(vol_err, abs(vl - volume(L)) / volume(L))
        same = dual_orlicz_mixed_volume(K, K, lambda t: 3.0 + 0.0 * t, grid)
        vk = dual_orlicz_quermassintegral(K, lambda t: t ** n, grid)
        same_err = max(same_err, abs(same - 3.0 * vk) / vk)
    tol = 1e-3 if level == "full" else 5e-3
    ok = same_err <= 1e-12 and vol_err <= tol
    return Check("mixed volume identities", vol_err, tol, ok,
                 detail=f"K=L identity {same_err:.1e} (tol 1e-12)")


def check_volume_quadrature(level: str, seed: int = 7) -> Check:
    """(1/n) int rho^n against the exact hull volume."""
    worst = 0.0
    for P in corpus(seed, 3):
        grid = _grid_for(P.dim, level)
        est = dual_orlicz_quermassintegral(P, lambda t: t ** P.dim, grid)
        worst = max(worst, abs(est - volume(P)) / volume(P))
    tol = 1e-3 if level == "full" else 5e-3
    return Check("V(K) quadrature vs exact", worst, tol, worst <= tol)


def check_dilation(level: str, seed: int = 8) -> Check:
    """V_phi(lambda K) strictly decreasing, ratios lambda^-2 for power:-2."""
    pair = make_power_pair(-2.0)
    lams = np.array([0.5, 1.0, 2.0, 4.0])
    worst, monotone = 0.0, True
    bodies = corpus(seed, LEVELS[level][2] // 2)
    for P in bodies:
        grid = _grid_for(P.dim, "quick")
        v = np.array([dual_orlicz_quermassintegral(dilate(P, lam), pair, grid) for lam in lams])
        monotone &= bool(np.all(np.diff(v) < 0))
        ratio = v[1:] / v[:-1]
        expect = (lams[1:] / lams[:-1]) ** -2.0
        worst = max(worst, float(np.max(np.abs(ratio / expect - 1.0))))
    return Check("dilation monotone, ratio l^-2", worst, 1e-6, monotone and worst <= 1e-6,
                 detail=f"{len(bodies)} bodies")


# --------------------------------------------------------------------------
# gradient audit
# --------------------------------------------------------------------------

def gradient_audit(P: HalfspacePolytope, pair, grid, n_dirs: int, rng,
                   t: float = 1e-5) -> np.ndarray:
    """Relative errors of the variational derivative against central FD."""
    errs = np.empty(n_dirs)
    for k in range(n_dirs):
        g = rng.uniform(-1.0, 1.0, P.n_facets)
        plus = P.with_offsets(P.offsets * np.exp(t * g))
        minus = P.with_offsets(P.offsets * np.exp(-t * g))
        fd = (dual_orlicz_quermassintegral(plus, pair, grid)
              - dual_orlicz_quermassintegral(minus, pair, grid)) / (2.0 * t)
        an = constraint_directional_derivative(P, pair, grid, g)
        errs[k] = abs(an - fd) / max(abs(fd), 1e-300)
    return errs


def check_gradient(level: str, seed: int = 9) -> Check:
    rng = np.random.default_rng(seed)
    n_dirs = 20 if level == "full" else 10
    need = n_dirs - 1
    worst_count, report = n_dirs, []
    bodies = [random_polytope(rng, 2, 12), random_polytope(rng, 3, 14)]
    for q in (-1.0, -2.0, 2.0):
        pair = make_power_pair(q)
        for P in bodies:
            errs = gradient_audit(P, pair, _grid_for(P.dim, level), n_dirs, rng)
            good = int(np.sum(errs <= 1e-3))
            worst_count = min(worst_count, good)
            report.append(f"q={q:g},n={P.dim}:{good}/{n_dirs}")
    return Check("gradient audit (FD, t=1e-5)", float(worst_count), float(need),
                 worst_count >= need, detail=" ".join(report))


ALL_CHECKS = (
    check_duality,
    check_bipolar,
    check_wulff_hull,
    check_support_bound,
    check_assignment_partition,
    check_cone_volume,
    check_total_equals_quermass,
    check_absolute_continuity,
    check_additivity,
    check_weak_continuity,
    check_uniqueness_data,
    check_surface_area,
    check_mixed_volume,
    check_volume_quadrature,
    check_dilation,
    check_gradient,
)


def run_suite(level: str = "quick") -> List[Check]:
    if level not in LEVELS:
        raise ValueError(f"unknown verify level {level!r}; choose from {sorted(LEVELS)}")
    return [_timed(lambda fn=fn: fn(level)) for fn in ALL_CHECKS]
