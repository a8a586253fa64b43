"""Convex bodies with the origin in their interior, as halfspace polytopes.

``K = {x : x . v_i <= h_i}`` with unit outer normals ``v_i`` and positive
offsets ``h_i``.  Measure-theoretic primitives (radial function, radial
Gauss assignment, dilation, radial distance) need only this halfspace data
and work in any dimension.  Vertex enumeration, polar bodies and exports go
through qhull.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from ._hemisphere import open_hemisphere_witness
from ._parallel import chunked_map
from .sphere_quadrature import SphericalGrid, build_grid

_CHUNK_ENTRIES = 2_000_000  # nodes x facets per radial-function block
_MERGE_TOL = 1e-9


class InvalidBodyError(ValueError):
    """Unbounded, empty, or otherwise degenerate body data."""


@dataclass(frozen=True, eq=False)
class HalfspacePolytope:
    """``K = intersection of {x : x . normals[i] <= offsets[i]}``."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        normals = np.array(self.normals, dtype=float, ndmin=2)
        offsets = np.array(self.offsets, dtype=float, ndmin=1)
        if normals.ndim != 2 or offsets.shape != (normals.shape[0],):
            raise InvalidBodyError("need one offset per normal")
        if normals.shape[1] < 2:
            raise InvalidBodyError("dimension must be >= 2")
        if not np.all(np.isfinite(normals)) or not np.all(np.isfinite(offsets)):
            raise InvalidBodyError("non-finite normals or offsets")
        if not np.all(np.abs(np.linalg.norm(normals, axis=1) - 1.0) <= 1e-9):
            raise InvalidBodyError("normals must be unit vectors")
        if not np.all(offsets > 0):
            raise InvalidBodyError("offsets must be strictly positive "
                                   "(origin in the interior)")
        xi = open_hemisphere_witness(normals)
        if xi is not None:
            raise InvalidBodyError(
                f"normals lie in a closed hemisphere (witness {np.round(xi, 6).tolist()}); "
                "the body would be unbounded")
        self._freeze(normals, offsets)

    def _freeze(self, normals, offsets):
        normals.setflags(write=False)
        offsets.setflags(write=False)
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def _trusted(cls, normals: np.ndarray, offsets: np.ndarray) -> "HalfspacePolytope":
        # skip validation when normals come from an already-valid body
        obj = object.__new__(cls)
        obj._freeze(np.array(normals, dtype=float), np.array(offsets, dtype=float))
        return obj

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def n_facets(self) -> int:
        return self.normals.shape[0]

    def with_offsets(self, offsets) -> "HalfspacePolytope":
        offsets = np.asarray(offsets, dtype=float)
        if offsets.shape != self.offsets.shape or not np.all(offsets > 0):
            raise InvalidBodyError("offsets must be positive, one per normal")
        return HalfspacePolytope._trusted(self.normals, offsets)

    # -- serialisation --------------------------------------------------
    def to_dict(self) -> dict:
        return {"dim": self.dim, "normals": self.normals.tolist(),
                "offsets": self.offsets.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "HalfspacePolytope":
        try:
            normals = np.asarray(data["normals"], dtype=float)
            offsets = np.asarray(data["offsets"], dtype=float)
        except KeyError as exc:
            raise InvalidBodyError(f"polytope JSON is missing field {exc}") from None
        body = cls(normals, offsets)
        if "dim" in data and int(data["dim"]) != body.dim:
            raise InvalidBodyError(f"dim field {data['dim']} does not match normals")
        return body


def make_polytope(normals, offsets) -> HalfspacePolytope:
    """Normalise the normals (rescaling the offsets to match) and validate."""
    normals = np.array(normals, dtype=float, ndmin=2)
    norms = np.linalg.norm(normals, axis=1)
    if np.any(norms == 0):
        raise InvalidBodyError("zero normal vector")
    return HalfspacePolytope(normals / norms[:, None],
                             np.asarray(offsets, dtype=float) / norms)


def hypercube(dim: int, half_width: float = 1.0) -> HalfspacePolytope:
    """[-a, a]^n with facet order +e1, -e1, +e2, -e2, ..."""
    eye = np.eye(dim)
    normals = np.empty((2 * dim, dim))
    normals[0::2], normals[1::2] = eye, -eye
    return HalfspacePolytope(normals, np.full(2 * dim, float(half_width)))


def regular_polygon(n_sides: int, inradius: float = 1.0,
                    phase: float = 0.0) -> HalfspacePolytope:
    theta = phase + 2.0 * np.pi * np.arange(n_sides) / n_sides
    normals = np.column_stack((np.cos(theta), np.sin(theta)))
    return HalfspacePolytope(normals, np.full(n_sides, float(inradius)))


@dataclass(frozen=True, eq=False)
class RadialSampleBody:
    """Radial samples rho(u_i) u_i; the body is their convex hull <rho>."""

    directions: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        dirs = np.array(self.directions, dtype=float, ndmin=2)
        radii = np.array(self.radii, dtype=float, ndmin=1)
        if radii.shape != (dirs.shape[0],):
            raise InvalidBodyError("need one radius per direction")
        if not np.all(np.abs(np.linalg.norm(dirs, axis=1) - 1.0) <= 1e-9):
            raise InvalidBodyError("directions must be unit vectors")
        if not np.all(radii > 0):
            raise InvalidBodyError("radii must be strictly positive")
        if open_hemisphere_witness(dirs) is not None:
            raise InvalidBodyError("directions lie in a closed hemisphere")
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "radii", radii)

    @property
    def dim(self) -> int:
        return self.directions.shape[1]


# --------------------------------------------------------------------------
# radial function and the discrete radial Gauss map
# --------------------------------------------------------------------------

def radial_function(P: HalfspacePolytope, u) -> Tuple[np.ndarray, np.ndarray]:
    """rho_P(u) = min over {i : u.v_i > 0} of h_i / (u.v_i), with the argmin.

    ``u`` may be one vector or an (N, n) stack.  Exact ties go to the
    smallest facet index (``argmin`` returns the first minimiser).
    """
    U = np.asarray(u, dtype=float)
    single = U.ndim == 1
    U = np.atleast_2d(U)
    if U.shape[1] != P.dim:
        raise InvalidBodyError(f"direction dimension {U.shape[1]} != body dimension {P.dim}")
    h = P.offsets
    chunk = max(1, _CHUNK_ENTRIES // max(1, P.n_facets))

    def block(a, b):
        dots = U[a:b] @ P.normals.T
        with np.errstate(divide="ignore"):
            ratio = np.where(dots > 0, h / np.where(dots > 0, dots, 1.0), np.inf)
        idx = np.argmin(ratio, axis=1)
        return ratio[np.arange(b - a), idx], idx

    parts = chunked_map(block, U.shape[0], chunk)
    rho = np.concatenate([p[0] for p in parts])
    idx = np.concatenate([p[1] for p in parts])
    if single:
        return rho[0], idx[0]
    return rho, idx


def radial_gauss_assignment(P: HalfspacePolytope, grid: SphericalGrid) -> np.ndarray:
    """Facet index of the boundary point rho_P(u) u for every grid node."""
    return radial_function(P, grid.nodes)[1]


def dilate(P: HalfspacePolytope, lam: float) -> HalfspacePolytope:
    if not (lam > 0 and np.isfinite(lam)):
        raise InvalidBodyError(f"dilation factor must be positive, got {lam}")
    return HalfspacePolytope._trusted(P.normals, P.offsets * lam)


def radial_distance(P: HalfspacePolytope, Q: HalfspacePolytope,
                    grid: SphericalGrid) -> float:
    """max over grid nodes of |rho_P - rho_Q| (grid surrogate of the sup)."""
    if P.dim != Q.dim:
        raise InvalidBodyError("bodies have different dimensions")
    rp = radial_function(P, grid.nodes)[0]
    rq = radial_function(Q, grid.nodes)[0]
    return float(np.max(np.abs(rp - rq)))


# --------------------------------------------------------------------------
# exact geometry via qhull
# --------------------------------------------------------------------------

def vertices(P: HalfspacePolytope) -> np.ndarray:
    """Vertices of P (deduplicated), from the halfspace intersection."""
    halfspaces = np.hstack((P.normals, -P.offsets[:, None]))
    try:
        hs = HalfspaceIntersection(halfspaces, np.zeros(P.dim))
    except QhullError as exc:
        raise InvalidBodyError(f"halfspace intersection failed: {exc}") from None
    pts = hs.intersections
    return _dedupe_rows(pts, 1e-10 * max(1.0, float(np.max(np.abs(pts)))))


def _dedupe_rows(a: np.ndarray, tol: float) -> np.ndarray:
    keep = []
    for i in range(a.shape[0]):
        if not keep or np.min(np.max(np.abs(a[keep] - a[i]), axis=1)) > tol:
            keep.append(i)
    return a[keep]


def support_function(P: HalfspacePolytope, u, verts: Optional[np.ndarray] = None):
    """h_P(u) = max over vertices x of x . u."""
    if verts is None:
        verts = vertices(P)
    U = np.asarray(u, dtype=float)
    vals = np.atleast_2d(U) @ verts.T
    out = vals.max(axis=1)
    return out[0] if U.ndim == 1 else out


def _hull_halfspaces(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, ConvexHull]:
    try:
        hull = ConvexHull(points)
    except QhullError as exc:
        raise InvalidBodyError(f"convex hull is degenerate: {exc}") from None
    eq = hull.equations  # a . x + b <= 0 inside, |a| = 1
    keep = []
    for i in range(eq.shape[0]):
        if not keep or np.min(np.max(np.abs(eq[keep] - eq[i]), axis=1)) > _MERGE_TOL:
            keep.append(i)
    eq = eq[keep]
    normals = eq[:, :-1] / np.linalg.norm(eq[:, :-1], axis=1, keepdims=True)
    offsets = -eq[:, -1]
    if np.any(offsets <= 0):
        raise InvalidBodyError("origin is not interior to the convex hull")
    return normals, offsets, hull


def polar(P: HalfspacePolytope) -> HalfspacePolytope:
    """P* = conv{v_i / h_i}, returned in halfspace form (coplanar facets merged)."""
    normals, offsets, _ = _hull_halfspaces(P.normals / P.offsets[:, None])
    return HalfspacePolytope._trusted(normals, offsets)


def nonredundant_mask(directions, values) -> np.ndarray:
    """True where the halfspace {x.u <= f(u)} touches [f] in a facet.

    By [f]* = <1/f>, this is exactly where u / f(u) is a vertex of the hull.
    """
    dirs = np.asarray(directions, dtype=float)
    vals = np.asarray(values, dtype=float)
    _, _, hull = _hull_halfspaces(dirs / vals[:, None])
    mask = np.zeros(dirs.shape[0], dtype=bool)
    mask[hull.vertices] = True
    return mask


def wulff_shape(dim: int, directions, values, prune: bool = True) -> HalfspacePolytope:
    """[f] = intersection of {x : x.u <= f(u)} over the given directions.

    With ``prune`` (default) halfspaces that do not carry a facet are
    dropped; the remaining ones keep their input order.
    """
    dirs = np.array(directions, dtype=float, ndmin=2)
    vals = np.array(values, dtype=float, ndmin=1)
    if dirs.shape[1] != dim:
        raise InvalidBodyError(f"directions are not {dim}-dimensional")
    if vals.shape != (dirs.shape[0],) or not np.all(vals > 0):
        raise InvalidBodyError("need one positive value per direction")
    body = HalfspacePolytope(dirs, vals)
    if not prune:
        return body
    mask = nonredundant_mask(body.normals, body.offsets)
    return HalfspacePolytope._trusted(body.normals[mask], body.offsets[mask])


def convex_hull_of_radial(body: RadialSampleBody) -> HalfspacePolytope:
    """<rho> = [1/rho]^*, computed as the polar of the Wulff shape of 1/rho."""
    return polar(wulff_shape(body.dim, body.directions, 1.0 / body.radii))


def prune(P: HalfspacePolytope, grid: SphericalGrid, factor: int = 4) -> HalfspacePolytope:
    """Drop facets that no node of a ``factor``-times finer grid selects.

    The finer grid uses the same rule as ``grid``; custom grids are used as is.
    """
    fine = grid
    if grid.rule in ("equal_angle_2d", "fibonacci_3d", "monte_carlo") and factor > 1:
        fine = build_grid(grid.dim, grid.rule, grid.resolution * factor, grid.seed)
    hit = np.zeros(P.n_facets, dtype=bool)
    hit[radial_gauss_assignment(P, fine)] = True
    return HalfspacePolytope(P.normals[hit], P.offsets[hit])


def polygon_vertex_angles(P: HalfspacePolytope) -> np.ndarray:
    """Polar angles in [0, 2 pi) of the vertices of a polygon, unsorted.

    Adjacent facets are read off the hull of the dual points v_i / h_i,
    whose vertices come out in counter-clockwise order.
    """
    if P.dim != 2:
        raise InvalidBodyError("vertex angles need a 2-D body")
    try:
        order = ConvexHull(P.normals / P.offsets[:, None]).vertices
    except QhullError as exc:
        raise InvalidBodyError(f"convex hull is degenerate: {exc}") from None
    i, j = order, np.roll(order, -1)
    A = np.stack((P.normals[i], P.normals[j]), axis=1)          # (k, 2, 2)
    b = np.stack((P.offsets[i], P.offsets[j]), axis=1)
    pts = np.linalg.solve(A, b[..., None])[..., 0]
    return np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2.0 * np.pi)


def volume(P: HalfspacePolytope) -> float:
    """Exact volume from the vertex hull."""
    return float(ConvexHull(vertices(P)).volume)


def facet_vertices(P: HalfspacePolytope, verts: Optional[np.ndarray] = None, tol: float = 1e-9):
    """For each facet, the vertices lying on its hyperplane (2-D/3-D: ordered loop)."""
    if verts is None:
        verts = vertices(P)
    out = []
    for v, h in zip(P.normals, P.offsets):
        on = verts[np.abs(verts @ v - h) <= tol * max(1.0, h)]
        if P.dim == 3 and len(on) >= 3:
            centre = on.mean(axis=0)
            e1 = on[0] - centre
            e1 /= np.linalg.norm(e1)
            e2 = np.cross(v, e1)
            ang = np.arctan2((on - centre) @ e2, (on - centre) @ e1)
            on = on[np.argsort(ang)]
        out.append(on)
    return out


def facet_areas(P: HalfspacePolytope) -> np.ndarray:
    """Exact (n-1)-volumes of the facets in 2-D and 3-D."""
    if P.dim not in (2, 3):
        raise InvalidBodyError("exact facet areas are available for n = 2, 3 only")
    areas = np.zeros(P.n_facets)
    for i, loop in enumerate(facet_vertices(P)):
        if P.dim == 2 and len(loop) >= 2:
            d = loop[:, None, :] - loop[None, :, :]
            areas[i] = np.max(np.linalg.norm(d, axis=2))
        elif P.dim == 3 and len(loop) >= 3:
            cross = np.cross(loop, np.roll(loop, -1, axis=0)).sum(axis=0)
            areas[i] = 0.5 * abs(cross @ P.normals[i])
    return areas


# --------------------------------------------------------------------------
# file formats
# --------------------------------------------------------------------------

def save_json(P: HalfspacePolytope, path) -> None:
    Path(path).write_text(json.dumps(P.to_dict(), indent=2) + "\n")


def load_json(path) -> HalfspacePolytope:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidBodyError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from None
    return HalfspacePolytope.from_dict(data)


def to_obj(P: HalfspacePolytope) -> str:
    """Wavefront OBJ text: vertices plus one polygon per facet (n = 3)."""
    if P.dim != 3:
        raise InvalidBodyError("OBJ export needs a 3-D body")
    verts = vertices(P)
    lines = [f"# {len(verts)} vertices, {P.n_facets} facets"]
    lines += [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in verts]
    for loop in facet_vertices(P, verts):
        if len(loop) < 3:
            continue
        ids = [int(np.argmin(np.linalg.norm(verts - p, axis=1))) + 1 for p in loop]
        lines.append("f " + " ".join(map(str, ids)))
    return "\n".join(lines) + "\n"


def vertex_loop_2d(P: HalfspacePolytope) -> np.ndarray:
    """Vertices of a polygon in counter-clockwise order."""
    if P.dim != 2:
        raise InvalidBodyError("vertex loop needs a 2-D body")
    verts = vertices(P)
    return verts[np.argsort(np.arctan2(verts[:, 1], verts[:, 0]))]


def to_csv_2d(P: HalfspacePolytope) -> str:
    loop = vertex_loop_2d(P)
    return "x,y\n" + "".join(f"{x:.17g},{y:.17g}\n" for x, y in loop)
