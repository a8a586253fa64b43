"""Dual Orlicz quermassintegrals, curvature measures and related integrals.

All spherical integrals are grid quadratures.  The curvature measure of a
polytope is computed by pulling each node back to the facet hit by its
radial ray::

    c_j = (1/n) * sum_{k : alpha(u_k) = j} w_k varphi(rho(u_k))

so integrating a facet function against it is the same regrouped sum.

On ``equal_angle_2d`` grids the cells that contain a polygon vertex are
split at the vertex angle and each piece is sampled at its midpoint (see
:func:`radial_samples`).  Without this, one node changing facet moves a
whole cell of mass, and c becomes a step function of the support numbers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from ._hemisphere import open_hemisphere_witness
from .body_kernel import (
    HalfspacePolytope,
    InvalidBodyError,
    polygon_vertex_angles,
    radial_function,
)
from .orlicz_pairs import OrliczPair
from .sphere_quadrature import SphericalGrid

FuncOrPair = Union[Callable, OrliczPair]


class MeasureError(ValueError):
    """Invalid measure data or a non-finite integrand."""


@dataclass(frozen=True, eq=False)
class DiscreteSphericalMeasure:
    """Finitely many atoms (direction, mass) on S^{n-1}."""

    directions: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        dirs = np.array(self.directions, dtype=float, ndmin=2)
        masses = np.array(self.masses, dtype=float, ndmin=1)
        if dirs.shape[0] == 0:
            raise MeasureError("measure has no atoms")
        if masses.shape != (dirs.shape[0],):
            raise MeasureError("need one mass per atom")
        if not np.all(np.isfinite(dirs)) or not np.all(np.isfinite(masses)):
            raise MeasureError("non-finite atom data")
        if not np.all(np.abs(np.linalg.norm(dirs, axis=1) - 1.0) <= 1e-9):
            raise MeasureError("atom directions must be unit vectors")
        if not np.all(masses > 0):
            raise MeasureError("atom masses must be strictly positive")
        if dirs.shape[0] > 1:
            gram = np.clip(dirs @ dirs.T, -1.0, 1.0)
            np.fill_diagonal(gram, -1.0)
            if np.max(gram) >= np.cos(1e-12):
                raise MeasureError("atom directions must be pairwise distinct")
        dirs.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "masses", masses)

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    @property
    def total(self) -> float:
        return float(self.masses.sum())

    def __len__(self) -> int:
        return self.masses.shape[0]

    def to_dict(self) -> dict:
        return {"dim": self.dim,
                "atoms": [{"direction": d.tolist(), "mass": float(m)}
                          for d, m in zip(self.directions, self.masses)]}

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteSphericalMeasure":
        try:
            atoms = data["atoms"]
            dirs = [a["direction"] for a in atoms]
            masses = [a["mass"] for a in atoms]
        except (KeyError, TypeError) as exc:
            raise MeasureError(f"measure JSON is missing field {exc}") from None
        if not atoms:
            raise MeasureError("measure has no atoms")
        dirs = np.asarray(dirs, dtype=float)
        norms = np.linalg.norm(dirs, axis=1, keepdims=True)
        if np.any(norms == 0):
            raise MeasureError("zero atom direction")
        meas = cls(dirs / norms, masses)
        if "dim" in data and int(data["dim"]) != meas.dim:
            raise MeasureError(f"dim field {data['dim']} does not match the atoms")
        return meas


def load_measure(path) -> DiscreteSphericalMeasure:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeasureError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from None
    return DiscreteSphericalMeasure.from_dict(data)


def save_measure(mu: DiscreteSphericalMeasure, path) -> None:
    Path(path).write_text(json.dumps(mu.to_dict(), indent=2) + "\n")


@dataclass(frozen=True, eq=False)
class CurvatureMeasure:
    """Per-facet masses of C_varphi(P, .) on the facet normals of ``body``."""

    body: HalfspacePolytope
    masses: np.ndarray
    total: float
    label: str = ""
    grid_rule: str = ""
    grid_resolution: int = 0

    def as_measure(self) -> DiscreteSphericalMeasure:
        """Atoms with positive mass, as a :class:`DiscreteSphericalMeasure`."""
        keep = self.masses > 0
        return DiscreteSphericalMeasure(self.body.normals[keep], self.masses[keep])

    def to_dict(self) -> dict:
        out = {
            "dim": self.body.dim,
            "atoms": [{"direction": d.tolist(), "mass": float(m)}
                      for d, m in zip(self.body.normals, self.masses)],
        }
        out.update(total=self.total, phi_label=self.label,
                   grid={"rule": self.grid_rule, "resolution": self.grid_resolution})
        return out


@dataclass(frozen=True)
class RadialSamples:
    """Quadrature points with weights, and each body's rho / facet there."""

    points: np.ndarray
    weights: np.ndarray
    rho: tuple
    facet: tuple


def _split_cells(grid: SphericalGrid, angles: np.ndarray):
    n_nodes = len(grid)
    cell = 2.0 * np.pi / n_nodes
    k = np.mod(np.rint(angles / cell).astype(np.int64), n_nodes)
    offset = np.mod(angles - k * cell + np.pi, 2.0 * np.pi) - np.pi
    offset = np.clip(offset, -0.5 * cell, 0.5 * cell)
    touched = np.unique(k)
    keep = np.ones(n_nodes, dtype=bool)
    keep[touched] = False
    pieces_theta, pieces_w = [], []
    for kk in touched:
        edges = np.concatenate(([-0.5 * cell], np.sort(offset[k == kk]), [0.5 * cell]))
        length = np.diff(edges)
        ok = length > 0
        mids = 0.5 * (edges[:-1] + edges[1:])[ok]
        pieces_theta.append(2.0 * np.pi * kk / n_nodes + mids)
        pieces_w.append(grid.weights[kk] * length[ok] / cell)
    theta = np.concatenate(pieces_theta)
    extra = np.column_stack((np.cos(theta), np.sin(theta)))
    points = np.concatenate((grid.nodes[keep], extra))
    weights = np.concatenate((grid.weights[keep], np.concatenate(pieces_w)))
    return points, weights


def radial_samples(grid: SphericalGrid, *bodies: HalfspacePolytope) -> RadialSamples:
    """Sample points for integrals over the given bodies.

    These are the grid nodes, except on ``equal_angle_2d`` grids, where
    every cell holding a vertex of one of the bodies is cut at the vertex
    angle into midpoint-sampled pieces.  Each piece then lies inside a
    single facet's angular range.
    """
    for B in bodies:
        _check_dims(B, grid)
    points, weights = grid.nodes, grid.weights
    if grid.rule == "equal_angle_2d" and grid.dim == 2:
        angles = np.concatenate([polygon_vertex_angles(B) for B in bodies])
        points, weights = _split_cells(grid, angles)
    rho, facet = zip(*(radial_function(B, points) for B in bodies))
    return RadialSamples(points, weights, tuple(rho), tuple(facet))


def _curvature_function(f: FuncOrPair) -> Callable:
    return f.varphi if isinstance(f, OrliczPair) else f


def _quermass_function(f: FuncOrPair) -> Callable:
    return f.phi if isinstance(f, OrliczPair) else f


def _check_dims(P: HalfspacePolytope, grid: SphericalGrid):
    if P.dim != grid.dim:
        raise InvalidBodyError(f"body dimension {P.dim} != grid dimension {grid.dim}")


def _evaluate(f: Callable, rho: np.ndarray, what: str) -> np.ndarray:
    with np.errstate(all="ignore"):
        vals = np.asarray(f(rho), dtype=float)
    if vals.shape != rho.shape:
        vals = np.broadcast_to(vals, rho.shape).astype(float)
    if not np.all(np.isfinite(vals)):
        raise MeasureError(f"{what} is not finite on the sampled radial range "
                           f"[{rho.min():.6g}, {rho.max():.6g}]")
    return vals


def dual_orlicz_quermassintegral(P: HalfspacePolytope, f: FuncOrPair,
                                 grid: SphericalGrid) -> float:
    """V_phi(P) = (1/n) * integral of phi(rho_P(u)) du.

    ``f`` is a callable, or a pair whose ``phi`` is used.
    """
    smp = radial_samples(grid, P)
    vals = _evaluate(_quermass_function(f), smp.rho[0], "phi")
    return float(np.dot(smp.weights, vals)) / P.dim


def dual_orlicz_curvature_measure(P: HalfspacePolytope, f: FuncOrPair,
                                  grid: SphericalGrid) -> CurvatureMeasure:
    """Per-facet masses of C_varphi(P, .); ``f`` is varphi or a pair."""
    smp = radial_samples(grid, P)
    fn = _curvature_function(f)
    vals = _evaluate(fn, smp.rho[0], "varphi")
    masses = np.bincount(smp.facet[0], weights=smp.weights * vals,
                         minlength=P.n_facets) / P.dim
    label = f.label if isinstance(f, OrliczPair) else getattr(fn, "__name__", "custom")
    return CurvatureMeasure(body=P, masses=masses, total=float(masses.sum()),
                            label=label, grid_rule=grid.rule,
                            grid_resolution=grid.resolution)


def integrate_against_curvature(P: HalfspacePolytope, f: FuncOrPair,
                                grid: SphericalGrid, g) -> float:
    """int g dC_varphi(P, .) for a facet-indexed function g."""
    g = np.asarray(g, dtype=float)
    if g.shape != (P.n_facets,):
        raise MeasureError(f"expected {P.n_facets} facet values, got shape {g.shape}")
    c = dual_orlicz_curvature_measure(P, f, grid).masses
    return float(np.dot(g, c))


def dual_orlicz_mixed_volume(K: HalfspacePolytope, L: HalfspacePolytope,
                             psi: Callable, grid: SphericalGrid) -> float:
    """V_psi(K, L) = (1/n) * integral of psi(rho_L / rho_K) rho_K^n du."""
    if K.dim != L.dim:
        raise InvalidBodyError("bodies have different dimensions")
    smp = radial_samples(grid, K, L)
    rk, rl = smp.rho
    vals = _evaluate(psi, rl / rk, "psi") * rk ** K.dim
    return float(np.dot(smp.weights, vals)) / K.dim


def cone_volume_measure(P: HalfspacePolytope, grid: SphericalGrid) -> CurvatureMeasure:
    """The varphi(t) = t^n case: facet j carries the volume of its cone."""
    n = P.dim

    def power_n(t):
        return np.power(t, n)

    power_n.__name__ = f"t^{n}"
    return dual_orlicz_curvature_measure(P, power_n, grid)


def surface_area_measure(P: HalfspacePolytope, grid: SphericalGrid) -> np.ndarray:
    """Facet areas A_j = n V_j / h_j from the quadrature cone volumes V_j."""
    cone = cone_volume_measure(P, grid).masses
    return P.dim * cone / P.offsets


@dataclass(frozen=True)
class HemisphereCheck:
    passed: bool
    witness: Optional[np.ndarray] = None

    def __bool__(self) -> bool:
        return self.passed


def hemisphere_certificate(mu: DiscreteSphericalMeasure, xi) -> float:
    """sum_i mu_i (xi . v_i)_+ -- zero exactly when xi certifies concentration."""
    xi = np.asarray(xi, dtype=float)
    return float(np.dot(mu.masses, np.clip(mu.directions @ xi, 0.0, None)))


def hemisphere_concentration_check(mu: DiscreteSphericalMeasure,
                                   rtol: float = 1e-10) -> HemisphereCheck:
    """Decide whether mu is concentrated on a closed hemisphere.

    Fails (with a unit witness xi, all atoms satisfying xi . v_i <= 0) iff
    the origin is not interior to the hull of the atom directions.  The
    witness is accepted only if its certificate is <= rtol * |mu|.
    """
    if len(mu) == 0:
        raise MeasureError("empty measure")
    xi = open_hemisphere_witness(mu.directions)
    if xi is None:
        return HemisphereCheck(True)
    if hemisphere_certificate(mu, xi) > rtol * mu.total:  # pragma: no cover
        raise MeasureError("hemisphere witness failed its own certificate")
    return HemisphereCheck(False, xi)
