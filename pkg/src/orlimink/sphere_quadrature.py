"""Deterministic quadrature rules on the unit sphere S^{n-1}.

Every spherical integral in the package reduces to a weighted sum over the
nodes of a :class:`SphericalGrid`.  Three rules are available, all with
uniform weights:

* ``equal_angle_2d``  -- nodes at angles ``2*pi*k/N`` on the circle (n = 2)
* ``fibonacci_3d``    -- the Fibonacci lattice on S^2 (n = 3)
* ``monte_carlo``     -- seeded uniform random directions (any n >= 2)
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

RULES = ("equal_angle_2d", "fibonacci_3d", "monte_carlo")
_GOLDEN = (1.0 + 5.0 ** 0.5) / 2.0


class QuadratureError(ValueError):
    """Raised for invalid grid requests or integrands."""


def sphere_area(dim: int) -> float:
    """Surface measure of S^{dim-1}: 2 pi^{n/2} / Gamma(n/2)."""
    if dim < 1:
        raise QuadratureError(f"dimension must be >= 1, got {dim}")
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


@dataclass(frozen=True, eq=False)
class SphericalGrid:
    """Quadrature nodes and weights on S^{dim-1}.

    Arrays are made read-only on construction so a grid can be shared
    between workers without copying.
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    rule: str = "custom"
    resolution: int = 0
    seed: Optional[int] = None

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        weights = np.ascontiguousarray(self.weights, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != self.dim:
            raise QuadratureError(
                f"nodes must have shape (N, {self.dim}), got {nodes.shape}")
        if weights.shape != (nodes.shape[0],):
            raise QuadratureError("one weight per node required")
        if not np.all(np.abs(np.linalg.norm(nodes, axis=1) - 1.0) <= 1e-12):
            raise QuadratureError("grid nodes must be unit vectors")
        if not np.all(weights > 0):
            raise QuadratureError("grid weights must be strictly positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.shape[0]

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "rule": self.rule,
            "resolution": self.resolution,
            "seed": self.seed,
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SphericalGrid":
        return cls(
            dim=int(data["dim"]),
            nodes=np.asarray(data["nodes"], dtype=float),
            weights=np.asarray(data["weights"], dtype=float),
            rule=data.get("rule", "custom"),
            resolution=int(data.get("resolution", len(data["weights"]))),
            seed=data.get("seed"),
        )

    @classmethod
    def from_json(cls, text: str) -> "SphericalGrid":
        return cls.from_dict(json.loads(text))


def _equal_angle(resolution: int) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(resolution) / resolution
    return np.column_stack((np.cos(theta), np.sin(theta)))


def _fibonacci(resolution: int) -> np.ndarray:
    k = np.arange(resolution, dtype=float) + 0.5
    z = 1.0 - 2.0 * k / resolution
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    theta = 2.0 * np.pi * k / _GOLDEN
    pts = np.column_stack((r * np.cos(theta), r * np.sin(theta), z))
    # one renormalisation pass brings norms to within an ulp of 1
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _monte_carlo(dim: int, resolution: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((resolution, dim))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


@functools.lru_cache(maxsize=16)
def build_grid(dim: int, rule: str, resolution: int,
               seed: Optional[int] = None) -> SphericalGrid:
    """Build a quadrature grid with uniform weights ``|S^{n-1}| / resolution``.

    Parameters
    ----------
    dim : int
        Ambient dimension n (>= 2).
    rule : {"equal_angle_2d", "fibonacci_3d", "monte_carlo"}
    resolution : int
        Number of nodes (>= 4).
    seed : int, optional
        Required by ``monte_carlo``; recorded but unused otherwise.

    Grids are immutable, so identical requests return the cached instance.
    """
    if dim < 2:
        raise QuadratureError(f"dimension must be >= 2, got {dim}")
    if resolution < 4:
        raise QuadratureError(f"resolution must be >= 4, got {resolution}")
    if rule == "equal_angle_2d":
        if dim != 2:
            raise QuadratureError("equal_angle_2d requires dim=2")
        nodes = _equal_angle(resolution)
    elif rule == "fibonacci_3d":
        if dim != 3:
            raise QuadratureError("fibonacci_3d requires dim=3")
        nodes = _fibonacci(resolution)
    elif rule == "monte_carlo":
        if seed is None:
            raise QuadratureError("monte_carlo requires a seed")
        nodes = _monte_carlo(dim, resolution, seed)
    else:
        raise QuadratureError(f"unknown rule {rule!r}; expected one of {RULES}")

    weights = np.full(resolution, sphere_area(dim) / resolution)
    grid = SphericalGrid(dim=dim, nodes=nodes, weights=weights, rule=rule,
                         resolution=resolution, seed=seed)

    from ._hemisphere import open_hemisphere_witness
    if open_hemisphere_witness(grid.nodes) is not None:
        raise QuadratureError(
            "grid nodes lie in a closed hemisphere; increase the resolution")
    return grid


def default_grid(dim: int, resolution: Optional[int] = None,
                 seed: Optional[int] = None) -> SphericalGrid:
    """Pick the natural rule for ``dim``: equal-angle (2), Fibonacci (3), MC."""
    if dim == 2:
        return build_grid(2, "equal_angle_2d", resolution or 4096)
    if dim == 3:
        return build_grid(3, "fibonacci_3d", resolution or 100_000)
    return build_grid(dim, "monte_carlo", resolution or 100_000,
                      seed=0 if seed is None else seed)


def integrate(grid: SphericalGrid, values) -> float:
    """Quadrature sum ``sum_k w_k f(u_k)`` for node-indexed values ``f``.

    The reduction order is fixed by the node order, so repeated calls on
    the same grid are bit-reproducible.
    """
    f = np.asarray(values, dtype=float)
    if f.shape != (len(grid),):
        raise QuadratureError(
            f"expected {len(grid)} node values, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise QuadratureError("integrand has non-finite values")
    return float(np.dot(grid.weights, f))
