"""Dual Orlicz curvature measures of a few polytopes.

Walks from the cone-volume measure (phi = t^n), where every facet mass is an
exact cone volume, to the family phi = t^q, and shows how the masses move as
q changes.  Run with ``python demos/01_curvature_measures.py``.
"""

import numpy as np

from orlimink import (
    build_grid,
    cone_volume_measure,
    dual_orlicz_curvature_measure,
    dual_orlicz_quermassintegral,
    hypercube,
    make_polytope,
    make_power_pair,
    volume,
)

grid2 = build_grid(2, "equal_angle_2d", 4096)
grid3 = build_grid(3, "fibonacci_3d", 100_000)

# The square [-1, 1]^2 splits into four triangles of area 1 around the origin,
# and the cube into six pyramids of volume 4/3.
sq = cone_volume_measure(hypercube(2), grid2)
cu = cone_volume_measure(hypercube(3), grid3)
print("square cone volumes:", np.round(sq.masses, 6), " total", round(sq.total, 6))
print("cube cone volumes:  ", np.round(cu.masses, 4), " total", round(cu.total, 4))

# An off-centre triangle: the origin sits close to the bottom edge, so that
# edge has a small cone and the masses are far from uniform.
tri = make_polytope([[0.0, -1.0], [1.0, 1.0], [-1.0, 1.0]], [0.2, 1.0, 1.0])
cone = cone_volume_measure(tri, grid2)
print("\ntriangle area", round(volume(tri), 6), "cone masses", np.round(cone.masses, 5))

# Negative powers weight points near the origin more heavily, so the edge
# closest to the origin gains relative mass as q decreases.
print("\n   q   normalised masses            V_phi(K)")
for q in (2.0, 1.0, -1.0, -2.0, -4.0):
    pair = make_power_pair(q)
    cm = dual_orlicz_curvature_measure(tri, pair, grid2)
    vphi = dual_orlicz_quermassintegral(tri, pair, grid2)
    print(f"{q:5.1f}   {np.array2string(cm.masses / cm.total, precision=4)}   {vphi:.6f}")
