"""Polar bodies, Wulff shapes and the Orlicz radial addition.

The Wulff shape of support data f is the largest body whose support numbers
stay below f; its polar is the convex hull of the points u / f(u).  The
radial addition mixes two star bodies direction by direction through a pair
of monotone functions.
"""

import numpy as np

from orlimink import (
    RadialAdditionSpec,
    RadialSampleBody,
    addition_residual,
    build_grid,
    convex_hull_of_radial,
    polar,
    radial_addition,
    radial_distance,
    radial_function,
    regular_polygon,
    support_function,
    wulff_shape,
)

rng = np.random.default_rng(11)
grid = build_grid(2, "equal_angle_2d", 2048)

dirs = rng.standard_normal((64, 2))
dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
f = rng.uniform(0.8, 1.5, 64)
W = wulff_shape(2, dirs, f)
print(f"Wulff shape keeps {W.n_facets} of 64 directions")
print("max h_W - f over the data:", float(np.max(support_function(W, dirs) - f)))

hull = convex_hull_of_radial(RadialSampleBody(dirs, 1.0 / f))
print("radial distance polar(W) vs hull of u/f:", radial_distance(polar(W), hull, grid))

rho_p = radial_function(polar(W), grid.nodes)[0]
print("max |rho_W* h_W - 1| on the grid:",
      float(np.max(np.abs(rho_p * support_function(W, grid.nodes) - 1))))

# Radial addition of W with a hexagon for three choices of (phi1, phi2).
rk = radial_function(W, grid.nodes)[0]
rl = radial_function(regular_polygon(6, 0.5), grid.nodes)[0]
for label, phi in (("t", lambda t: t), ("1/t", lambda t: 1 / t), ("t^2", lambda t: t * t)):
    spec = RadialAdditionSpec(phi, phi, 1.0)
    rho = radial_addition(rk, rl, spec)
    res = np.max(np.abs(addition_residual(rho, rk, rl, spec)))
    print(f"phi = {label:4s} mean radius {rho.mean():.5f}, max residual {res:.1e}")
# phi = t is the ordinary radial sum, phi = 1/t the harmonic one; t^2 sits at the
# L2 combination sqrt(rk^2 + rl^2).
