"""Independent reference computations used across the test modules."""

import itertools

import numpy as np
from scipy.optimize import linprog


def brute_vertices(normals, offsets, tol=1e-9):
    """Feasible intersections of every n-subset of facet hyperplanes."""
    n = normals.shape[1]
    pts = []
    for idx in itertools.combinations(range(len(offsets)), n):
        A = normals[list(idx)]
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        x = np.linalg.solve(A, offsets[list(idx)])
        if np.all(normals @ x <= offsets + tol):
            if not any(np.max(np.abs(x - p)) <= 1e-8 for p in pts):
                pts.append(x)
    return np.array(pts)


def lp_support(normals, offsets, u):
    """max x . u over the halfspace polytope by linear programming."""
    res = linprog(-np.asarray(u), A_ub=normals, b_ub=offsets,
                  bounds=[(None, None)] * normals.shape[1], method="highs")
    return -res.fun


def brute_radial(normals, offsets, u):
    """rho(u) = min over facets with u . v > 0 of h / (u . v), looped."""
    best, arg = np.inf, -1
    for i, (v, h) in enumerate(zip(normals, offsets)):
        d = float(u @ v)
        if d > 0 and h / d < best:
            best, arg = h / d, i
    return best, arg


def shoelace(points):
    pts = points[np.argsort(np.arctan2(points[:, 1], points[:, 0]))]
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def facet_polygon_areas_3d(normals, offsets, verts):
    """Area of each facet from the brute-force vertices lying on it."""
    areas = np.zeros(len(offsets))
    for j, (v, h) in enumerate(zip(normals, offsets)):
        on = verts[np.abs(verts @ v - h) <= 1e-8]
        if len(on) < 3:
            continue
        c = on.mean(axis=0)
        e1 = on[0] - c
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(v, e1)
        local = np.column_stack(((on - c) @ e1, (on - c) @ e2))
        areas[j] = shoelace(local)
    return areas


def exact_cone_volumes(normals, offsets, verts):
    """V_j = h_j A_j / n: cone over facet j with apex at the origin."""
    n = normals.shape[1]
    if n == 2:
        areas = np.zeros(len(offsets))
        for j, (v, h) in enumerate(zip(normals, offsets)):
            on = verts[np.abs(verts @ v - h) <= 1e-8]
            if len(on) == 2:
                areas[j] = np.linalg.norm(on[0] - on[1])
    else:
        areas = facet_polygon_areas_3d(normals, offsets, verts)
    return offsets * areas / n
