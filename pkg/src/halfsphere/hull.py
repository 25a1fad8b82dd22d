"""Spherical convex hulls as pointed polyhedral cones.

The spherical hull of points in an open halfsphere is the section of their
positive hull with the sphere. Construction goes through the cross-section
chart: pick a strictly interior direction c, project the points centrally
onto the hyperplane <z,c> = 1, take the Euclidean convex hull there, and lift
its facets back to hyperplanes through the origin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize
from scipy.spatial import ConvexHull, QhullError

from .errors import DegenerateHull, IterationLimit, TooFewPoints
from .sphere import PointSample, _complement_basis, unit_vector

HULL_EPS = 1e-9

# minimal chart margin: directions with <x,c> below this cannot be charted
_MIN_MARGIN = 1e-9


@dataclass(frozen=True)
class SphericalPolytope:
    """Pointed-cone representation of a spherical polytope.

    vertices: extreme rays, unit rows (m, d+1), in input order.
    facet_normals: inward unit normals (f, d+1); <n, x> >= 0 for hull points.
    facet_vertices: (f, d) indices into `vertices`, each row sorted; rows in
        lexicographic order so equal hulls serialize identically.
    interior_direction: the chart direction c used during construction.
    """

    d: int
    vertices: np.ndarray
    facet_normals: np.ndarray
    facet_vertices: np.ndarray
    interior_direction: np.ndarray

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_facets(self) -> int:
        return self.facet_normals.shape[0]

    def ridges(self) -> set[tuple[int, ...]]:
        """Distinct (d-2)-faces, as sorted vertex-index tuples from facet incidence."""
        out: set[tuple[int, ...]] = set()
        for row in self.facet_vertices:
            for drop in range(row.size):
                out.add(tuple(np.delete(row, drop)))
        return out


def _interior_direction(points: np.ndarray) -> np.ndarray:
    """A direction c with <x_i, c> > 0 for all i, or raise DegenerateHull.

    The normalized centroid works for all but adversarial inputs; the
    fallback solves the max-margin feasibility LP.
    """
    centroid = points.mean(axis=0)
    nrm = np.linalg.norm(centroid)
    if nrm > 1e-12:
        c = centroid / nrm
        if (points @ c).min() > _MIN_MARGIN:
            return c
    # LP: maximize t  s.t.  points @ c >= t,  -1 <= c_j <= 1
    n, m = points.shape
    cost = np.zeros(m + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([-points, np.ones((n, 1))])
    res = scipy.optimize.linprog(
        cost, A_ub=a_ub, b_ub=np.zeros(n), bounds=[(-1, 1)] * m + [(None, None)],
        method="highs",
    )
    if not res.success or res.x[-1] <= _MIN_MARGIN:
        raise DegenerateHull("no strictly positive direction exists: cone is not pointed")
    return unit_vector(res.x[:-1])


def spherical_hull(sample: PointSample) -> SphericalPolytope:
    """Build the spherical convex hull of a point sample.

    Requires n >= d+1 points positively spanning a pointed full-dimensional
    cone. Raises TooFewPoints / DegenerateHull otherwise.
    """
    points = sample.points
    d = sample.d
    n = points.shape[0]
    if n < d + 1:
        raise TooFewPoints(f"need at least d+1={d + 1} points, got {n}")
    if np.linalg.matrix_rank(points, tol=1e-10) < d + 1:
        raise DegenerateHull("points do not span d+1 dimensions")

    c = _interior_direction(points)
    basis = _complement_basis(c)
    chart = (points / (points @ c)[:, None]) @ basis.T

    try:
        try:
            hull = ConvexHull(chart)
        except QhullError:
            # near-degenerate chart configuration: joggle and retry once
            hull = ConvexHull(chart, qhull_options="QJ")
    except QhullError as exc:
        raise DegenerateHull(f"chart hull construction failed: {exc}") from exc

    vert_input_idx = np.sort(hull.vertices)
    remap = np.full(n, -1, dtype=np.intp)
    remap[vert_input_idx] = np.arange(vert_input_idx.size)
    vertices = points[vert_input_idx]

    facet_vertices = np.sort(remap[hull.simplices], axis=1)
    # lift chart hyperplanes a.z + b = 0 to cone normals a@B + b*c (outward)
    normals = hull.equations[:, :-1] @ basis + hull.equations[:, -1:] * c
    normals /= -np.linalg.norm(normals, axis=1)[:, None]  # flip to inward unit

    order = np.lexsort(facet_vertices.T[::-1])
    facet_vertices = facet_vertices[order]
    normals = normals[order]

    if (points @ normals.T).min() < -HULL_EPS:
        raise DegenerateHull("constructed facets do not support all input points")

    return SphericalPolytope(
        d=d,
        vertices=vertices,
        facet_normals=normals,
        facet_vertices=facet_vertices,
        interior_direction=c,
    )


def contains(poly: SphericalPolytope, x) -> bool:
    """Membership: every inward facet inequality holds within tolerance."""
    return bool((poly.facet_normals @ np.asarray(x, dtype=float)).min() >= -HULL_EPS)


def contains_batch(poly: SphericalPolytope, points: np.ndarray) -> np.ndarray:
    """Vectorized membership for an (n, d+1) array of directions."""
    return (points @ poly.facet_normals.T).min(axis=1) >= -HULL_EPS


@dataclass(frozen=True)
class ConeProjection:
    point: np.ndarray  # Euclidean projection of y onto the cone
    norm: float        # its Euclidean norm, in [0, 1] for unit y


def project_onto_cone(poly: SphericalPolytope, y) -> ConeProjection:
    """Euclidean projection of y onto the positive hull of the vertices.

    Nonnegative least squares over the vertex rays (Lawson-Hanson active
    set). For unit y with positive projection norm r, the geodesic distance
    from y to the polytope is arccos(r).
    """
    y = np.asarray(y, dtype=float)
    rays = poly.vertices.T  # (d+1, m)
    maxiter = 50 * poly.n_vertices
    try:
        coef, _ = scipy.optimize.nnls(rays, y, maxiter=maxiter)
    except RuntimeError as exc:
        raise IterationLimit(
            f"cone projection exceeded {maxiter} active-set iterations"
        ) from exc
    point = rays @ coef
    return ConeProjection(point=point, norm=float(np.linalg.norm(point)))
