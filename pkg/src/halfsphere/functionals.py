"""Geometric functionals of spherical polytopes.

Face counts, surface area (the total (d-1)-measure of the facets), spherical
volume and missed volume, spherical mean width, and the Hausdorff distance to
the halfsphere. Exact paths are used where the dimension allows (arc lengths
at d=2, triangle excesses at d=3, polygon excess for d=2 volume); everything
else is Monte Carlo with a reported standard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .formulas import omega
from .hull import HULL_EPS, SphericalPolytope, contains_batch
from .sphere import (PoleFrame, as_generator, geodesic_distance,
                     sample_uniform_halfsphere, unit_vector)


@dataclass(frozen=True)
class FunctionalValue:
    """One functional evaluation; stderr present iff the path is Monte Carlo."""

    kind: str
    value: float
    stderr: float | None = None
    samples_used: int | None = None
    lower_bound_only: bool = False


class FaceCounts(NamedTuple):
    vertices: int   # f_0
    ridges: int     # f_{d-2}
    facets: int     # f_{d-1}


def face_counts(poly: SphericalPolytope) -> FaceCounts:
    """f_0, f_{d-2}, f_{d-1} from the stored incidence."""
    return FaceCounts(
        vertices=poly.n_vertices,
        ridges=len(poly.ridges()),
        facets=poly.n_facets,
    )


def spherical_triangle_excess(a, b, c) -> float:
    """Area (Girard excess) of the spherical triangle abc, via l'Huilier.

    l'Huilier's formula evaluates the same angle-sum excess from the side
    lengths, and stays accurate for the nearly degenerate triangles that
    large hulls produce.
    """
    la = geodesic_distance(b, c)
    lb = geodesic_distance(a, c)
    lc = geodesic_distance(a, b)
    s = 0.5 * (la + lb + lc)
    t = (math.tan(0.5 * s) * math.tan(0.5 * (s - la))
         * math.tan(0.5 * (s - lb)) * math.tan(0.5 * (s - lc)))
    if t <= 0.0:  # rounding near a degenerate triangle
        return 0.0
    return 4.0 * math.atan(math.sqrt(t))


def _facet_cap_weight(verts: np.ndarray) -> float:
    """Spherical-cap upper bound on a facet's size, used to split MC budget."""
    centre = verts.mean(axis=0)
    nrm = np.linalg.norm(centre)
    if nrm < 1e-12:
        return 1.0
    centre /= nrm
    r = math.acos(np.clip(verts @ centre, -1.0, 1.0).min())
    d = verts.shape[0]
    # cap measure on S^{d-1} up to a constant: integral of sin^{d-2}
    ts = np.linspace(0.0, r, 64)
    return float(np.trapezoid(np.sin(ts) ** (d - 2), ts)) + 1e-12


def _facet_solid_angle_mc(verts: np.ndarray, gen: np.random.Generator,
                          n_samples: int) -> tuple[float, float]:
    """MC estimate of the (d-1)-measure of one simplicial facet.

    Works in the facet's own d-dimensional linear span: uniform directions on
    that subspace's unit sphere, membership by nonnegativity of the
    coordinates in the vertex-ray basis.
    """
    d = verts.shape[0]
    q, _ = np.linalg.qr(verts.T)        # (d+1, d) orthonormal span basis
    local = verts @ q                    # vertex rays in span coordinates
    inv = np.linalg.inv(local.T)
    z = gen.standard_normal((n_samples, d))
    z /= np.linalg.norm(z, axis=1)[:, None]
    coeff = z @ inv.T
    p = float((coeff.min(axis=1) >= 0.0).mean())
    total = omega(d).value
    return total * p, total * math.sqrt(p * (1.0 - p) / n_samples)


def surface_area(poly: SphericalPolytope, rng=None,
                 mc_samples: int = 8192) -> FunctionalValue:
    """Total (d-1)-measure of the facets.

    Exact for d=2 (arc lengths) and d=3 (triangle excesses). For d >= 4 each
    facet's solid angle is estimated by subspace MC, with the sample budget
    split across facets proportionally to a spherical-cap bound on their
    size, and the per-facet errors pooled.
    """
    d = poly.d
    if d == 2:
        total = 0.0
        for i, j in poly.facet_vertices:
            total += geodesic_distance(poly.vertices[i], poly.vertices[j])
        return FunctionalValue(kind="surface_area", value=total)
    if d == 3:
        total = 0.0
        for i, j, k in poly.facet_vertices:
            total += spherical_triangle_excess(
                poly.vertices[i], poly.vertices[j], poly.vertices[k])
        return FunctionalValue(kind="surface_area", value=total)

    if rng is None:
        raise ValueError("surface_area needs an rng for d >= 4")
    gen = as_generator(rng)
    weights = np.array([_facet_cap_weight(poly.vertices[row])
                        for row in poly.facet_vertices])
    weights /= weights.sum()
    budgets = np.maximum((weights * mc_samples).astype(int), 32)
    total = 0.0
    var = 0.0
    used = 0
    for row, n_f in zip(poly.facet_vertices, budgets):
        est, err = _facet_solid_angle_mc(poly.vertices[row], gen, int(n_f))
        total += est
        var += err * err
        used += int(n_f)
    return FunctionalValue(kind="surface_area", value=total,
                           stderr=math.sqrt(var), samples_used=used)


def _ordered_polygon(poly: SphericalPolytope) -> np.ndarray:
    """Vertices of a d=2 polytope in cyclic order (via the chart)."""
    c = poly.interior_direction
    heights = poly.vertices @ c
    chart = poly.vertices / heights[:, None] - c
    # project out c and order by angle around the chart centroid
    chart -= np.outer(chart @ c, c)
    centred = chart - chart.mean(axis=0)
    ref = centred[0] / np.linalg.norm(centred[0])
    other = np.cross(c, ref)
    ang = np.arctan2(centred @ other, centred @ ref)
    return poly.vertices[np.argsort(ang)]


class VolumeResult(NamedTuple):
    volume: FunctionalValue
    missed: FunctionalValue


def spherical_volume(poly: SphericalPolytope, rng=None,
                     mc_samples: int = 4096,
                     pole: PoleFrame | None = None) -> VolumeResult:
    """Spherical volume of the polytope and missed volume of its halfsphere.

    d=2: exact polygon excess (fan triangulation, angle-sum area). d >= 3:
    membership MC conditional on the halfsphere, i.e. uniform points on the
    pole's halfsphere (which must contain the polytope) scaled by its
    measure. missed = (half sphere measure) - volume in both cases.
    """
    d = poly.d
    half = omega(d + 1).value / 2.0
    if d == 2:
        ordered = _ordered_polygon(poly)
        area = 0.0
        for i in range(1, len(ordered) - 1):
            area += spherical_triangle_excess(ordered[0], ordered[i], ordered[i + 1])
        return VolumeResult(
            volume=FunctionalValue(kind="volume", value=area),
            missed=FunctionalValue(kind="missed_volume", value=half - area),
        )

    if rng is None:
        raise ValueError("spherical_volume needs an rng for d >= 3")
    if pole is None:
        pole = PoleFrame.standard(d)
    gen = as_generator(rng)
    sample = sample_uniform_halfsphere(d, mc_samples, pole=pole, rng=gen)
    p = float(contains_batch(poly, sample.points).mean())
    err = half * math.sqrt(p * (1.0 - p) / mc_samples)
    return VolumeResult(
        volume=FunctionalValue(kind="volume", value=half * p, stderr=err,
                               samples_used=mc_samples),
        missed=FunctionalValue(kind="missed_volume", value=half * (1.0 - p),
                               stderr=err, samples_used=mc_samples),
    )


class MeanWidthResult(NamedTuple):
    hit: FunctionalValue    # primary estimator
    dual: FunctionalValue   # cross-check estimator

    @property
    def value(self) -> float:
        return self.hit.value


def mean_width(poly: SphericalPolytope, rng, mc_samples: int = 4096) -> MeanWidthResult:
    """Spherical mean width: half the hitting probability of a random great subsphere.

    Two estimators from independent direction batches:
    (a) hit counting - v^perp meets the polytope iff the vertex inner
        products against v take both signs (tangency counts as a hit);
    (b) dual cone - the complement probability is twice the spherical
        measure fraction of the dual cone, estimated by membership MC.
    """
    gen = as_generator(rng)
    m = poly.n_vertices
    dirs = gen.standard_normal((2 * mc_samples, poly.d + 1))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    prods_a = dirs[:mc_samples] @ poly.vertices.T
    hits = (prods_a.min(axis=1) <= 0.0) & (prods_a.max(axis=1) >= 0.0)
    p_hit = float(hits.mean())
    hit_fv = FunctionalValue(
        kind="mean_width", value=0.5 * p_hit,
        stderr=0.5 * math.sqrt(p_hit * (1.0 - p_hit) / mc_samples),
        samples_used=mc_samples,
    )
    prods_b = dirs[mc_samples:] @ poly.vertices.T
    q = float((prods_b.min(axis=1) >= 0.0).mean())
    dual_fv = FunctionalValue(
        kind="mean_width_dual", value=0.5 - q,
        stderr=math.sqrt(q * (1.0 - q) / mc_samples),
        samples_used=mc_samples,
    )
    return MeanWidthResult(hit=hit_fv, dual=dual_fv)


def hausdorff_to_halfsphere(poly: SphericalPolytope,
                            pole: PoleFrame) -> FunctionalValue:
    """Hausdorff distance between the polytope and its halfsphere.

    For a polytope containing the pole the distance is realized against the
    halfsphere boundary, and equals the largest angle any supporting
    direction makes with the pole: supporting directions form the dual cone,
    <e,.>/||.|| is quasiconcave where positive, so its minimum over the dual
    cone is attained at an extreme ray, which is a facet inward normal.
    Hence delta = max_n arccos<n, e> over facet normals n.

    When some facet normal has <n,e> < 0 the pole lies outside the polytope;
    the formula no longer applies and the value pi/2 is returned flagged as a
    lower bound (delta >= pi/2 in that regime).
    """
    heights = poly.facet_normals @ pole.e
    low = float(heights.min())
    if low < -HULL_EPS:
        return FunctionalValue(kind="hausdorff", value=math.pi / 2.0,
                               lower_bound_only=True)
    return FunctionalValue(kind="hausdorff",
                           value=math.acos(min(1.0, max(-1.0, low))))


def sandwich_bounds(d: int, delta: float) -> tuple[float, float]:
    """Lower and upper bounds on the missed volume in terms of delta."""
    lower = omega(d + 1).value / (2.0 * math.pi) * delta
    upper = omega(d).value * delta
    return lower, upper
