"""Core spherical geometry: points on S^d, halfsphere sampling, charts.

The sphere S^d is the unit sphere of R^{d+1}. A pole direction e fixes the
closed halfsphere {x : <x,e> >= 0}; the uniform probability measure on it is
the normalized surface measure. Everything here is dimension-generic for
2 <= d <= 6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NearHorizon, UnsupportedDimension

MIN_DIM = 2
MAX_DIM = 6

UNIT_TOL = 1e-12
HORIZON_EPS = 1e-9

_U64 = (1 << 64) - 1


def validate_dim(d: int) -> int:
    if not isinstance(d, (int, np.integer)) or not (MIN_DIM <= d <= MAX_DIM):
        raise UnsupportedDimension(
            f"dimension d={d!r} outside supported range [{MIN_DIM}, {MAX_DIM}]"
        )
    return int(d)


def unit_vector(coords) -> np.ndarray:
    """Normalize coords to a unit vector (float64 copy)."""
    v = np.asarray(coords, dtype=float).ravel()
    nrm = float(np.linalg.norm(v))
    if nrm < UNIT_TOL:
        raise ValueError("cannot normalize a (near) zero vector")
    return v / nrm


def geodesic_distance(x, y) -> float:
    """Great-circle distance arccos(<x,y>), inner product clamped to [-1,1]."""
    t = float(np.dot(np.asarray(x, dtype=float), np.asarray(y, dtype=float)))
    return math.acos(min(1.0, max(-1.0, t)))


def _complement_basis(e: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of e^perp, rows of shape (d, d+1).

    Householder reflection mapping the last coordinate axis to e; the images
    of the first d axes then span e^perp.
    """
    m = e.size
    last = np.zeros(m)
    last[-1] = 1.0
    w = e - last
    wn = np.linalg.norm(w)
    if wn < 1e-14:
        return np.eye(m)[:-1]
    w = w / wn
    basis = np.eye(m)[:-1] - 2.0 * np.outer(np.eye(m)[:-1] @ w, w)
    return basis


@dataclass(frozen=True)
class PoleFrame:
    """A pole e on S^d together with an orthonormal basis of e^perp."""

    e: np.ndarray
    basis: np.ndarray  # shape (d, d+1), rows orthonormal, all orthogonal to e

    def __post_init__(self):
        frame = np.vstack([self.e, self.basis])
        gram = frame @ frame.T
        if not np.allclose(gram, np.eye(frame.shape[0]), atol=UNIT_TOL):
            raise ValueError("pole frame is not orthonormal within 1e-12")

    @property
    def d(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def standard(cls, d: int) -> "PoleFrame":
        """Pole at the last coordinate axis, basis = the first d axes."""
        d = validate_dim(d)
        eye = np.eye(d + 1)
        return cls(e=eye[-1], basis=eye[:-1])

    @classmethod
    def from_pole(cls, e) -> "PoleFrame":
        e = unit_vector(e)
        validate_dim(e.size - 1)
        return cls(e=e, basis=_complement_basis(e))


@dataclass(frozen=True)
class RandomSource:
    """Counter-based RNG identity: identical (seed, stream) -> identical draws.

    Philox streams are independent across stream indices, so replications can
    run in parallel without shared state. Instances are cheap; create one per
    (thread, replication).
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(
            entropy=self.seed & _U64, spawn_key=(self.stream & _U64,)
        )
        return np.random.Generator(np.random.Philox(ss))


def as_generator(rng) -> np.random.Generator:
    """Accept a RandomSource or an already-built Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RandomSource):
        return rng.generator()
    raise TypeError(f"expected RandomSource or numpy Generator, got {type(rng)!r}")


@dataclass(frozen=True)
class PointSample:
    """n uniform points in the closed halfsphere around pole.e."""

    points: np.ndarray  # shape (n, d+1), unit rows, <x, e> >= 0
    d: int
    pole: PoleFrame

    @property
    def n(self) -> int:
        return self.points.shape[0]


def sample_uniform_halfsphere(d: int, n: int, pole: PoleFrame | None = None,
                              rng=None) -> PointSample:
    """Draw n i.i.d. uniform points on the closed halfsphere.

    Isotropic Gaussian in d+1 coordinates, normalized to the sphere, then
    sign-flipped onto the pole's side. Points exactly on the boundary
    (<x,e> = 0) are kept; the halfsphere is closed.
    """
    d = validate_dim(d)
    if n < 1:
        raise ValueError("need n >= 1 sample points")
    if pole is None:
        pole = PoleFrame.standard(d)
    gen = as_generator(rng)
    pts = gen.standard_normal((n, d + 1))
    norms = np.linalg.norm(pts, axis=1)
    # zero rows have probability ~0 but would poison the normalization
    while np.any(norms < UNIT_TOL):
        bad = norms < UNIT_TOL
        pts[bad] = gen.standard_normal((int(bad.sum()), d + 1))
        norms = np.linalg.norm(pts, axis=1)
    pts /= norms[:, None]
    heights = pts @ pole.e
    pts[heights < 0.0] *= -1.0
    return PointSample(points=pts, d=d, pole=pole)


def wedge_measure(v, pole: PoleFrame) -> float:
    """Uniform measure of the halfsphere cut {x : <x,v> <= 0}.

    For v at angle alpha from the pole the cut has measure alpha/pi; this is
    what drives every expectation formula downstream.
    """
    return geodesic_distance(v, pole.e) / math.pi


def cross_section_map(x, c, basis: np.ndarray | None = None) -> np.ndarray:
    """Central projection of x onto the hyperplane <z,c> = 1, in c^perp coords.

    Returns the d coordinates of x/<x,c> - c in an orthonormal basis of
    c^perp. Raises NearHorizon when x is (numerically) 90 degrees from c.
    Works on a single point (shape (d+1,)) or a batch (n, d+1).
    """
    c = np.asarray(c, dtype=float)
    if basis is None:
        basis = _complement_basis(c)
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    heights = pts @ c
    if np.any(heights <= HORIZON_EPS):
        raise NearHorizon("point at or beyond the chart horizon (<x,c> <= 1e-9)")
    chart = (pts / heights[:, None]) @ basis.T
    return chart[0] if single else chart


def cross_section_inverse(z, c, basis: np.ndarray | None = None) -> np.ndarray:
    """Inverse of cross_section_map: lift chart coordinates back to S^d."""
    c = np.asarray(c, dtype=float)
    if basis is None:
        basis = _complement_basis(c)
    zz = np.asarray(z, dtype=float)
    single = zz.ndim == 1
    zz = np.atleast_2d(zz)
    lifted = c[None, :] + zz @ basis
    lifted /= np.linalg.norm(lifted, axis=1)[:, None]
    return lifted[0] if single else lifted
