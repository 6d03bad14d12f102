"""Brute-force verification routes independent of the measure calculus.

Membership uses the complete facet description of a zonotope; volumes are
estimated by rejection sampling in the bounding box. Planar offsets and
exact minima of zonotope support functions are computed by enumeration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bodies import Zonotope, surface_measure
from .errors import DegenerateBodyError, DimensionMismatchError, GeometryError

MEMBERSHIP_TOL = 1e-12
CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class HRep:
    """Symmetric slab description ``{x : |<x, u_i>| <= h_i for all i}``."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        normals = np.array(self.normals, dtype=float)
        offsets = np.array(self.offsets, dtype=float)
        if normals.ndim != 2 or offsets.shape != (len(normals),):
            raise GeometryError("HRep needs an (m, n) normal array and m offsets")
        if np.any(offsets <= 0):
            raise GeometryError("slab offsets must be positive")
        if np.linalg.matrix_rank(normals) < normals.shape[1]:
            raise DegenerateBodyError("slab normals do not span the space; the set is unbounded")
        normals.setflags(write=False)
        offsets.setflags(write=False)
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]


def zonotope_facets(z: Zonotope) -> HRep:
    """One slab per antipodal facet pair, offset = support value at the normal."""
    normals, _ = surface_measure(z).pairs()
    return HRep(normals, z.support_many(normals))


def contains_many(hrep: HRep, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if xs.shape[-1] != hrep.dim:
        raise DimensionMismatchError(f"points must have dimension {hrep.dim}")
    return np.all(np.abs(xs @ hrep.normals.T) <= hrep.offsets + MEMBERSHIP_TOL, axis=-1)


def contains(hrep: HRep, x) -> bool:
    return bool(contains_many(hrep, x))


def mc_volume(z: Zonotope, n_samples: int, seed: int) -> tuple[float, float]:
    """Rejection-sampling volume estimate with its binomial standard error.

    Sample blocks come from independent Philox streams (``seed`` as key,
    block index as jump count), so the result depends only on ``seed``
    and ``n_samples``.
    """
    if n_samples < 10_000:
        raise ValueError("mc_volume needs at least 10^4 samples")
    z.require_full_rank()
    hrep = zonotope_facets(z)
    half = np.abs(z.generators).sum(axis=0)
    box = float(np.prod(2.0 * half))
    base = np.random.Philox(seed)
    hits = 0
    for block, start in enumerate(range(0, n_samples, CHUNK)):
        size = min(CHUNK, n_samples - start)
        rng = np.random.Generator(base.jumped(block))
        pts = rng.uniform(-half, half, size=(size, z.dim))
        hits += int(np.count_nonzero(contains_many(hrep, pts)))
    p = hits / n_samples
    return box * p, box * math.sqrt(p * (1.0 - p) / n_samples)


def zonogon_vertices(p: Zonotope) -> np.ndarray:
    """Counterclockwise vertex cycle of a planar zonotope."""
    if p.dim != 2:
        raise DimensionMismatchError("zonogon_vertices expects a planar zonotope")
    p.require_full_rank()
    g = p.generators[np.linalg.norm(p.generators, axis=1) > 0]
    flip = (g[:, 1] < 0) | ((g[:, 1] == 0) & (g[:, 0] < 0))
    g = np.where(flip[:, None], -g, g)
    g = g[np.argsort(np.arctan2(g[:, 1], g[:, 0]), kind="stable")]
    edges = np.vstack([2 * g, -2 * g])
    start = -g.sum(axis=0)
    return start + np.vstack([np.zeros(2), np.cumsum(edges, axis=0)[:-1]])


def planar_offset_area(p: Zonotope, eps: float) -> tuple[float, float, float]:
    """``(|P|, perimeter(P), |P + eps B^2|)`` from the polygon itself.

    The offset region is the polygon plus a rectangle on every edge and a
    circular sector at every vertex whose angle is the measured turning
    angle there.
    """
    v = zonogon_vertices(p)
    nxt = np.roll(v, -1, axis=0)
    area = 0.5 * math.fsum(v[:, 0] * nxt[:, 1] - nxt[:, 0] * v[:, 1])
    edges = nxt - v
    lengths = np.linalg.norm(edges, axis=1)
    perimeter = math.fsum(lengths)
    prev = np.roll(edges, 1, axis=0)
    turning = np.arctan2(prev[:, 0] * edges[:, 1] - prev[:, 1] * edges[:, 0],
                         np.einsum("ij,ij->i", prev, edges))
    grown = area + perimeter * eps + 0.5 * eps * eps * math.fsum(turning)
    return area, perimeter, grown


def zonotope_support_min(z: Zonotope) -> tuple[float, np.ndarray]:
    """Exact minimum of ``h_Z`` on the unit sphere by enumeration.

    ``h_Z`` is linear on each cone cut out by the hyperplanes ``<x, v_j> = 0``,
    so its minimum over the sphere sits on a ray where ``n - 1`` independent
    such hyperplanes meet.
    """
    z.require_full_rank()
    n = z.dim
    gens = z.generators[np.linalg.norm(z.generators, axis=1) > 0]
    best, arg = math.inf, None
    for subset in itertools.combinations(range(len(gens)), n - 1):
        block = gens[list(subset)]
        _, s, vt = np.linalg.svd(block)
        if s[-1] <= 1e-12 * s[0]:
            continue
        xi = vt[-1]
        value = float(z.support_many(xi))
        if value < best:
            best, arg = value, xi
    return best, arg
