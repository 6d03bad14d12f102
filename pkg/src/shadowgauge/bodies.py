"""Origin-symmetric convex bodies: zonotopes, Euclidean balls and facet bodies.

Every body exposes its support function and, when polytopal, an exact
discrete surface area measure (unit facet normals weighted by facet volume).
All objects are immutable; array fields are stored read-only.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    DegenerateBodyError,
    DimensionMismatchError,
    GeneratorCapError,
    GeometryError,
    InconsistentMeasureError,
    UnsupportedMeasureError,
)

DIRECTION_TOL = 1e-10
MIN_FACET_VOLUME = 1e-12
UNIT_TOL = 1e-12
BALANCE_TOL = 1e-9
SELF_CONSISTENCY_TOL = 1e-9
DEFAULT_GENERATOR_CAP = 20


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def normalize(x) -> np.ndarray:
    """Return ``x / |x|``; zero vectors are rejected."""
    v = np.asarray(x, dtype=float)
    r = np.linalg.norm(v)
    if not np.isfinite(r) or r == 0.0:
        raise GeometryError("cannot normalize a zero or non-finite vector")
    return v / r


def as_direction(x) -> np.ndarray:
    """Validate a unit vector of dimension >= 2 and return it as an array."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise GeometryError(f"direction must be a vector of length >= 2, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise GeometryError(f"direction is not a unit vector (norm {np.linalg.norm(v)!r})")
    return v


def pin_sign(u: np.ndarray) -> np.ndarray:
    """Orient a line representative so its largest-magnitude coordinate is positive."""
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        return u if u[np.argmax(np.abs(u))] >= 0 else -u
    idx = np.argmax(np.abs(u), axis=1)
    signs = np.sign(u[np.arange(len(u)), idx])
    signs[signs == 0] = 1.0
    return u * signs[:, None]


def _merge_directions(normals: np.ndarray, areas: np.ndarray, *, lines: bool):
    """Greedy merge of near-parallel normals, summing their weights.

    With ``lines=True`` antiparallel normals are treated as the same line
    (``|dot| > 1 - tol``); otherwise only ``dot > 1 - tol`` merges.
    First occurrence wins as representative, so the output is deterministic.
    """
    m = len(normals)
    assigned = np.zeros(m, dtype=bool)
    out_u, out_a = [], []
    for i in range(m):
        if assigned[i]:
            continue
        dots = normals[i:] @ normals[i]
        close = np.abs(dots) if lines else dots
        group = (close > 1.0 - DIRECTION_TOL) & ~assigned[i:]
        idx = np.nonzero(group)[0] + i
        assigned[idx] = True
        out_u.append(normals[i])
        out_a.append(math.fsum(areas[idx]))
    n = normals.shape[1] if normals.ndim == 2 else 0
    return np.array(out_u, dtype=float).reshape(-1, n), np.array(out_a, dtype=float)


def _antipodes(normals: np.ndarray) -> np.ndarray:
    """Index of the antipodal atom for each normal, or -1 when none exists."""
    m = len(normals)
    result = np.full(m, -1, dtype=int)
    block = 1024
    for start in range(0, m, block):
        dots = normals[start:start + block] @ normals.T
        j = np.argmin(dots, axis=1)
        ok = dots[np.arange(len(j)), j] < -1.0 + DIRECTION_TOL
        result[start:start + block] = np.where(ok, j, -1)
    return result


@dataclass(frozen=True, eq=False)
class FacetMeasure:
    """Discrete, origin-symmetric surface area measure.

    ``normals[i]`` is a unit facet normal and ``areas[i]`` the
    (n-1)-volume of the corresponding facet.
    """

    normals: np.ndarray
    areas: np.ndarray
    antipode: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        normals = _frozen(self.normals)
        areas = _frozen(self.areas)
        if normals.ndim != 2 or normals.shape[1] < 2:
            raise GeometryError(f"normals must be an (m, n) array with n >= 2, got {normals.shape}")
        if areas.shape != (normals.shape[0],):
            raise GeometryError("one area per normal required")
        if np.any(areas <= 0):
            raise InconsistentMeasureError("atom volumes must be positive")
        if np.any(np.abs(np.linalg.norm(normals, axis=1) - 1.0) > UNIT_TOL):
            raise GeometryError("atom normals must be unit vectors")
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "areas", areas)

        gram = normals @ normals.T
        np.fill_diagonal(gram, -2.0)
        if np.any(gram > 1.0 - DIRECTION_TOL):
            raise InconsistentMeasureError("two atoms share the same normal direction")

        anti = _antipodes(normals)
        if np.any(anti < 0):
            raise InconsistentMeasureError("measure is not origin-symmetric: missing antipodal atom")
        partner = areas[anti]
        if np.any(np.abs(areas - partner) > SELF_CONSISTENCY_TOL * np.maximum(areas, partner)):
            raise InconsistentMeasureError("antipodal atoms carry different volumes")
        anti.setflags(write=False)
        object.__setattr__(self, "antipode", anti)

        resultant = np.linalg.norm(areas @ normals)
        if resultant > BALANCE_TOL * math.fsum(areas):
            raise InconsistentMeasureError(f"Minkowski balance violated (|sum a_i u_i| = {resultant:.3e})")

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def total(self) -> float:
        return math.fsum(self.areas)

    def __len__(self) -> int:
        return len(self.areas)

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """One sign-pinned normal and its area per antipodal pair."""
        keep = np.arange(len(self)) < self.antipode
        return pin_sign(self.normals[keep]), self.areas[keep].copy()


def canonicalize_measure(atoms: Iterable[tuple[Sequence[float], float]]) -> FacetMeasure:
    """Build a validated measure from raw ``(normal, volume)`` atoms.

    Normals are normalized, atoms pointing the same way are merged and
    atoms below ``MIN_FACET_VOLUME`` are dropped.
    """
    atoms = list(atoms)
    if not atoms:
        raise InconsistentMeasureError("empty measure")
    normals = np.array([np.asarray(u, dtype=float) for u, _ in atoms])
    areas = np.array([float(a) for _, a in atoms])
    if np.any(np.linalg.norm(normals, axis=1) == 0):
        raise GeometryError("atom normals must be nonzero")
    normals = normals / np.linalg.norm(normals, axis=1)[:, None]
    normals, areas = _merge_directions(normals, areas, lines=False)
    keep = areas >= MIN_FACET_VOLUME
    if not np.any(keep):
        raise InconsistentMeasureError("all atoms have negligible volume")
    return FacetMeasure(normals[keep], areas[keep])


def measure_sum(first: FacetMeasure, second: FacetMeasure) -> FacetMeasure:
    """Blaschke sum: the measure whose atoms are the union of both, merged by direction."""
    if first.dim != second.dim:
        raise DimensionMismatchError("measures live in different dimensions")
    normals = np.vstack([first.normals, second.normals])
    areas = np.concatenate([first.areas, second.areas])
    return canonicalize_measure(zip(normals, areas))


def _measure_from_lines(normals: np.ndarray, areas: np.ndarray) -> FacetMeasure:
    """Symmetric measure from one (normal, volume) per line, merging parallel lines."""
    normals, areas = _merge_directions(pin_sign(normals), areas, lines=True)
    keep = areas >= MIN_FACET_VOLUME
    normals, areas = normals[keep], areas[keep]
    if not len(areas):
        raise DegenerateBodyError("body has no facets")
    return FacetMeasure(np.vstack([normals, -normals]), np.concatenate([areas, areas]))


@dataclass(frozen=True, eq=False)
class Zonotope:
    """Minkowski sum of the centered segments ``[-v_j, v_j]``."""

    generators: np.ndarray
    dim: int | None = None
    cap: int = DEFAULT_GENERATOR_CAP

    def __post_init__(self):
        gens = np.asarray(self.generators, dtype=float)
        if gens.size == 0:
            if self.dim is None:
                raise GeometryError("dim is required for a zonotope without generators")
            gens = gens.reshape(0, self.dim)
        if gens.ndim != 2:
            raise GeometryError(f"generators must be an (m, n) array, got shape {gens.shape}")
        if self.dim is not None and gens.shape[1] != self.dim:
            raise DimensionMismatchError(f"generators have dimension {gens.shape[1]}, expected {self.dim}")
        if gens.shape[1] < 1:
            raise GeometryError("zonotope dimension must be positive")
        if not np.all(np.isfinite(gens)):
            raise GeometryError("generators must be finite")
        if len(gens) > self.cap:
            raise GeneratorCapError(f"{len(gens)} generators exceed the cap of {self.cap}")
        object.__setattr__(self, "generators", _frozen(gens))
        object.__setattr__(self, "dim", gens.shape[1])

    @property
    def rank(self) -> int:
        if len(self.generators) == 0:
            return 0
        return int(np.linalg.matrix_rank(self.generators))

    @property
    def full_rank(self) -> bool:
        return self.rank == self.dim

    def support_many(self, xs: np.ndarray) -> np.ndarray:
        return np.abs(np.asarray(xs, dtype=float) @ self.generators.T).sum(axis=-1)

    @cached_property
    def measure(self) -> FacetMeasure:
        return _zonotope_measure(self)

    def require_full_rank(self):
        if not self.full_rank:
            raise DegenerateBodyError(f"generators span a {self.rank}-dimensional subspace of R^{self.dim}")


@dataclass(frozen=True, eq=False)
class Ball:
    dim: int
    radius: float = 1.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise GeometryError("ball dimension must be an integer >= 2")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise GeometryError("ball radius must be positive and finite")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "radius", float(self.radius))

    def support_many(self, xs: np.ndarray) -> np.ndarray:
        return self.radius * np.linalg.norm(np.asarray(xs, dtype=float), axis=-1)


@dataclass(frozen=True, eq=False)
class FacetBody:
    """Polytope given by its vertices and its facet measure.

    ``offsets[i]`` is the support value at ``measure.normals[i]``.
    """

    vertices: np.ndarray
    measure: FacetMeasure
    offsets: np.ndarray

    def __post_init__(self):
        verts = _frozen(self.vertices)
        offsets = _frozen(self.offsets)
        n = self.measure.dim
        if verts.ndim != 2 or verts.shape[1] != n:
            raise DimensionMismatchError("vertices and measure disagree on dimension")
        if offsets.shape != (len(self.measure),):
            raise GeometryError("one offset per measure atom required")
        scale = np.abs(verts).max()
        mirror = np.linalg.norm(verts[:, None, :] + verts[None, :, :], axis=2).min(axis=1)
        if np.any(mirror > SELF_CONSISTENCY_TOL * scale):
            raise InconsistentMeasureError("vertex set is not origin-symmetric")
        support = (self.measure.normals @ verts.T).max(axis=1)
        if np.any(np.abs(support - offsets) > SELF_CONSISTENCY_TOL * np.maximum(np.abs(support), scale)):
            raise InconsistentMeasureError("offsets disagree with the vertex support function")
        if math.fsum(offsets * self.measure.areas) <= 0:
            raise InconsistentMeasureError("pyramid volume must be positive")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "offsets", offsets)

    @property
    def dim(self) -> int:
        return self.measure.dim

    def support_many(self, xs: np.ndarray) -> np.ndarray:
        return (np.asarray(xs, dtype=float) @ self.vertices.T).max(axis=-1)


Body = Union[Zonotope, Ball, FacetBody]


def _check_vector(body: Body, x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape[-1:] != (body.dim,):
        raise DimensionMismatchError(f"expected vectors of dimension {body.dim}, got shape {v.shape}")
    return v


def support(body: Body, x) -> float:
    """Support function ``max_{y in body} <x, y>``."""
    return float(body.support_many(_check_vector(body, x)))


def support_many(body: Body, xs) -> np.ndarray:
    """Vectorized support function over the last axis of ``xs``."""
    return body.support_many(_check_vector(body, xs))


def _zonotope_measure(z: Zonotope) -> FacetMeasure:
    if z.dim < 2:
        raise UnsupportedMeasureError("surface measures need dimension >= 2")
    z.require_full_rank()
    n = z.dim
    gens = z.generators
    norms = np.linalg.norm(gens, axis=1)
    gens = gens[norms > 0]
    norms = norms[norms > 0]
    subsets = np.array(list(itertools.combinations(range(len(gens)), n - 1)), dtype=int)
    blocks = gens[subsets]  # (s, n-1, n)
    # Generalized cross product: cofactor expansion along an appended row.
    cof = np.empty((len(subsets), n))
    for k in range(n):
        minor = np.delete(blocks, k, axis=2)
        cof[:, k] = (-1) ** k * np.linalg.det(minor)
    size = np.linalg.norm(cof, axis=1)
    independent = size > 1e-10 * np.prod(norms[subsets], axis=1)
    cof, size = cof[independent], size[independent]
    return _measure_from_lines(cof / size[:, None], 2.0 ** (n - 1) * size)


def surface_measure(body: Body) -> FacetMeasure:
    """Exact discrete surface area measure of a polytopal body."""
    if isinstance(body, Ball):
        raise UnsupportedMeasureError("the ball has a continuous surface area measure")
    return body.measure


def make_cross_polytope(n: int, s: float = 1.0) -> FacetBody:
    """``s * conv(+-e_1, ..., +-e_n)``."""
    if n < 2:
        raise GeometryError("cross-polytope needs n >= 2")
    if not s > 0:
        raise GeometryError("scale must be positive")
    eye = np.eye(n)
    vertices = s * np.vstack([eye, -eye])
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    normals = signs / math.sqrt(n)
    area = s ** (n - 1) * math.sqrt(n) / math.factorial(n - 1)
    measure = FacetMeasure(normals, np.full(len(normals), area))
    return FacetBody(vertices, measure, np.full(len(normals), s / math.sqrt(n)))


def make_box(half_widths: Sequence[float]) -> Zonotope:
    """Axis-parallel box ``prod [-w_k, w_k]`` as a zonotope."""
    return Zonotope(np.diag(np.asarray(half_widths, dtype=float)))


def scale(body: Body, t: float) -> Body:
    """Homothetic copy ``t * body`` for ``t > 0``."""
    if not t > 0:
        raise GeometryError("scale factor must be positive")
    if isinstance(body, Ball):
        return Ball(body.dim, body.radius * t)
    if isinstance(body, Zonotope):
        return Zonotope(body.generators * t, dim=body.dim, cap=body.cap)
    m = body.measure
    return FacetBody(body.vertices * t, FacetMeasure(m.normals, m.areas * t ** (body.dim - 1)), body.offsets * t)


def rotate(body: Body, u) -> Body:
    """Image of ``body`` under the orthogonal matrix ``u``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (body.dim, body.dim):
        raise DimensionMismatchError("rotation matrix has the wrong shape")
    if isinstance(body, Ball):
        return body
    if isinstance(body, Zonotope):
        return Zonotope(body.generators @ u.T, dim=body.dim, cap=body.cap)
    m = body.measure
    normals = m.normals @ u.T
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    return FacetBody(body.vertices @ u.T, FacetMeasure(normals, m.areas), body.offsets)


# -- JSON interchange -------------------------------------------------------

def body_to_dict(body: Body) -> dict:
    if isinstance(body, Zonotope):
        return {"type": "zonotope", "dim": body.dim, "generators": body.generators.tolist()}
    if isinstance(body, Ball):
        return {"type": "ball", "dim": body.dim, "radius": body.radius}
    return {
        "type": "facet_body",
        "dim": body.dim,
        "vertices": body.vertices.tolist(),
        "atoms": [
            {"u": u.tolist(), "a": float(a), "h": float(h)}
            for u, a, h in zip(body.measure.normals, body.measure.areas, body.offsets)
        ],
    }


def body_from_dict(data: dict) -> Body:
    """Parse one body descriptor; raises ``GeometryError`` on malformed input."""
    try:
        kind = data["type"]
        dim = int(data["dim"])
        if kind == "zonotope":
            return Zonotope(np.asarray(data["generators"], dtype=float), dim=dim)
        if kind == "ball":
            return Ball(dim, float(data["radius"]))
        if kind == "cross_polytope":
            return make_cross_polytope(dim, float(data.get("scale", 1.0)))
        if kind == "facet_body":
            atoms = data["atoms"]
            measure = FacetMeasure(
                np.array([a["u"] for a in atoms], dtype=float),
                np.array([a["a"] for a in atoms], dtype=float),
            )
            body = FacetBody(np.asarray(data["vertices"], dtype=float), measure,
                             np.array([a["h"] for a in atoms], dtype=float))
            if body.dim != dim:
                raise DimensionMismatchError("declared dim disagrees with the atoms")
            return body
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GeometryError):
            raise
        raise GeometryError(f"malformed body descriptor: {exc}") from exc
    raise GeometryError(f"unknown body type {kind!r}")


def load_bodies(path: str | Path) -> list[Body]:
    """Read a JSON file holding one body descriptor or a list of them."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = [data]
    return [body_from_dict(d) for d in data]
