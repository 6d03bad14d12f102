"""Hyperplane shadows, projection bodies and minimization over the sphere.

Shadow volumes of polytopal bodies use the Cauchy projection formula
``|K | xi^perp| = (1/2) sum_i a_i |<xi, u_i>|`` over the facet measure;
for zonotopes this is cross-checked against the determinant volume of the
explicitly projected zonotope.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import norm, qmc

from .bodies import (
    DEFAULT_GENERATOR_CAP,
    Ball,
    Body,
    FacetMeasure,
    Zonotope,
    normalize,
    pin_sign,
    surface_measure,
)
from .calculus import surface_area, unit_ball_volume
from .errors import DimensionMismatchError, EvaluationError, GeometryError


def orthobasis(xi) -> np.ndarray:
    """Orthonormal basis of ``xi^perp`` as the columns of an ``(n, n-1)`` array.

    Uses the Householder reflection sending ``xi`` to ``s e_k``, where ``k`` is
    the largest-magnitude coordinate and ``s`` its sign; the remaining columns
    of the reflection span the complement. Deterministic for a given ``xi``.
    """
    xi = normalize(xi)
    n = xi.size
    k = int(np.argmax(np.abs(xi)))
    s = 1.0 if xi[k] >= 0 else -1.0
    w = xi.copy()
    w[k] -= s
    ww = w @ w
    h = np.eye(n)
    if ww > 0:
        h -= 2.0 * np.outer(w, w) / ww
    return np.delete(h, k, axis=1)


def project_zonotope(z: Zonotope, xi) -> Zonotope:
    """``Z | xi^perp`` in the coordinates of :func:`orthobasis`; zero generators are dropped."""
    if xi is None or np.asarray(xi).shape != (z.dim,):
        raise DimensionMismatchError(f"direction must have dimension {z.dim}")
    basis = orthobasis(xi)
    coords = z.generators @ basis
    lengths = np.linalg.norm(coords, axis=1)
    scale = np.linalg.norm(z.generators, axis=1).max(initial=0.0)
    keep = lengths > 1e-12 * scale
    return Zonotope(coords[keep], dim=z.dim - 1, cap=z.cap)


def projection_volume_many(body: Body, xs) -> np.ndarray:
    """Shadow volumes ``|body | xi^perp|`` for each row of ``xs``."""
    xs = np.asarray(xs, dtype=float)
    if xs.shape[-1] != body.dim:
        raise DimensionMismatchError(f"directions must have dimension {body.dim}")
    if isinstance(body, Ball):
        value = body.radius ** (body.dim - 1) * unit_ball_volume(body.dim - 1)
        return np.full(xs.shape[:-1], value)
    m = surface_measure(body)
    return 0.5 * np.abs(xs @ m.normals.T) @ m.areas


def projection_volume(body: Body, xi) -> float:
    return float(projection_volume_many(body, xi))


def projection_body_of_measure(measure: FacetMeasure) -> Zonotope:
    """Zonotope with one generator ``a_k u_k`` per antipodal atom pair.

    Its support function is the Cauchy shadow function of the measure.
    """
    normals, areas = measure.pairs()
    return Zonotope(normals * areas[:, None], dim=measure.dim, cap=max(DEFAULT_GENERATOR_CAP, len(areas)))


def projection_body(body: Body) -> Body:
    """Body whose support function is the shadow volume function of ``body``."""
    if isinstance(body, Ball):
        n = body.dim
        return Ball(n, body.radius ** (n - 1) * unit_ball_volume(n - 1))
    return projection_body_of_measure(surface_measure(body))


def projection_surface_area(z: Zonotope, xi) -> float:
    """Surface area of the shadow ``Z | xi^perp`` (an (n-1)-dimensional zonotope)."""
    if z.dim < 3:
        raise GeometryError("shadow surface area is defined here for n >= 3 only")
    return surface_area(project_zonotope(z, xi))


def projection_surface_area_many(body: Body, xs) -> np.ndarray:
    """Vectorized shadow surface area for zonotopes and balls.

    For a zonotope each (n-2)-subset ``J`` of shadow generators
    ``w = v - (v . xi) xi`` contributes ``2^{n-1} sqrt(det(Gram(w_J)))``.
    The projection is applied before forming the Gram matrix: updating
    ``Gram(v_J)`` by ``-p p^T`` cancels when ``xi`` is close to the span
    of ``v_J``, which is exactly where minimizers tend to sit.
    """
    xs = np.asarray(xs, dtype=float)
    n = body.dim
    if n < 3:
        raise GeometryError("shadow surface area is defined here for n >= 3 only")
    if xs.shape[-1] != n:
        raise DimensionMismatchError(f"directions must have dimension {n}")
    if isinstance(body, Ball):
        value = (n - 1) * unit_ball_volume(n - 1) * body.radius ** (n - 2)
        return np.full(xs.shape[:-1], value)
    if not isinstance(body, Zonotope):
        raise GeometryError("shadow surface area needs a zonotope or a ball")
    flat = xs.reshape(-1, n)
    gens = body.generators
    subsets = np.array(list(itertools.combinations(range(len(gens)), n - 2)), dtype=int)
    out = np.empty(len(flat))
    chunk = max(1, 100_000 // max(1, len(subsets) * (n - 2)))
    for start in range(0, len(flat), chunk):
        x = flat[start:start + chunk]
        w = gens[None] - (gens @ x.T).T[..., None] * x[:, None, :]  # (x, m, n)
        blocks = w[:, subsets]  # (x, s, n-2, n)
        dets = np.linalg.det(blocks @ blocks.swapaxes(-1, -2))
        out[start:start + chunk] = np.sqrt(np.clip(dets, 0.0, None)).sum(axis=1)
    return (2.0 ** (n - 1) * out).reshape(xs.shape[:-1])


# -- sphere minimization ----------------------------------------------------

POLL_ROTATIONS = 3

@dataclass(frozen=True)
class SphereSearchConfig:
    coarse_samples: int | None = None
    restarts: int = 8
    shrink_tol: float = 1e-7
    max_iterations: int = 20_000

    def samples_for(self, n: int) -> int:
        if self.coarse_samples is not None:
            return self.coarse_samples
        return 2 ** (13 + min(max(n - 4, 0), 5))

    def finer(self, n: int, factor: int = 8) -> "SphereSearchConfig":
        """Same search with ``factor`` times more coarse samples."""
        return SphereSearchConfig(self.samples_for(n) * factor, self.restarts,
                                  self.shrink_tol, self.max_iterations)


@dataclass(frozen=True)
class SphereMinResult:
    argmin: np.ndarray
    value: float
    evaluations: int
    refinement_radius: float


def hemisphere_points(n: int, count: int) -> np.ndarray:
    """Deterministic low-discrepancy points on the upper half of ``S^{n-1}``.

    A scrambled Sobol sequence (fixed seed) is pushed through the normal
    quantile function and normalized; each point is mirrored so that its
    largest-magnitude coordinate is positive.
    """
    sobol = qmc.Sobol(d=n, scramble=True, seed=0x5EED)
    with warnings.catch_warnings():
        # non-power-of-two counts only lose the balance property
        warnings.simplefilter("ignore", UserWarning)
        u = sobol.random(count)
    x = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    x /= np.linalg.norm(x, axis=1)[:, None]
    return pin_sign(x)


def _pattern(d: int) -> np.ndarray:
    eye = np.eye(d)
    dirs = [eye, -eye]
    for i, j in itertools.combinations(range(d), 2):
        for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            v = np.zeros(d)
            v[i], v[j] = si, sj
            dirs.append((v / math.sqrt(2))[None])
    return np.vstack(dirs)


def _random_rotation(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def _checked(values) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise EvaluationError("objective returned a non-finite value")
    return values


def min_over_sphere(
    f: Callable,
    n: int,
    cfg: SphereSearchConfig | None = None,
    *,
    batch: bool = False,
) -> SphereMinResult:
    """Multi-start derivative-free minimization of an even function on ``S^{n-1}``.

    ``f`` takes one unit vector, or an ``(m, n)`` array of them when
    ``batch=True``. The coarse stage scans a hemisphere sample plus the
    coordinate axes; the best ``cfg.restarts`` points are then refined by
    compass search in the tangent space with geometric step shrinking.
    """
    cfg = cfg or SphereSearchConfig()
    if n < 2:
        raise GeometryError("sphere dimension must be at least 2")
    if cfg.restarts < 1 or cfg.shrink_tol <= 0 or cfg.samples_for(n) < 1:
        raise ValueError("search configuration must be positive")

    def evaluate(xs: np.ndarray) -> np.ndarray:
        if batch:
            return _checked(f(xs))
        return _checked([f(x) for x in xs])

    count = cfg.samples_for(n)
    coarse = np.vstack([np.eye(n), hemisphere_points(n, count)])
    values = evaluate(coarse)
    evaluations = len(coarse)
    order = np.argsort(values, kind="stable")[: cfg.restarts]

    pattern = _pattern(n - 1)
    step0 = min(0.5, 4.0 * count ** (-1.0 / (n - 1)))
    best_x, best_v, best_h = coarse[order[0]], float(values[order[0]]), step0
    for rank, idx in enumerate(order):
        # a failed poll also rotates the pattern, so poll directions become
        # dense and the search can follow ridges of non-smooth objectives
        rng = np.random.Generator(np.random.Philox(key=rank))
        x, fx, h, frame, misses = coarse[idx], float(values[idx]), step0, pattern, 0
        for _ in range(cfg.max_iterations):
            if h <= cfg.shrink_tol:
                break
            cand = x + h * (frame @ orthobasis(x).T)
            cand /= np.linalg.norm(cand, axis=1)[:, None]
            vals = evaluate(cand)
            evaluations += len(cand)
            j = int(np.argmin(vals))
            if vals[j] < fx:
                x, fx = cand[j], float(vals[j])
                h, misses = min(2.0 * h, step0), 0
            else:
                misses += 1
                if misses >= POLL_ROTATIONS:
                    h, misses = 0.5 * h, 0
                frame = pattern @ _random_rotation(rng, n - 1)
        if fx < best_v:
            best_x, best_v, best_h = x, fx, h
    return SphereMinResult(pin_sign(best_x), best_v, evaluations, best_h)
