"""Volumes, surface areas and first mixed volumes.

Zonotope volume has two independent routes: the subset-determinant sum and
the pyramid sum ``(1/n) sum_i h(u_i) a_i`` over the surface area measure.
Tolerance policy: exact paths 1e-9 relative, closed forms 1e-12,
Monte Carlo 3 standard errors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy.special import gammaln

from .bodies import (
    Ball,
    Body,
    FacetMeasure,
    Zonotope,
    support_many,
    surface_measure,
)
from .errors import (
    DimensionMismatchError,
    GeneratorCapError,
    GeometryError,
    UnsupportedMeasureError,
)

EXACT_RTOL = 1e-9
CLOSED_FORM_RTOL = 1e-12
MC_SIGMAS = 3.0


def log_unit_ball_volume(n: int) -> float:
    """Natural log of the unit ball volume in ``R^n``; finite for any ``n``."""
    if int(n) != n or n <= 0:
        raise GeometryError("ball dimension must be a positive integer")
    return 0.5 * n * math.log(math.pi) - float(gammaln(0.5 * n + 1.0))


def unit_ball_volume(n: int) -> float:
    """Volume of the Euclidean unit ball in ``R^n``."""
    return math.exp(log_unit_ball_volume(n))


@dataclass(frozen=True)
class VolumeResult:
    value: float
    method: Literal["determinant", "pyramid", "closed_form", "monte_carlo"]
    stderr: float | None = None

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("volume cannot be negative")
        if (self.stderr is not None) != (self.method == "monte_carlo"):
            raise ValueError("stderr is reported for Monte Carlo volumes only")

    def __float__(self) -> float:
        return self.value


def determinant_volume(z: Zonotope) -> float:
    """``2^n sum_{|J|=n} |det V_J|``, accumulated with compensated summation."""
    z.require_full_rank()
    n = z.dim
    subsets = np.array(list(itertools.combinations(range(len(z.generators)), n)), dtype=int)
    dets = np.abs(np.linalg.det(z.generators[subsets]))
    return 2.0 ** n * math.fsum(dets)


def volume_from_measure(measure: FacetMeasure, support_at: Callable[[np.ndarray], float]) -> float:
    """Pyramid formula ``(1/n) sum_i h(u_i) a_i``."""
    h = np.array([support_at(u) for u in measure.normals], dtype=float)
    return math.fsum(h * measure.areas) / measure.dim


def volume(body: Body) -> VolumeResult:
    if isinstance(body, Ball):
        return VolumeResult(body.radius ** body.dim * unit_ball_volume(body.dim), "closed_form")
    if isinstance(body, Zonotope):
        return VolumeResult(determinant_volume(body), "determinant")
    value = math.fsum(body.offsets * body.measure.areas) / body.dim
    return VolumeResult(value, "pyramid")


def surface_area(body: Body) -> float:
    """Total mass of the surface area measure."""
    if isinstance(body, Ball):
        n = body.dim
        return n * unit_ball_volume(n) * body.radius ** (n - 1)
    return surface_measure(body).total


def _uniform_sphere(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    x = rng.standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1)[:, None]


def cauchy_surface_area(body: Body, n_samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo surface area from random shadow volumes.

    Averaging ``|body | xi^perp|`` over uniform directions and multiplying
    by ``n |B^n| / |B^{n-1}|`` gives an unbiased estimate of ``S(body)``.
    """
    from .shadows import projection_volume_many

    if n_samples < 1000:
        raise ValueError("cauchy_surface_area needs at least 1000 samples")
    n = body.dim
    rng = np.random.Generator(np.random.Philox(seed))
    shadows = projection_volume_many(body, _uniform_sphere(rng, n_samples, n))
    factor = n * unit_ball_volume(n) / unit_ball_volume(n - 1)
    samples = factor * shadows
    stderr = float(samples.std(ddof=1) / math.sqrt(n_samples))
    return float(samples.mean()), stderr


def _check_pair(k: Body, l: Body):
    if k.dim != l.dim:
        raise DimensionMismatchError(f"bodies live in R^{k.dim} and R^{l.dim}")
    if isinstance(k, Ball):
        raise UnsupportedMeasureError("first body must carry a discrete surface area measure")


def mixed_volume_v1(k: Body, l: Body) -> float:
    """``V_1(K, L) = (1/n) sum_i h_L(u_i) a_i`` over the facet measure of ``K``."""
    _check_pair(k, l)
    m = surface_measure(k)
    return math.fsum(support_many(l, m.normals) * m.areas) / k.dim


def minkowski_first_gap(k: Body, l: Body) -> float:
    """``V_1(K, L) - |K|^{(n-1)/n} |L|^{1/n}``; nonnegative up to rounding."""
    _check_pair(k, l)
    n = k.dim
    v1 = mixed_volume_v1(k, l)
    return v1 - volume(k).value ** ((n - 1) / n) * volume(l).value ** (1 / n)


def zonotope_sum(z1: Zonotope, z2: Zonotope) -> Zonotope:
    """Minkowski sum of zonotopes by generator concatenation."""
    if z1.dim != z2.dim:
        raise DimensionMismatchError(f"cannot add zonotopes in R^{z1.dim} and R^{z2.dim}")
    cap = max(z1.cap, z2.cap)
    gens = np.vstack([z1.generators, z2.generators])
    if len(gens) > cap:
        raise GeneratorCapError(f"sum has {len(gens)} generators, cap is {cap}")
    return Zonotope(gens, dim=z1.dim, cap=cap)


def steiner_2d(p: Zonotope, eps: float) -> float:
    """Area of ``P + eps B^2``: ``|P| + perimeter(P) eps + pi eps^2``."""
    if p.dim != 2:
        raise DimensionMismatchError("steiner_2d expects a planar zonotope")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    return volume(p).value + surface_area(p) * eps + math.pi * eps * eps

