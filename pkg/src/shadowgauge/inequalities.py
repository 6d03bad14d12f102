"""Sharp constant ``c_n`` and executable shadow inequalities for projection bodies.

Every check returns a :class:`CheckReport` with ``gap = lhs - rhs``; a check
passes when ``gap >= -tol_rel * max(|lhs|, |rhs|)``. Minima over the sphere
come from the heuristic minimizer in :mod:`shadowgauge.shadows`; a failing
check is re-run once with eight times more coarse samples before the
failure is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bodies import Ball, Body, Zonotope
from .calculus import log_unit_ball_volume, surface_area, unit_ball_volume, volume
from .errors import DimensionMismatchError, GeometryError
from .shadows import (
    SphereMinResult,
    SphereSearchConfig,
    min_over_sphere,
    projection_surface_area_many,
    projection_volume_many,
)

CLOSED_FORM_TOL = 1e-7
HEURISTIC_TOL = 1e-5
INV_SQRT_E = math.exp(-0.5)

CHECK_NAMES = ("separation", "volume_difference", "hyperplane", "surface_hyperplane", "ball_equality")


@dataclass(frozen=True)
class Constants:
    n: int
    ball_volume: float
    cn: float


def cn(n: int) -> float:
    """``|B^n|^{(n-1)/n} / |B^{n-1}|``, evaluated in log space."""
    if int(n) != n or n < 2:
        raise GeometryError("c_n is defined for integers n >= 2")
    return math.exp((n - 1) / n * log_unit_ball_volume(n) - log_unit_ball_volume(n - 1))


def constants(n: int) -> Constants:
    return Constants(n, unit_ball_volume(n), cn(n))


@dataclass(frozen=True)
class CheckReport:
    name: str
    lhs: float
    rhs: float
    epsilon_star: float | None = None
    witness_xi: np.ndarray | None = None
    tolerances: dict = field(default_factory=dict)
    applicable: bool = True
    reason: str | None = None

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs

    @property
    def passed(self) -> bool:
        if not self.applicable:
            return False
        if "tol_abs" in self.tolerances:
            return abs(self.gap) <= self.tolerances["tol_abs"]
        tol = self.tolerances.get("tol_rel", 0.0)
        return self.gap >= -tol * max(abs(self.lhs), abs(self.rhs))

    @property
    def verdict(self) -> str:
        if not self.applicable:
            return "not_applicable"
        return "passed" if self.passed else "failed"

    @property
    def relative_gap(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return self.gap / scale if scale else 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "epsilon_star": self.epsilon_star,
            "witness_xi": None if self.witness_xi is None else [float(v) for v in self.witness_xi],
            "passed": self.passed,
            "verdict": self.verdict,
            "reason": self.reason,
            "tolerances": dict(self.tolerances),
        }


def _search_tolerances(cfg: SphereSearchConfig, n: int, tol: float, refined: bool) -> dict:
    return {
        "tol_rel": tol,
        "coarse_samples": cfg.samples_for(n),
        "restarts": cfg.restarts,
        "shrink_tol": cfg.shrink_tol,
        "refined": refined,
    }


def _with_refinement(run: Callable[[SphereSearchConfig, bool], CheckReport],
                     cfg: SphereSearchConfig | None, n: int) -> CheckReport:
    cfg = cfg or SphereSearchConfig()
    report = run(cfg, False)
    if report.applicable and not report.passed:
        report = run(cfg.finer(n), True)
    return report


def _require_projection_body(l: Body):
    if isinstance(l, Zonotope):
        l.require_full_rank()
    elif not isinstance(l, Ball):
        raise GeometryError("this check needs a certified projection body (zonotope or ball)")


def _shadow_gap_min(k: Body, l: Body, cfg: SphereSearchConfig) -> SphereMinResult:
    if k.dim != l.dim:
        raise DimensionMismatchError(f"bodies live in R^{k.dim} and R^{l.dim}")

    def objective(xs):
        return projection_volume_many(l, xs) - projection_volume_many(k, xs)

    return min_over_sphere(objective, l.dim, cfg, batch=True)


def _separation_like(name: str, k: Body, l: Body, cfg, tol) -> CheckReport:
    _require_projection_body(l)
    n = l.dim
    tol = HEURISTIC_TOL if tol is None else tol
    c = cn(n)
    power = (n - 1) / n
    vol_l = volume(l).value ** power
    vol_k = volume(k).value ** power

    def run(search: SphereSearchConfig, refined: bool) -> CheckReport:
        res = _shadow_gap_min(k, l, search)
        eps = res.value
        if name == "separation":
            lhs, rhs = vol_l - c * eps, vol_k
        else:
            lhs, rhs = vol_l - vol_k, c * eps
        applicable = eps > 0
        return CheckReport(
            name, lhs, rhs, epsilon_star=eps, witness_xi=res.argmin,
            tolerances=_search_tolerances(search, n, tol, refined),
            applicable=applicable,
            reason=None if applicable else "shadows of K are not uniformly below those of L",
        )

    return _with_refinement(run, cfg, n)


def separation_check(k: Body, l: Zonotope, cfg: SphereSearchConfig | None = None,
                     tol: float | None = None) -> CheckReport:
    """Volume separation from a uniform shadow margin.

    With ``eps`` the minimum over directions of ``|L|xi^perp| - |K|xi^perp|``,
    checks ``|K|^{(n-1)/n} <= |L|^{(n-1)/n} - c_n eps`` (lhs is the right side).
    Not applicable when ``eps <= 0``.
    """
    return _separation_like("separation", k, l, cfg, tol)


def volume_difference_check(k: Body, l: Zonotope, cfg: SphereSearchConfig | None = None,
                            tol: float | None = None) -> CheckReport:
    """``|L|^{(n-1)/n} - |K|^{(n-1)/n} >= c_n eps`` with the same ``eps`` as above."""
    return _separation_like("volume_difference", k, l, cfg, tol)


def hyperplane_check(l: Zonotope | Ball, cfg: SphereSearchConfig | None = None,
                     tol: float | None = None) -> CheckReport:
    """``|L|^{(n-1)/n} >= c_n min_xi |L | xi^perp|``."""
    _require_projection_body(l)
    n = l.dim
    lhs = volume(l).value ** ((n - 1) / n)
    c = cn(n)
    if isinstance(l, Ball):
        tol = CLOSED_FORM_TOL if tol is None else tol
        shadow = l.radius ** (n - 1) * unit_ball_volume(n - 1)
        return CheckReport("hyperplane", lhs, c * shadow, witness_xi=np.eye(n)[0],
                           tolerances={"tol_rel": tol, "method": "closed_form"})
    tol = HEURISTIC_TOL if tol is None else tol

    def run(search: SphereSearchConfig, refined: bool) -> CheckReport:
        res = min_over_sphere(lambda xs: projection_volume_many(l, xs), n, search, batch=True)
        return CheckReport("hyperplane", lhs, c * res.value, witness_xi=res.argmin,
                           tolerances=_search_tolerances(search, n, tol, refined))

    return _with_refinement(run, cfg, n)


def surface_hyperplane_check(l: Zonotope | Ball, cfg: SphereSearchConfig | None = None,
                             tol: float | None = None) -> CheckReport:
    """``S(L) >= n/(n-1) c_n min_xi S(L | xi^perp) |L|^{1/n}`` for ``n >= 3``."""
    _require_projection_body(l)
    n = l.dim
    if n < 3:
        raise GeometryError("the surface-area inequality is checked for n >= 3 only")
    lhs = surface_area(l)
    factor = n / (n - 1) * cn(n) * volume(l).value ** (1 / n)
    if isinstance(l, Ball):
        tol = CLOSED_FORM_TOL if tol is None else tol
        shadow = (n - 1) * unit_ball_volume(n - 1) * l.radius ** (n - 2)
        return CheckReport("surface_hyperplane", lhs, factor * shadow, witness_xi=np.eye(n)[0],
                           tolerances={"tol_rel": tol, "method": "closed_form"})
    tol = HEURISTIC_TOL if tol is None else tol

    def run(search: SphereSearchConfig, refined: bool) -> CheckReport:
        res = min_over_sphere(lambda xs: projection_surface_area_many(l, xs), n, search, batch=True)
        return CheckReport("surface_hyperplane", lhs, factor * res.value, witness_xi=res.argmin,
                           tolerances=_search_tolerances(search, n, tol, refined))

    return _with_refinement(run, cfg, n)


def ball_equality_report(n: int) -> CheckReport:
    """Surface-area inequality for the unit ball from closed forms only."""
    if int(n) != n or n < 3:
        raise GeometryError("ball equality is checked for n >= 3")
    bn, bn1 = unit_ball_volume(n), unit_ball_volume(n - 1)
    lhs = n * bn
    rhs = n / (n - 1) * cn(n) * (n - 1) * bn1 * bn ** (1 / n)
    return CheckReport("ball_equality", lhs, rhs, tolerances={"tol_rel": 1e-12, "method": "closed_form"})


def ball_equality_gap(n: int) -> float:
    """Relative gap ``|lhs - rhs| / lhs`` of the surface-area inequality at the ball."""
    report = ball_equality_report(n)
    return abs(report.gap) / report.lhs
