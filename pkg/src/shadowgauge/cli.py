"""Command-line front end: ``gen``, ``verify`` and ``constants``.

Exit codes: 0 when every check passed or was not applicable, 1 when at
least one inequality failed after refinement, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bodies import (
    DEFAULT_GENERATOR_CAP,
    Ball,
    Body,
    FacetBody,
    Zonotope,
    body_from_dict,
    make_box,
    scale,
)
from .calculus import cauchy_surface_area, surface_area, volume
from .errors import GeometryError
from .inequalities import (
    INV_SQRT_E,
    CheckReport,
    ball_equality_report,
    constants,
    hyperplane_check,
    separation_check,
    surface_hyperplane_check,
    volume_difference_check,
)
from .oracle import mc_volume, zonotope_facets
from .shadows import SphereSearchConfig

log = logging.getLogger("shadowgauge")

HOMOTHETY_RATIOS = (0.5, 0.9)
CONDITION_GUARD = 0.05
ORACLE_SAMPLES = 200_000
CAUCHY_SAMPLES = 20_000


@dataclass(frozen=True)
class SuiteConfig:
    dim: int = 3
    body_count: int = 5
    generator_count: int = 6
    seed: int = 0
    coarse_samples: int | None = None
    restarts: int = 8
    tol_overrides: float | None = None
    output_path: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("--dim must be at least 2")
        if self.body_count < 1:
            raise ValueError("--bodies must be at least 1")
        if self.generator_count > DEFAULT_GENERATOR_CAP:
            raise ValueError(f"--generators exceeds the cap of {DEFAULT_GENERATOR_CAP}")
        if self.generator_count < self.dim:
            raise ValueError("--generators must be at least --dim for a full-dimensional zonotope")

    @property
    def search(self) -> SphereSearchConfig:
        return SphereSearchConfig(self.coarse_samples, self.restarts)


# -- gen ----------------------------------------------------------------------

def random_zonotope(rng: np.random.Generator, dim: int, count: int) -> Zonotope:
    """Generators with uniform directions and lengths in [0.5, 1.5], well conditioned."""
    while True:
        dirs = rng.standard_normal((count, dim))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        gens = dirs * rng.uniform(0.5, 1.5, size=(count, 1))
        sv = np.linalg.svd(gens, compute_uv=False)
        if sv[-1] >= CONDITION_GUARD * sv[0]:
            return Zonotope(gens)


def fixture_descriptors(dim: int) -> dict[str, object]:
    boxes = [make_box([1.0] * (dim - 1) + [t]) for t in (0.5, 2.0)]
    return {
        "cube": {"type": "zonotope", "dim": dim, "generators": np.eye(dim).tolist()},
        "box_family": [{"type": "zonotope", "dim": dim, "generators": b.generators.tolist()} for b in boxes],
        "cross_polytope": {"type": "cross_polytope", "dim": dim, "scale": 1.0},
        "ball": {"type": "ball", "dim": dim, "radius": 1.0},
    }


def _dump(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def cmd_gen(cfg: SuiteConfig, out_dir: Path) -> list[Path]:
    """Write seeded random zonotopes plus the fixture bodies; returns the paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    written = []
    for i in range(cfg.body_count):
        z = random_zonotope(rng, cfg.dim, cfg.generator_count)
        path = out_dir / f"zonotope_{i:03d}.json"
        path.write_text(_dump({"type": "zonotope", "dim": z.dim, "generators": z.generators.tolist()}))
        written.append(path)
    for name, data in fixture_descriptors(cfg.dim).items():
        path = out_dir / f"{name}.json"
        path.write_text(_dump(data))
        written.append(path)
    return written


# -- verify -------------------------------------------------------------------

def _inscribed_scale(k: Body, l: Zonotope) -> float:
    """Factor putting ``k``'s vertices at half of ``l``'s radial function."""
    hrep = zonotope_facets(l)
    verts = k.vertices
    r = np.linalg.norm(verts, axis=1)
    dots = np.abs((verts / r[:, None]) @ hrep.normals.T)
    with np.errstate(divide="ignore"):
        radial = np.min(np.where(dots > 0, hrep.offsets / dots, np.inf), axis=1)
    return 0.5 * float(np.min(radial / r))


def _not_applicable(name: str, reason: str) -> CheckReport:
    return CheckReport(name, math.nan, math.nan, applicable=False, reason=reason)


def _oracle_rows(l: Zonotope, seed: int) -> list[tuple[str, CheckReport]]:
    exact = volume(l).value
    est, se = mc_volume(l, ORACLE_SAMPLES, seed)
    s_exact = surface_area(l)
    s_est, s_se = cauchy_surface_area(l, CAUCHY_SAMPLES, seed)
    return [
        ("", CheckReport("oracle_volume", exact, est,
                         tolerances={"tol_abs": max(3.0 * se, 1e-9 * exact), "sigmas": 3.0, "stderr": se, "samples": ORACLE_SAMPLES})),
        ("", CheckReport("oracle_surface", s_exact, s_est,
                         tolerances={"tol_abs": max(3.0 * s_se, 1e-9 * s_exact), "sigmas": 3.0, "stderr": s_se,
                                     "samples": CAUCHY_SAMPLES})),
    ]


def _tasks(entries: list[tuple[str, Body]], cfg: SuiteConfig, with_oracle: bool):
    """Yield ``(body, partner, thunk)`` in deterministic input order."""
    search, tol = cfg.search, cfg.tol_overrides
    for idx, (label, body) in enumerate(entries):
        n = body.dim
        if isinstance(body, Zonotope):
            if not body.full_rank:
                reason = f"degenerate: generators have rank {body.rank} < {n}"
                yield label, "", lambda r=reason: [("", _not_applicable("hyperplane", r))]
                continue
            yield label, "", lambda b=body: [("", hyperplane_check(b, search, tol))]
            if n >= 3:
                yield label, "", lambda b=body: [("", surface_hyperplane_check(b, search, tol))]
            partners = [(f"{r}*{label}", scale(body, r)) for r in HOMOTHETY_RATIOS]
            for k_label, k in entries:
                if isinstance(k, FacetBody) and k.dim == n:
                    partners.append((f"{_inscribed_scale(k, body):.6g}*{k_label}",
                                     scale(k, _inscribed_scale(k, body))))
            for k_label, k in partners:
                yield label, k_label, lambda k=k, b=body, kl=k_label: [
                    (kl, separation_check(k, b, search, tol)),
                    (kl, volume_difference_check(k, b, search, tol)),
                ]
            if with_oracle:
                yield label, "", lambda b=body, s=cfg.seed + idx: _oracle_rows(b, s)
        elif isinstance(body, FacetBody):
            reason = "not a zonotope, so not a certified projection body; used as K against each zonotope"
            yield label, "", lambda r=reason: [("", _not_applicable("hyperplane", r))]
        elif isinstance(body, Ball):
            yield label, "", lambda b=body: [("", hyperplane_check(b, search, tol))]
            if n >= 3:
                yield label, "", lambda b=body: [
                    ("", surface_hyperplane_check(b, search, tol)),
                    ("", ball_equality_report(b.dim)),
                ]


def _thread_count() -> int:
    cap = os.environ.get("SHADOWGAUGE_THREADS")
    count = os.cpu_count() or 1
    if cap:
        count = min(count, max(1, int(cap)))
    return count


def run_suite(entries: list[tuple[str, Body]], cfg: SuiteConfig, with_oracle: bool = False) -> list[dict]:
    tasks = list(_tasks(entries, cfg, with_oracle))
    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        results = list(pool.map(lambda t: t[2](), tasks))
    rows = []
    for (label, _, _), reports in zip(tasks, results):
        for partner, report in reports:
            row = {"body": label, "partner": partner or None}
            row.update(report.to_dict())
            rows.append(row)
    return rows


def _summary(rows: list[dict]) -> dict:
    verdicts = [r["verdict"] for r in rows]
    return {v: verdicts.count(v) for v in ("passed", "failed", "not_applicable")}


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_json_safe(v) for v in value]
    return value


def render_report(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_json_safe({"summary": _summary(rows), "reports": rows}), indent=2) + "\n"
    buf = io.StringIO()
    fields = ["body", "partner", "name", "verdict", "lhs", "rhs", "gap", "epsilon_star", "witness_xi", "reason"]
    writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        flat = dict(row)
        xi = row.get("witness_xi")
        flat["witness_xi"] = "" if xi is None else ";".join(repr(v) for v in xi)
        writer.writerow(flat)
    return buf.getvalue()


def _expand(paths: list[str]) -> list[Path]:
    out = []
    for p in map(Path, paths):
        out.extend(sorted(p.glob("*.json")) if p.is_dir() else [p])
    return out


def load_entries(paths: list[str]) -> tuple[list[tuple[str, Body]], list[str]]:
    entries, errors = [], []
    for path in _expand(paths):
        try:
            data = json.loads(path.read_text())
            items = data if isinstance(data, list) else [data]
            bodies = [body_from_dict(d) for d in items]
        except (OSError, json.JSONDecodeError, GeometryError) as exc:
            errors.append(f"{path}: {exc}")
            continue
        if len(bodies) == 1:
            entries.append((path.name, bodies[0]))
        else:
            entries.extend((f"{path.name}[{i}]", b) for i, b in enumerate(bodies))
    return entries, errors


def cmd_verify(cfg: SuiteConfig, paths: list[str], with_oracle: bool = False) -> int:
    entries, errors = load_entries(paths)
    for err in errors:
        print(f"error: {err}", file=sys.stderr)
    rows = run_suite(entries, cfg, with_oracle)
    text = render_report(rows, cfg.format)
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)
    summary = _summary(rows)
    log.info("passed=%(passed)d failed=%(failed)d not_applicable=%(not_applicable)d", summary)
    if errors:
        return 2
    return 1 if summary["failed"] else 0


def constants_table(n_max: int) -> str:
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    lines = [f"{'n':>3}  {'|B^n|':>14}  {'c_n':>12}  {'c_n - 1/sqrt(e)':>16}"]
    for n in range(2, n_max + 1):
        c = constants(n)
        lines.append(f"{n:>3}  {c.ball_volume:>14.8f}  {c.cn:>12.8f}  {c.cn - INV_SQRT_E:>16.8f}")
    return "\n".join(lines) + "\n"


def cmd_constants(n_max: int) -> str:
    return constants_table(n_max)


# -- argument parsing -----------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shadowgauge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write random zonotopes and fixture bodies")
    gen.add_argument("--dim", type=int, default=3)
    gen.add_argument("--bodies", type=int, default=5)
    gen.add_argument("--generators", type=int, default=6)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="bodies", help="output directory")

    ver = sub.add_parser("verify", help="run the inequality suite on body files")
    ver.add_argument("paths", nargs="+", help="body JSON files or directories")
    ver.add_argument("--seed", type=int, default=0, help="seed for oracle sampling")
    ver.add_argument("--coarse-samples", type=int, default=None)
    ver.add_argument("--restarts", type=int, default=8)
    ver.add_argument("--tol", type=float, default=None, help="override the relative tolerance")
    ver.add_argument("--with-oracle", action="store_true")
    ver.add_argument("--out", default=None, help="report path (default: stdout)")
    ver.add_argument("--format", choices=("json", "csv"), default="json")

    con = sub.add_parser("constants", help="tabulate |B^n| and c_n")
    con.add_argument("--n-max", type=int, default=10)
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            cfg = SuiteConfig(dim=args.dim, body_count=args.bodies, generator_count=args.generators,
                              seed=args.seed)
            for path in cmd_gen(cfg, Path(args.out)):
                print(path)
            return 0
        if args.command == "verify":
            cfg = SuiteConfig(seed=args.seed, coarse_samples=args.coarse_samples, restarts=args.restarts,
                              tol_overrides=args.tol, output_path=args.out, format=args.format)
            return cmd_verify(cfg, args.paths, args.with_oracle)
        sys.stdout.write(cmd_constants(args.n_max))
        return 0
    except ValueError as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
