import itertools

import numpy as np
import pytest
from hypothesis import settings
from scipy.spatial import ConvexHull
from scipy.stats import special_ortho_group

from shadowgauge.bodies import Zonotope, make_box

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_zonotope(seed: int, n: int, m: int) -> Zonotope:
    """Seeded zonotope with generator lengths in [0.5, 1.5] and a condition guard."""
    rng = np.random.default_rng(seed)
    while True:
        g = rng.standard_normal((m, n))
        g *= rng.uniform(0.5, 1.5, size=(m, 1)) / np.linalg.norm(g, axis=1)[:, None]
        sv = np.linalg.svd(g, compute_uv=False)
        if sv[-1] >= 0.05 * sv[0]:
            return Zonotope(g)


def zonotope_points(z: Zonotope) -> np.ndarray:
    """All sign combinations sum(+-v_j): a superset of the vertices."""
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=len(z.generators))))
    return signs @ z.generators


def hull(z: Zonotope) -> ConvexHull:
    return ConvexHull(zonotope_points(z))


def random_rotation(seed: int, n: int) -> np.ndarray:
    return special_ortho_group.rvs(n, random_state=seed)


def random_directions(seed: int, count: int, n: int) -> np.ndarray:
    x = np.random.default_rng(seed).standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1)[:, None]


@pytest.fixture
def cube():
    return make_box([1.0, 1.0, 1.0])


@pytest.fixture
def zonogon():
    return Zonotope([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


@pytest.fixture
def square():
    return make_box([1.0, 1.0])
