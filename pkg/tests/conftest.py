import random

import pytest

from flowcat.cw import SimplicialComplexInput, from_simplicial_complex
from flowcat.flowpaths import FlowPath
from flowcat.verify import load_fixture


def path(fp, steps, target):
    """Build a flow path from cell ids, e.g. path(fp, [("v1", "v0,v1")], "v0")."""
    return FlowPath(tuple((fp.cell(e), fp.cell(u)) for e, u in steps), fp.cell(target))


def random_complex(seed, max_cells=25, max_vertices=6, dim=None):
    """Random simplicial complex of dimension at most 2 with at most ``max_cells`` cells.

    ``dim=2`` insists on at least one triangle.
    """
    rng = random.Random(seed)
    while True:
        nv = rng.randint(3, max_vertices)
        verts = [str(i) for i in range(nv)]
        facets = [[v] for v in verts]
        for _ in range(rng.randint(1, 6)):
            facets.append(rng.sample(verts, rng.choice([2, 2, 3, 3, 3])))
        fp = from_simplicial_complex(SimplicialComplexInput.of(facets))
        if len(fp) <= max_cells and (dim is None or fp.dim == dim):
            return fp


@pytest.fixture(scope="session")
def fixtures():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_fixture(name)
        return cache[name]

    return get


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
