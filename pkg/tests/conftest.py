import json

import pytest

from relcheck.scenarios import fig1, fixture_bytes


@pytest.fixture(scope="session")
def model():
    return fig1()


@pytest.fixture
def fig1_doc():
    return json.loads(fixture_bytes())


def fixpoint_descendants(m, rel, root):
    """Brute-force closure: add one-step predecessors until nothing changes."""
    found = {root}
    while True:
        step = {e.source for e in m.public_edges if e.rel == rel and e.target in found}
        if step <= found:
            return found
        found |= step
