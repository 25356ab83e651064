from pathlib import Path

import pytest

from ctqsearch import InformationSet, SearchScenario

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def build_scenario(n_items, targets, sets, energy=1.0):
    """Shorthand: sets is a list of (members, weight) pairs."""
    info = tuple(InformationSet(frozenset(m), w) for m, w in sets)
    return SearchScenario(
        n_items=n_items, targets=frozenset(targets), info_sets=info, energy=energy
    )


@pytest.fixture
def boosted_pair():
    # two overlapping sets; target 1 is double-covered and gets boosted
    return build_scenario(8, {0, 1}, [({0, 1, 2}, 0.6), ({1, 3}, 0.4)])


@pytest.fixture
def lopsided_pair():
    # most weight rides on a target-free set
    return build_scenario(3, {0}, [({0, 1}, 0.2), ({2}, 0.8)])


@pytest.fixture
def library_demo_path() -> Path:
    return SCENARIO_DIR / "library_demo.json"


@pytest.fixture
def counting_demo_path() -> Path:
    return SCENARIO_DIR / "disjoint_counting.json"


@pytest.fixture
def misplaced_demo_path() -> Path:
    return SCENARIO_DIR / "misplaced_pair.json"
