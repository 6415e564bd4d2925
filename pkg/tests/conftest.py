import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from fairsplit import ObjectUniverse, PreferenceModel, Profile, load_profile
from fairsplit.experiments import object_names

ROOT = Path(__file__).resolve().parents[1]
PROFILES = ROOT / "profiles"
sys.path.insert(0, str(Path(__file__).parent))


def additive_profile(v1, v2, claims=(1, 1), names=None):
    names = names or object_names(len(v1))
    return Profile(ObjectUniverse(tuple(names)), (PreferenceModel.additive(v1), PreferenceModel.additive(v2)), claims)


@pytest.fixture
def counterexample():
    return load_profile(PROFILES / "counterexample.json")


@pytest.fixture
def example1():
    return load_profile(PROFILES / "example1.json")


def additive_values(n, lo=1, hi=10):
    return st.lists(st.integers(lo, hi), min_size=n, max_size=n)


@st.composite
def additive_profiles(draw, min_n=1, max_n=6, lo=1, hi=10, claims=(1, 1)):
    n = draw(st.integers(min_n, max_n))
    return additive_profile(draw(additive_values(n, lo, hi)), draw(additive_values(n, lo, hi)), claims)


@st.composite
def arbitrary_tables(draw, min_n=1, max_n=4, hi=12):
    """Any non-negative table with u(empty) = 0; usually neither separable nor monotone."""
    n = draw(st.integers(min_n, max_n))
    rest = draw(st.lists(st.integers(0, hi), min_size=(1 << n) - 1, max_size=(1 << n) - 1))
    return PreferenceModel.from_table([0] + rest)
