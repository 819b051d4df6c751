import numpy as np
import pytest

from kwise_kemeny import Profile, Ranking, parse_profile

# 100 voters, 3 candidates: the Condorcet winner (c2) tops only 3 ballots
# while c1 tops 49, so pairwise and setwise aggregation pull apart.
TENSION_TEXT = "3 100\n49: 1,2,3\n48: 3,2,1\n3: 2,3,1\n"

# 10 voters, 6 candidates; its 3-wise majority digraph has two non-trivial
# strongly connected components ({c3,c4} and {c5,c6}).
SIX_TEXT = (
    "6 10\n"
    "4: 1,2,4,3,5,6\n"
    "4: 1,3,2,4,5,6\n"
    "1: 6,1,2,4,3,5\n"
    "1: 6,1,4,3,2,5\n"
)


@pytest.fixture
def tension_profile() -> Profile:
    return parse_profile(TENSION_TEXT)


@pytest.fixture
def six_profile() -> Profile:
    return parse_profile(SIX_TEXT)


def random_profile(rng: np.random.Generator, m: int, n: int) -> Profile:
    return Profile.from_rankings(m, [Ranking(rng.permutation(m)) for _ in range(n)])


@pytest.fixture
def profile_factory():
    return random_profile
