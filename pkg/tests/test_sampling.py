import itertools
import math

import pytest

from kwise_kemeny import (
    MallowsParams,
    Profile,
    Ranking,
    impartial_culture,
    kendall_tau,
    mallows_sample,
    serialize_profile,
)


def analytic_mean_distance(m: int, phi: float) -> float:
    """E[Kendall tau to the mode]: sum over insertion steps of the expected
    number of new inversions, d ~ phi^d / Z_j on {0..j-1}."""
    total = 0.0
    for j in range(2, m + 1):
        weights = [phi**d for d in range(j)]
        z = sum(weights)
        total += sum(d * w for d, w in zip(range(j), weights)) / z
    return total


def mean_distance_to(profile: Profile, sigma: Ranking) -> float:
    total = sum(
        count * kendall_tau(ranking, sigma) for ranking, count in profile.groups
    )
    return total / profile.n


class TestMallows:
    def test_seed_determinism(self):
        params = MallowsParams(Ranking([2, 0, 1, 3]), 0.6, 80, 424242)
        a, b = mallows_sample(params), mallows_sample(params)
        assert serialize_profile(a) == serialize_profile(b)

    def test_different_seeds_differ(self):
        sigma = Ranking.identity(6)
        a = mallows_sample(MallowsParams(sigma, 0.9, 50, 1))
        b = mallows_sample(MallowsParams(sigma, 0.9, 50, 2))
        assert serialize_profile(a) != serialize_profile(b)

    def test_phi_validation(self):
        sigma = Ranking.identity(3)
        with pytest.raises(ValueError):
            MallowsParams(sigma, 0.0, 5, 0)
        with pytest.raises(ValueError):
            MallowsParams(sigma, 1.5, 5, 0)
        with pytest.raises(ValueError):
            MallowsParams(sigma, 0.5, 0, 0)

    def test_uniform_limit_has_balanced_pairs(self):
        # phi = 1: each pair is inverted relative to sigma half the time
        m, n = 5, 10_000
        sigma = Ranking.identity(m)
        profile = mallows_sample(MallowsParams(sigma, 1.0, n, 7))
        positions = profile.positions_matrix()
        counts = profile.counts_array()
        for a in range(m):
            for b in range(a + 1, m):
                inverted = int(counts[positions[:, a] > positions[:, b]].sum())
                assert abs(inverted / n - 0.5) < 0.05

    def test_low_dispersion_concentrates_on_mode(self):
        m, n = 5, 1000
        sigma = Ranking([3, 1, 4, 0, 2])
        profile = mallows_sample(MallowsParams(sigma, 0.01, n, 3))
        mean = mean_distance_to(profile, sigma)
        assert mean < 0.1
        assert abs(mean - analytic_mean_distance(m, 0.01)) < 0.05

    def test_mean_distance_tracks_analytic_value(self):
        m, n = 6, 4000
        sigma = Ranking.identity(m)
        for phi in (0.3, 0.7, 1.0):
            profile = mallows_sample(MallowsParams(sigma, phi, n, 11))
            expected = analytic_mean_distance(m, phi)
            sd = math.sqrt(m * (m - 1) / 2) / math.sqrt(n)  # crude bound
            assert abs(mean_distance_to(profile, sigma) - expected) < 5 * sd

    @pytest.mark.parametrize("m,phi,seed", [(3, 0.5, 13), (4, 0.6, 14)])
    def test_exact_law_at_small_m(self, m, phi, seed):
        # frequencies of all m! rankings match phi^distance / Z within
        # three-sigma multinomial bounds
        n = 100_000
        sigma = Ranking.identity(m)
        profile = mallows_sample(MallowsParams(sigma, phi, n, seed))
        z = 1.0
        for j in range(2, m + 1):
            z *= sum(phi**d for d in range(j))
        observed = {ranking.order: count for ranking, count in profile.groups}
        for perm in itertools.permutations(range(m)):
            p = phi ** kendall_tau(Ranking(perm), sigma) / z
            expected = n * p
            tolerance = 3 * math.sqrt(n * p * (1 - p))
            assert abs(observed.get(perm, 0) - expected) <= tolerance


class TestImpartialCulture:
    def test_seed_determinism(self):
        assert serialize_profile(impartial_culture(5, 40, 9)) == serialize_profile(
            impartial_culture(5, 40, 9)
        )

    def test_single_candidate(self):
        profile = impartial_culture(1, 4, 0)
        assert profile.m == 1
        assert profile.n == 4
        assert profile.groups == ((Ranking([0]), 4),)

    def test_uniform_frequencies(self):
        n = 60_000
        profile = impartial_culture(3, n, 5)
        assert len(profile.groups) == 6
        for _, count in profile.groups:
            assert abs(count / n - 1 / 6) < 0.02

    def test_validates_arguments(self):
        with pytest.raises(ValueError):
            impartial_culture(0, 5, 0)
        with pytest.raises(ValueError):
            impartial_culture(3, 0, 0)
