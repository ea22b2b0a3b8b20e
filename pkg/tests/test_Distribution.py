import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from Auctioneer.modules.Distribution import (DiscreteDistribution, DiscreteSource, EpsGrid, TriangleSource,
                                             UniformSource, conditionalOnInterval, draw, empiricalFromSamples,
                                             sourceFromDict, totalVariation)
from Auctioneer.utils.errors import DistributionError, GridError

from .conftest import distributions


class TestEpsGrid:

    def test_intervals_partition_the_range(self):
        grid = EpsGrid(0.25, 1.0)

        assert grid.top == 4
        assert list(grid.indices) == [0, 1, 2, 3, 4]
        assert grid.intervalIndex(0.0) == 0
        assert grid.intervalIndex(0.24) == 0
        assert grid.intervalIndex(0.25) == 1
        assert grid.intervalIndex(1.0) == 4

    def test_decimal_steps_land_on_their_index(self):
        grid = EpsGrid(0.1, 1.0)

        assert grid.intervalIndex(0.3) == 3
        assert grid.isGridPoint(0.3)
        assert not grid.isGridPoint(0.35)

    def test_h_off_the_grid_belongs_to_the_top_interval(self):
        grid = EpsGrid(0.3, 1.0)

        assert grid.top == 3
        assert grid.intervalIndex(1.0) == 3
        assert grid.contains(3, 0.95)

    def test_floor_and_ceil(self):
        grid = EpsGrid(0.25, 2.0)

        assert grid.floor(0.6) == 0.5
        assert grid.ceil(0.6) == 0.75
        assert grid.floor(0.75) == 0.75
        assert grid.ceil(0.75) == 0.75

    def test_out_of_range_values_are_rejected(self):
        grid = EpsGrid(0.25, 1.0)

        with pytest.raises(GridError):
            grid.intervalIndex(-0.1)
        with pytest.raises(GridError):
            grid.intervalIndex(1.5)

    @pytest.mark.parametrize('eps, H', [(0, 1), (-0.1, 1), (0.1, 0)])
    def test_invalid_parameters(self, eps, H):
        with pytest.raises(GridError):
            EpsGrid(eps, H)


class TestDiscreteDistribution:

    def test_uniform(self):
        F = DiscreteDistribution.uniform([2.0, 1.0], 2.0)

        assert F.support == (1.0, 2.0)
        assert F.probs == (0.5, 0.5)
        assert F.mean() == 1.5
        assert F.pmf(1.0) == 0.5
        assert F.pmf(1.5) == 0.0

    @pytest.mark.parametrize('support, probs', [
        ([], []),
        ([0.5, 0.25], [0.5, 0.5]),
        ([0.5, 0.5], [0.5, 0.5]),
        ([0.5], [0.9]),
        ([0.5, 0.75], [1.0, 0.0]),
        ([1.5], [1.0]),
        ([-0.5], [1.0]),
    ])
    def test_invalid_distributions(self, support, probs):
        with pytest.raises(DistributionError):
            DiscreteDistribution(support, probs, 1.0)

    def test_mass_on_interval(self):
        F = DiscreteDistribution([0.1, 0.2, 0.6], [0.25, 0.25, 0.5], 1.0)

        assert F.massOn(0, EpsGrid(0.5, 1.0)) == 0.5
        assert F.massOn(1, EpsGrid(0.5, 1.0)) == 0.5

    @given(distributions())
    @settings(max_examples=50)
    def test_samples_stay_on_the_support(self, F):
        values = F.sample(200, np.random.default_rng(0))

        assert set(values.tolist()) <= set(F.support)


class TestEmpirical:

    def test_multiplicities_become_probabilities(self):
        F = empiricalFromSamples([0.5, 0.25, 0.5, 0.5], 1.0)

        assert F.support == (0.25, 0.5)
        assert F.probs == (0.25, 0.75)

    def test_empty_samples(self):
        with pytest.raises(DistributionError, match='no samples'):
            empiricalFromSamples([], 1.0)

    def test_samples_above_h(self):
        with pytest.raises(DistributionError):
            empiricalFromSamples([0.5, 1.5], 1.0)

    def test_empirical_converges(self):
        F = DiscreteDistribution([0.0, 0.5, 1.0], [0.2, 0.3, 0.5], 1.0)
        Fhat = empiricalFromSamples(draw(DiscreteSource(F), 20000, seed=3), 1.0)

        assert totalVariation(F, Fhat) < 0.02


class TestConditional:

    def test_restriction_renormalizes(self):
        F = DiscreteDistribution([0.1, 0.2, 0.6], [0.25, 0.25, 0.5], 1.0)
        conditional = conditionalOnInterval(F, 0, EpsGrid(0.5, 1.0))

        assert conditional.support == (0.1, 0.2)
        assert conditional.probs == (0.5, 0.5)

    def test_empty_interval(self):
        F = DiscreteDistribution([0.1], [1.0], 1.0)

        assert conditionalOnInterval(F, 1, EpsGrid(0.5, 1.0)) is None

    def test_unknown_interval(self):
        F = DiscreteDistribution([0.1], [1.0], 1.0)

        with pytest.raises(GridError):
            conditionalOnInterval(F, 5, EpsGrid(0.5, 1.0))

    @given(distributions(), st.sampled_from([0.125, 0.25, 0.5]))
    @settings(max_examples=50)
    def test_conditionals_recombine_to_the_distribution(self, F, eps):
        grid = EpsGrid(eps, F.H)
        total = 0.0

        for j in grid.indices:
            conditional = conditionalOnInterval(F, j, grid)
            if conditional is None:
                assert F.massOn(j, grid) == 0
                continue
            total += F.massOn(j, grid) * math.fsum(conditional.probs)

        assert total == pytest.approx(1.0, abs=1e-12)


class TestSources:

    def test_draws_are_seeded(self):
        source = UniformSource(0.0, 2.0, 2.0)

        assert np.array_equal(draw(source, 10, 7), draw(source, 10, 7))
        assert not np.array_equal(draw(source, 10, 7), draw(source, 10, 8))

    def test_triangle_lies_below_the_rounded_one(self):
        source = TriangleSource(0.1)
        values = draw(source, 5000, 1)

        assert source.a == pytest.approx(0.9)
        assert values.min() >= source.a
        assert values.max() <= source.a + 0.1
        # the density rises, so the mean sits at a + 2ε/3
        assert values.mean() == pytest.approx(source.a + 2 * 0.1 / 3, abs=2e-3)

    def test_from_dict(self):
        assert isinstance(sourceFromDict({'kind': 'uniform', 'lo': 0, 'hi': 1}, 1.0), UniformSource)
        assert sourceFromDict({'kind': 'triangle', 'eps': 0.1}).H == 2.0

        discrete = sourceFromDict({'kind': 'discrete', 'support': [1, 2], 'probs': [0.5, 0.5]}, 2.0)
        assert discrete.distribution == DiscreteDistribution.uniform([1.0, 2.0], 2.0)

    def test_unknown_kind(self):
        with pytest.raises(DistributionError):
            sourceFromDict({'kind': 'pareto'}, 1.0)

    def test_negative_count(self):
        with pytest.raises(DistributionError):
            draw(UniformSource(0.0, 1.0, 1.0), -1, 0)
