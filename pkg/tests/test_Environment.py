import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from Auctioneer.modules.Distribution import DiscreteDistribution
from Auctioneer.modules.Environment import (Knapsack, PartitionMatroid, Position, PublicProject, SingleItem,
                                            SPAuction, UniformMatroid, bruteForceSpOpt, environmentFromDict,
                                            knapsackApprox, welfare)
from Auctioneer.modules.Myerson import BELOW_ALL, SteppedVirtualValuation, elkindAuction
from Auctioneer.modules.Revenue import ProductDistribution, bruteForceOpt, bruteForceRevenue
from Auctioneer.utils.errors import BudgetError, DistributionError, MonotonicityError

from .conftest import products

quarters = st.integers(-4, 4).map(lambda k: k / 4)


KINDS = ['single-item', 'uniform-matroid', 'partition-matroid', 'public-project', 'position', 'knapsack']


@st.composite
def environments(draw, n: int, kinds: tuple = tuple(KINDS)):
    kind = draw(st.sampled_from(kinds))

    if kind == 'single-item':
        return SingleItem(n)
    if kind == 'uniform-matroid':
        return UniformMatroid(n, draw(st.integers(0, n)))
    if kind == 'partition-matroid':
        cut = draw(st.integers(0, n))
        return PartitionMatroid([range(cut), range(cut, n)], [draw(st.integers(0, 2)), draw(st.integers(0, 2))])
    if kind == 'public-project':
        return PublicProject(n)
    if kind == 'position':
        multipliers = sorted((draw(st.integers(0, 4)) / 4 for _ in range(n)), reverse=True)
        return Position(multipliers)
    return Knapsack([draw(st.integers(1, 5)) for _ in range(n)], draw(st.integers(0, 8)))


@st.composite
def virtualValues(draw, n: int):
    values = [draw(quarters) for _ in range(n)]
    for i in range(n):
        if draw(st.integers(0, 5)) == 0:
            values[i] = BELOW_ALL
    return values


def assertMaximum(env, values):
    allocation = env.maximize(values)

    assert allocation in env.feasibleAllocations()
    assert welfare(allocation, [-float('inf') if v is BELOW_ALL else v for v in values]) == env.exhaustiveMaximum(values)


class TestMaximizers:

    @given(st.integers(1, 6).flatmap(lambda n: st.tuples(environments(n), virtualValues(n))))
    @settings(max_examples=300, deadline=None)
    def test_maximizers_match_exhaustive_search(self, drawn):
        assertMaximum(*drawn)

    @pytest.mark.slow
    @pytest.mark.parametrize('kind', KINDS)
    def test_every_kind_over_many_vectors(self, kind):
        @given(st.integers(1, 6).flatmap(lambda n: st.tuples(environments(n, (kind,)), virtualValues(n))))
        @settings(max_examples=500, deadline=None)
        def check(drawn):
            assertMaximum(*drawn)

        check()

    def test_single_item_ties_go_to_the_lowest_index(self):
        assert SingleItem(3).maximize([1.0, 2.0, 2.0]) == (0.0, 1.0, 0.0)
        assert SingleItem(1).maximize([0.0]) == (1.0,)
        assert SingleItem(2).maximize([-1.0, BELOW_ALL]) == (0.0, 0.0)

    def test_uniform_matroid_prefers_the_lexicographically_greatest_set(self):
        assert UniformMatroid(4, 2).maximize([3.0, -1.0, 2.0, 2.0]) == (1.0, 0.0, 1.0, 0.0)

    @pytest.mark.parametrize('values, built', [([1.0, -0.5], True), ([1.0, -2.0], False), ([1.0, BELOW_ALL], False)])
    def test_public_project_follows_the_sign_of_the_sum(self, values, built):
        assert PublicProject(2).maximize(values) == ((1.0, 1.0) if built else (0.0, 0.0))

    def test_position_skips_negative_values(self):
        assert Position([1.0, 0.5, 0.25]).maximize([0.5, -1.0, 2.0]) == (0.5, 0.0, 1.0)

    def test_knapsack_ties_take_earlier_items(self):
        assert Knapsack([1, 1], 1).maximize([1.0, 1.0]) == (1.0, 0.0)

    def test_enumeration_budget(self):
        with pytest.raises(BudgetError):
            SingleItem(7).feasibleAllocations()


class TestKnapsackApprox:

    def test_best_single_item_beats_the_prefix(self):
        weights, values = (2, 3, 4), (3.0, 3.0, 5.0)

        assert knapsackApprox(weights, 5, values) == (0.0, 0.0, 1.0)
        assert welfare(Knapsack(weights, 5).maximize(values), values) == 6.0

    def test_nonpositive_values_take_nothing(self):
        assert knapsackApprox([1, 2], 3, [0.0, -1.0]) == (0.0, 0.0)

    def test_single_fitting_item(self):
        assert knapsackApprox([2], 3, [1.5]) == (1.0,)

    @given(st.integers(1, 10).flatmap(lambda n: st.tuples(
        st.lists(st.integers(1, 20), min_size=n, max_size=n),
        st.integers(0, 40),
        st.lists(st.integers(-3, 12).map(float), min_size=n, max_size=n),
    )))
    @settings(max_examples=500, deadline=None)
    def test_half_of_the_optimum(self, instance):
        weights, capacity, values = instance
        approx = knapsackApprox(weights, capacity, values)
        exact = Knapsack(weights, capacity).maximize(values)

        assert sum(w for w, x in zip(weights, approx) if x) <= capacity
        assert welfare(approx, values) >= welfare(exact, values) / 2


class TestWMax:

    def test_values(self):
        assert SingleItem(3).wMax() == 1.0
        assert UniformMatroid(3, 2).wMax() == 2.0
        assert PublicProject(4).wMax() == 4.0
        assert Position([1.0, 0.5]).wMax() == 1.5
        assert Knapsack([2, 3, 4], 5).wMax() == 2.0
        assert PartitionMatroid([[0, 1], [2]], [1, 3]).wMax() == 2.0


class TestConfiguration:

    @pytest.mark.parametrize('data', [
        {'kind': 'single-item', 'n': 2},
        {'kind': 'uniform-matroid', 'n': 3, 'k': 2},
        {'kind': 'partition-matroid', 'blocks': [[0], [1, 2]], 'capacities': [1, 1]},
        {'kind': 'public-project', 'n': 2},
        {'kind': 'position', 'multipliers': [1.0, 0.5]},
        {'kind': 'knapsack', 'weights': [1, 2], 'capacity': 2},
    ])
    def test_roundtrip(self, data):
        env = environmentFromDict(data)

        assert environmentFromDict(env.toDict()) == env

    @pytest.mark.parametrize('data', [
        {'kind': 'auction-house'},
        {'kind': 'position', 'multipliers': [0.5, 1.0]},
        {'kind': 'position', 'multipliers': [1.5]},
        {'kind': 'knapsack', 'weights': [1.5], 'capacity': 2},
        {'kind': 'knapsack', 'weights': [0], 'capacity': 2},
        {'kind': 'partition-matroid', 'blocks': [[0], [2]], 'capacities': [1, 1]},
        {'kind': 'uniform-matroid', 'n': 2, 'k': -1},
    ])
    def test_invalid(self, data):
        with pytest.raises(DistributionError):
            environmentFromDict(data)


class TestSPAuction:

    @given(products())
    @settings(max_examples=50, deadline=None)
    def test_single_item_environment_matches_the_single_item_auction(self, Fhat):
        A = elkindAuction(Fhat.factors)
        sp = SPAuction(A.phis, SingleItem(Fhat.n))

        for profile, _ in Fhat.profiles():
            assert sp.run(profile) == A.run(profile)

    def test_degenerate_position_is_a_single_item_auction(self, uniformPair):
        A = elkindAuction(uniformPair.factors)
        sp = SPAuction(A.phis, Position([1.0, 0.0]))

        for profile, _ in uniformPair.profiles():
            assert sp.run(profile) == A.run(profile)

    def test_public_project_charges_thresholds(self):
        phi = SteppedVirtualValuation([0.0, 0.5, 1.0], [-1.0, 0.0, 1.0], 1.0)
        A = SPAuction([phi] * 3, PublicProject(3))
        outcome = A.run([1.0, 0.5, 0.0])

        assert outcome.allocation == (1.0, 1.0, 1.0)
        assert outcome.payments == (1.0, 0.5, 0.0)

    def test_uniform_matroid_charges_every_winner_the_threshold(self, uniformPair):
        A = SPAuction(elkindAuction(uniformPair.factors).phis, UniformMatroid(2, 2))

        assert bruteForceRevenue(A, uniformPair) == pytest.approx(2.0)

    @given(st.data())
    @settings(max_examples=30, deadline=None)
    def test_truthful_bidding_is_a_best_response(self, data):
        Fhat = data.draw(products(maxBidders=3, maxSupport=3, denominator=8))
        env = data.draw(environments(Fhat.n))
        A = SPAuction(elkindAuction(Fhat.factors).phis, env)
        deviations = [k / 8 for k in range(9)]

        for profile, _ in Fhat.profiles():
            truthful = A.run(profile)
            for i, v in enumerate(profile):
                utility = truthful.allocation[i] * v - truthful.payments[i]
                assert utility >= -1e-9
                for b in deviations:
                    bids = list(profile)
                    bids[i] = b
                    deviated = A.run(bids)
                    assert deviated.allocation[i] * v - deviated.payments[i] <= utility + 1e-9

    def test_non_monotone_maximizer_is_rejected(self):

        class Backwards(SingleItem):
            def maximize(self, values):
                return (1.0,) if values[0] is BELOW_ALL else (0.0,)

        A = SPAuction([SteppedVirtualValuation([0.5], [1.0], 1.0)], Backwards(1))

        with pytest.raises(MonotonicityError):
            A.run([1.0])

    def test_approximate_maximizer_runs(self):
        F = DiscreteDistribution.uniform([0.25, 0.5, 1.0], 1.0)
        Fhat = ProductDistribution.iid(F, 3)
        A = SPAuction(elkindAuction(Fhat.factors).phis, Knapsack([2, 3, 4], 5), approx=True)

        for profile, _ in Fhat.profiles():
            outcome = A.run(profile)
            assert all(0 <= p <= x * v + 1e-12 for p, x, v in zip(outcome.payments, outcome.allocation, profile))

    def test_dict_roundtrip(self, uniformPair):
        A = SPAuction(elkindAuction(uniformPair.factors).phis, Knapsack([1, 2], 2), approx=True)

        assert SPAuction.fromDict(A.toDict()) == A


class TestExhaustiveOptimum:

    @given(products(maxBidders=2, maxSupport=3, denominator=8))
    @settings(max_examples=40, deadline=None)
    def test_single_item_agrees_with_the_single_item_search(self, Fhat):
        optimum, _ = bruteForceOpt(Fhat)

        assert bruteForceSpOpt(SingleItem(Fhat.n), Fhat) == pytest.approx(optimum, abs=1e-9)

    @given(st.data())
    @settings(max_examples=40, deadline=None)
    def test_optimal_auction_reaches_it(self, data):
        Fhat = data.draw(products(maxBidders=2, maxSupport=3, denominator=8))
        env = data.draw(environments(Fhat.n))
        A = SPAuction(elkindAuction(Fhat.factors).phis, env)

        assert bruteForceRevenue(A, Fhat) == pytest.approx(bruteForceSpOpt(env, Fhat), abs=1e-9)

    def test_limits(self):
        F = DiscreteDistribution.uniform([0.25, 0.5, 0.75, 1.0], 1.0)

        with pytest.raises(BudgetError):
            bruteForceSpOpt(SingleItem(1), ProductDistribution([F]))


def test_welfare_skips_losers():
    assert welfare((1.0, 0.0), (2.0, -float('inf'))) == 2.0
