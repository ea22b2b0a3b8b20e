import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from Auctioneer.modules.Distribution import DiscreteDistribution, EpsGrid
from Auctioneer.modules.Iid import (ReserveIronedAuction, classSizeBoundIid, decodeRoundedDown, encodeRoundedDown,
                                    learnIid, optimalReserveIroned, roundDownAuction, sampleSizeIid)
from Auctioneer.modules.Learn import binomialAcceptance
from Auctioneer.modules.Myerson import Outcome, elkindAuction
from Auctioneer.modules.Revenue import ProductDistribution, exactRevenueSingleItem
from Auctioneer.utils.errors import DistributionError, FileFormatError, GridError, InsufficientSamplesError

from .conftest import distributions


def bruteForce(auction, F, n):
    return math.fsum(q * auction.run(profile).revenue for profile, q in ProductDistribution.iid(F, n).profiles())


class TestReserveIronedAuction:

    @pytest.fixture
    def auction(self):
        return ReserveIronedAuction(1.0, [(1.0, 2.0)], 2.0)

    def test_ironed_bids_tie(self, auction):
        assert auction.run([1.5, 1.0]) == Outcome.singleWinner(2, 0, 1.0)
        assert auction.run([1.0, 1.5]) == Outcome.singleWinner(2, 0, 1.0)
        assert auction.run([1.0, 2.0]) == Outcome.singleWinner(2, 1, 2.0)
        assert auction.run([0.5, 0.9]) == Outcome.noSale(2)

    def test_closed_top_holds_h(self):
        auction = ReserveIronedAuction(1.0, [(1.0, 2.0)], 2.0, closedTop=True)

        assert auction.level(2.0) == 1.0
        assert auction.run([1.0, 2.0]) == Outcome.singleWinner(2, 0, 1.0)

    @pytest.mark.parametrize('p, intervals', [(3.0, []), (1.0, [(0.5, 1.5)]), (0.0, [(0.5, 1.5), (1.0, 2.0)]),
                                              (0.0, [(1.0, 1.0)])])
    def test_invalid(self, p, intervals):
        with pytest.raises(DistributionError):
            ReserveIronedAuction(p, intervals, 2.0)

    def test_text_and_dict(self):
        auction = ReserveIronedAuction(0.5, [(0.5, 1.0), (1.5, 2.0)], 2.0, closedTop=True)

        assert auction.toText() == '0.5 2.0 closed\n0.5 1.0\n1.5 2.0\n'
        assert ReserveIronedAuction.fromText(auction.toText()) == auction
        assert ReserveIronedAuction.fromDict(auction.toDict()) == auction

    @pytest.mark.parametrize('text', ['', '1.0\n', '1.0 2.0 open\n', '1.0 2.0\n1.0\n', '1.0 2.0\nx 2.0\n'])
    def test_malformed_text(self, text):
        with pytest.raises(FileFormatError):
            ReserveIronedAuction.fromText(text)


class TestOptimal:

    def test_uniform_one_two(self):
        F = DiscreteDistribution.uniform([1.0, 2.0], 2.0)
        auction = optimalReserveIroned(F)

        assert (auction.p, auction.intervals, auction.closedTop) == (1.0, ((1.0, 2.0),), False)
        assert auction.revenue(F, 2) == pytest.approx(1.5)

    def test_uniform_one_three(self):
        F = DiscreteDistribution.uniform([1.0, 3.0], 3.0)
        auction = optimalReserveIroned(F)

        assert (auction.p, auction.intervals) == (3.0, ())
        assert auction.revenue(F, 1) == pytest.approx(1.5)
        assert auction.revenue(F, 2) == pytest.approx(2.25)

    @given(distributions(), st.integers(1, 3))
    @settings(max_examples=60, deadline=None)
    def test_revenue_matches_brute_force(self, F, n):
        auction = optimalReserveIroned(F)

        assert auction.revenue(F, n) == pytest.approx(bruteForce(auction, F, n), abs=1e-12)

    @given(distributions(), st.integers(1, 3))
    @settings(max_examples=60, deadline=None)
    def test_revenue_agrees_with_the_single_item_algorithm(self, F, n):
        Fn = ProductDistribution.iid(F, n)

        assert optimalReserveIroned(F).revenue(F, n) == \
            pytest.approx(exactRevenueSingleItem(elkindAuction(Fn.factors), Fn), abs=1e-9)

    @given(distributions(), st.integers(1, 2))
    @settings(max_examples=40, deadline=None)
    def test_closed_top_revenue_matches_brute_force(self, F, n):
        auction = ReserveIronedAuction(0.25, [(0.5, 1.0)], 1.0, closedTop=True)

        assert auction.revenue(F, n) == pytest.approx(bruteForce(auction, F, n), abs=1e-12)


class TestRoundDown:

    def test_reserve_moves_down(self):
        rounded = roundDownAuction(ReserveIronedAuction(3.0, [], 3.0), 0.4)

        assert rounded.p == pytest.approx(2.8)

    def test_collapsed_interval_is_dropped(self):
        rounded = roundDownAuction(ReserveIronedAuction(1.0, [(1.1, 1.3)], 2.0), 0.5)

        assert (rounded.p, rounded.intervals) == (1.0, ())

    @given(distributions(), st.integers(1, 2), st.sampled_from([0.125, 0.25, 0.375]))
    @settings(max_examples=60, deadline=None)
    def test_loss_per_profile_stays_below_eps(self, F, n, eps):
        auction = optimalReserveIroned(F)
        rounded = roundDownAuction(auction, eps)
        grid = EpsGrid(eps, F.H)
        bids = sorted(set(F.support) | {min(grid.lower(j), F.H) for j in grid.indices} | set(auction.breakpoints))

        for profile in itertools.product(bids, repeat=n):
            assert rounded.run(profile).revenue > auction.run(profile).revenue - eps - 1e-9


class TestEncoding:

    def test_flags(self):
        grid = EpsGrid(0.5, 2.0)
        auction = ReserveIronedAuction(0.5, [(0.5, 1.0), (1.5, 2.0)], 2.0, closedTop=True)
        code = encodeRoundedDown(auction, grid)

        assert code == {'reserve': 1, 'closedTop': True, 'flags': [0, 1, 2, 1, 2]}
        assert decodeRoundedDown(code, grid) == auction

    def test_adjacent_intervals_share_a_point(self):
        grid = EpsGrid(0.5, 2.0)
        auction = ReserveIronedAuction(0.0, [(0.5, 1.0), (1.0, 1.5)], 2.0)
        code = encodeRoundedDown(auction, grid)

        assert code['flags'] == [0, 1, 3, 2, 0]
        assert decodeRoundedDown(code, grid) == auction

    def test_off_grid_parameters(self):
        with pytest.raises(GridError):
            encodeRoundedDown(ReserveIronedAuction(0.3, [], 2.0), EpsGrid(0.5, 2.0))

    def test_unclosed_interval(self):
        with pytest.raises(GridError):
            decodeRoundedDown({'reserve': 0, 'closedTop': False, 'flags': [0, 1, 0]}, EpsGrid(0.5, 1.0))

    def test_class_size_bound(self):
        # 3 grid points: ln 3 + ln 2 + 3 ln 4
        assert classSizeBoundIid(EpsGrid(0.5, 1.0)) == pytest.approx(math.log(3 * 2 * 64))


class TestLearnIid:

    def test_single_bidder_closed_form(self):
        # √t ≥ 2 ln(2/δ)/ε² when n = 1
        assert sampleSizeIid(1.0, 1, 0.5, 0.5) == math.ceil((8 * math.log(4)) ** 2)

    def test_sample_size_grows_with_accuracy(self):
        assert sampleSizeIid(1.0, 2, 0.25, 0.1) > sampleSizeIid(1.0, 2, 0.5, 0.1)
        assert sampleSizeIid(1.0, 3, 0.5, 0.1) >= sampleSizeIid(1.0, 2, 0.5, 0.1)

    def test_smallest_prefix_with_a_positive_count(self):
        # ε ≥ 2H drops the second condition; t − 2√t first turns positive at t = 5
        assert sampleSizeIid(0.1, 2, 1.0, 0.5) == 5

    @pytest.mark.parametrize('H, n, eps, delta', [(1.0, 2, 0.5, 0.1), (1.0, 3, 0.5, 0.5), (2.0, 2, 1.0, 0.2)])
    def test_returned_prefix_is_minimal(self, H, n, eps, delta):
        def holds(t):
            logRatio = math.lgamma(t) - math.lgamma(t - n + 1)
            crossings = n * (n - 1)
            covered = t - crossings * math.sqrt(t)
            failure = logRatio + math.log(crossings + 1) + math.log(2) - math.sqrt(t) * eps ** 2 / (2 * H ** 2)
            return failure <= math.log(delta) and covered > 0 and \
                logRatio + math.log(covered) - n * math.log(t) >= math.log1p(-eps / (2 * H))

        t = sampleSizeIid(H, n, eps, delta)

        assert holds(t)
        assert not holds(t - 1)

    def test_invalid_parameters(self):
        with pytest.raises(DistributionError):
            sampleSizeIid(1.0, 2, 0.0, 0.1)

    def test_pipeline(self):
        auction, report = learnIid([1.0, 2.0] * 20, 2, 2.0, 0.75, 0.5, sampleCap=40)

        assert (auction.p, auction.intervals) == (1.0, ((1.0, 2.0),))
        assert report.kind == 'iid'
        assert (report.t, report.grid) == (40, 0.25)
        assert report.empiricalRevenue == pytest.approx(1.5)
        assert report.optimumRevenue == pytest.approx(1.5)
        assert report.caveats == [f"samples capped at 40 (formula {report.required['t']})"]

    def test_too_few_samples(self):
        with pytest.raises(InsufficientSamplesError) as error:
            learnIid([1.0, 2.0] * 5, 2, 2.0, 0.75, 0.5, sampleCap=40)

        assert (error.value.required, error.value.given) == (40, 10)


@pytest.mark.slow
def test_learned_iid_auctions_are_near_optimal():
    eps, delta, n = 0.15, 0.1, 2
    F = DiscreteDistribution([0.2, 0.5, 0.9], [0.3, 0.4, 0.3], 1.0)
    truth = ProductDistribution.iid(F, n)
    optimum = exactRevenueSingleItem(elkindAuction(truth.factors), truth)
    successes = 0

    for trial in range(200):
        samples = F.sample(5000, np.random.default_rng(trial)).tolist()
        auction, report = learnIid(samples, n, 1.0, eps, delta, sampleCap=5000)

        assert report.empiricalRevenue > report.optimumRevenue - report.grid
        successes += auction.revenue(F, n) > optimum - eps

    assert any('capped at 5000' in caveat for caveat in report.caveats)
    assert binomialAcceptance(successes, 200, delta)
