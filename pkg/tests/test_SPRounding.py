import math

import numpy as np
import pytest

from Auctioneer.modules.Distribution import DiscreteDistribution, EpsGrid
from Auctioneer.modules.Environment import PublicProject, SingleItem, SPAuction
from Auctioneer.modules.Learn import empiricalProduct
from Auctioneer.modules.Myerson import elkindAuction
from Auctioneer.modules.Revenue import ProductDistribution, bruteForceRevenue
from Auctioneer.modules.Rounding import isCoarse
from Auctioneer.modules.SPRounding import (BitBudget, BitStream, atomSampleSize, atomThreshold, derandomizedRoundSp,
                                           drawWidth, extractBits, pairSampleSize, planRounding, profileDraws,
                                           randomizedRoundSp, requiredExtraSamples, roundWithBits, ruleDraws)
from Auctioneer.stores.AuditTrail import AuditTrail
from Auctioneer.utils.errors import BudgetError, DistributionError, InsufficientSamplesError


class TestFormulas:

    def test_rule_draws(self):
        # 50 · ln 20 = 149.79
        assert ruleDraws(1.0, 0.3, 0.1) == 150

    def test_profile_draws(self):
        assert profileDraws(1.0, 0.3, 0.1, 150) == math.ceil(50 * math.log(6000))

    def test_atom_sample_size(self):
        assert atomSampleSize(2, 0.1) == 24
        assert atomThreshold(1, 1.0, 0.4) == pytest.approx(0.1)

    def test_extra_samples(self):
        b = 100
        perBit = math.ceil(4 * (math.log(400) + math.log(10)) / 0.2)

        assert pairSampleSize(1, 1.0, 0.1, 0.1, b) == perBit * b
        assert requiredExtraSamples(1, 1.0, 0.1, 0.1, 7, b) == 2 * perBit * b
        assert requiredExtraSamples(1, 1.0, 0.1, 0.1, 10 ** 9, b) == 10 ** 9

    def test_draw_width(self):
        assert drawWidth(1) == 32
        assert drawWidth(5) == 35

    def test_plan_applies_caps(self, uniformPair):
        plan = planRounding(uniformPair, 1.0, 0.5, ruleCap=3, profileCap=20)

        assert (plan.D, plan.E, plan.width) == (3, 20, 33)
        assert plan.b == 33 * (20 * 2 + 3 * 2 * 3)
        assert len(plan.caveats) == 2


class TestBits:

    def test_worked_pair(self):
        assert extractBits([((0.3, 0.7), (0.3, 0.5))]) == [0]

    def test_identical_pairs_give_nothing(self):
        pairs = [((0.1,), (0.1,)), ((0.1, 0.2), (0.4, 0.0))]

        assert extractBits(pairs) == [1]

    def test_bits_are_unbiased(self):
        rng = np.random.default_rng(0)
        values = rng.choice([0.0, 0.5, 1.0], size=(10000, 2, 2))
        bits = extractBits([(tuple(first), tuple(second)) for first, second in values])

        assert len(bits) > 8000
        assert np.mean(bits) == pytest.approx(0.5, abs=0.02)

    def test_stream_reads_most_significant_first(self):
        stream = BitStream(BitBudget(4), 2, bits=[1, 0, 1, 1])

        assert stream.take(3) == 5
        with pytest.raises(BudgetError):
            stream.take(2)

    def test_choice_by_inverse_cdf(self):
        cumulative = np.array([0.5, 1.0])

        assert BitStream(BitBudget(1), 1, bits=[0]).choose(cumulative) == 0
        assert BitStream(BitBudget(1), 1, bits=[1]).choose(cumulative) == 1

    def test_stream_needs_one_source(self):
        with pytest.raises(DistributionError):
            BitStream(BitBudget(1), 1)
        with pytest.raises(DistributionError):
            BitStream(BitBudget(1), 1, bits=[0], rng=np.random.default_rng(0))

    def test_short_bit_list(self):
        with pytest.raises(BudgetError):
            BitStream(BitBudget(8), 1, bits=[0, 1])


class TestRandomizedRounding:

    @pytest.fixture
    def offGrid(self):
        Fhat = ProductDistribution([DiscreteDistribution.uniform([0.3, 0.7, 1.0], 1.0)])
        return SPAuction(elkindAuction(Fhat.factors).phis, SingleItem(1)), Fhat

    def test_coarse_auction_keeps_its_revenue(self, uniformPair):
        A = SPAuction(elkindAuction(uniformPair.factors).phis, SingleItem(2))
        trail = AuditTrail()
        rounded = randomizedRoundSp(A, uniformPair, 1.0, 0.5, seed=0, ruleCap=3, profileCap=20, trail=trail)

        assert bruteForceRevenue(rounded, uniformPair) == pytest.approx(1.5)
        assert len(trail.caveats) == 2
        assert trail.find('sp-rounding')['D'] == 3

    def test_result_is_coarse_and_seeded(self, offGrid):
        A, Fhat = offGrid
        first = randomizedRoundSp(A, Fhat, 0.5, 0.5, seed=4, ruleCap=4, profileCap=10)

        assert isCoarse(first, EpsGrid(0.5, 1.0))
        assert randomizedRoundSp(A, Fhat, 0.5, 0.5, seed=4, ruleCap=4, profileCap=10) == first

    def test_fixed_bits_give_a_fixed_auction(self, offGrid):
        A, Fhat = offGrid
        plan = planRounding(Fhat, 0.5, 0.5, ruleCap=4, profileCap=10)
        bits = np.random.default_rng(9).integers(0, 2, size=plan.b).tolist()

        first = roundWithBits(A, Fhat, 0.5, 0.5, bits, ruleCap=4, profileCap=10)

        assert first == roundWithBits(A, Fhat, 0.5, 0.5, bits, ruleCap=4, profileCap=10)
        assert isCoarse(first, EpsGrid(0.5, 1.0))

    def test_rejects_mismatched_products(self, uniformPair):
        A = SPAuction(elkindAuction(uniformPair.factors[:1]).phis, SingleItem(1))

        with pytest.raises(DistributionError):
            randomizedRoundSp(A, uniformPair, 1.0, 0.5, seed=0, ruleCap=1, profileCap=1)


class TestDerandomizedRounding:

    @pytest.fixture
    def atoms(self):
        return ProductDistribution([DiscreteDistribution.pointMass(0.5, 1.0), DiscreteDistribution.pointMass(0.25, 1.0)])

    @pytest.mark.parametrize('env, revenue', [(SingleItem(2), 0.5), (PublicProject(2), 0.75)])
    def test_atoms_take_the_welfare_extractor(self, atoms, env, revenue):
        A = SPAuction(elkindAuction(atoms.factors).phis, env)
        outcome = derandomizedRoundSp(A, atoms, [(0.5, 0.25)] * 10, 0.25, 0.1, sampleCap=10, ruleCap=1, profileCap=1)

        assert outcome.e == 0
        assert outcome.required == 10
        assert [phi.levels for phi in outcome.phis] == [(0.5,), (0.25,)]
        assert bruteForceRevenue(outcome.auction, atoms) == pytest.approx(revenue)

    def test_too_few_samples(self, atoms):
        A = SPAuction(elkindAuction(atoms.factors).phis, SingleItem(2))

        with pytest.raises(InsufficientSamplesError) as error:
            derandomizedRoundSp(A, atoms, [(0.5, 0.25)] * 4, 0.25, 0.1, sampleCap=10, ruleCap=1, profileCap=1)

        assert error.value.required == 10

    def test_continuous_samples_drive_the_rounding(self):
        column = np.random.default_rng(1).uniform(0.0, 1.0, size=400).tolist()
        Fhat = empiricalProduct([column], 1.0, t=20)
        A = SPAuction(elkindAuction(Fhat.factors).phis, SingleItem(1))
        samples = [(v,) for v in column]
        trail = AuditTrail()

        outcome = derandomizedRoundSp(A, Fhat, samples, 0.5, 0.5, t=20, ruleCap=1, profileCap=1, sampleCap=400,
                                      trail=trail)

        assert outcome.e == 1
        assert isCoarse(outcome.auction, EpsGrid(0.5, 1.0))
        assert trail.find('derandomization')['differing'] == 200
        assert any('extra samples capped' in caveat for caveat in trail.caveats)

        bits = extractBits([(samples[2 * k], samples[2 * k + 1]) for k in range(200)])
        plan = planRounding(Fhat, 0.5, 0.25, ruleCap=1, profileCap=1, t=20)
        assert outcome.auction == roundWithBits(A, Fhat, 0.5, 0.25, bits[:plan.b], ruleCap=1, profileCap=1, t=20)
