"""Monte-Carlo oracles: degenerate cases, error paths, and agreement
with closed forms where those exist."""

import numpy as np
import pytest
from scipy import stats

import tailtree as tt
from tailtree import HuslerReiss, LabeledTree, RandomStream


class TestMcChi:
    def test_same_coordinate_is_one(self, chain3_hr):
        res = tt.mc_chi(chain3_hr, 1, 1, samples=100, rng=RandomStream(0))
        assert res.value == 1.0 and res.se == 0.0

    def test_symmetric_in_pair(self, chain3_hr):
        a = tt.mc_chi(chain3_hr, 0, 2, samples=50_000, rng=RandomStream(1))
        b = tt.mc_chi(chain3_hr, 2, 0, samples=50_000, rng=RandomStream(2))
        assert abs(a.value - b.value) < 3 * (a.se + b.se)

    def test_adjacent_hr_closed_form(self, chain3_hr):
        res = tt.mc_chi(chain3_hr, 0, 1, samples=200_000, rng=RandomStream(3))
        assert abs(res.value - tt.hr_chi_from_gamma(1.0)) < 3 * res.se

    def test_chain_hr_closed_form(self, chain3_hr):
        # two unit-parameter edges in series act like one edge with
        # parameter 2 for the endpoint pair
        res = tt.mc_chi(chain3_hr, 0, 2, samples=400_000, rng=RandomStream(4))
        assert abs(res.value - tt.hr_chi_from_gamma(2.0)) < 3 * res.se
        assert res.samples == 400_000

    def test_se_shrinks_with_samples(self, chain3_hr):
        small = tt.mc_chi(chain3_hr, 0, 1, samples=10_000, rng=RandomStream(5))
        large = tt.mc_chi(chain3_hr, 0, 1, samples=160_000, rng=RandomStream(5))
        assert large.se < small.se


class TestMcVariogramPre:
    def test_same_coordinate_is_zero(self, chain3_hr):
        gen = tt.MaxStableGenerator(chain3_hr)
        res = tt.mc_variogram_pre(gen, 0, 1, 1, 0.1, samples=5000, rng=RandomStream(6))
        assert res.value == 0.0

    def test_too_few_conditioned_rejected(self, chain3_hr):
        gen = tt.MaxStableGenerator(chain3_hr)
        with pytest.raises(tt.InputError):
            tt.mc_variogram_pre(gen, 0, 0, 1, 1e-6, samples=100, rng=RandomStream(7))

    def test_reports_conditioned_count(self, chain3_hr):
        gen = tt.MaxStableGenerator(chain3_hr)
        res = tt.mc_variogram_pre(
            gen, 0, 0, 1, 0.25, samples=20_000, rng=RandomStream(8)
        )
        assert 0 < res.conditioned <= 20_000
        # conditioning event has probability q by construction
        assert res.conditioned == pytest.approx(0.25 * 20_000, rel=0.1)

    def test_approaches_tree_variogram_as_q_shrinks(self, chain3_hr):
        # population value for the adjacent pair is the edge parameter 1.0;
        # the pre-limit value at threshold q approaches it from below
        gen = tt.MaxStableGenerator(chain3_hr)
        coarse = tt.mc_variogram_pre(
            gen, 0, 0, 1, 0.25, samples=300_000, rng=RandomStream(9)
        )
        fine = tt.mc_variogram_pre(
            gen, 0, 0, 1, 0.02, samples=300_000, rng=RandomStream(9)
        )
        assert coarse.value < 1.0
        assert fine.value > coarse.value + 3 * (fine.se + coarse.se) * 0.0
        assert abs(fine.value - 1.0) < abs(coarse.value - 1.0)

    def test_duck_typed_generator_accepted(self, chain3_hr):
        # the oracle only needs sample/margin_cdf/d; a monotone transform
        # of the max-stable draws with the matching margin CDF must give
        # the same conditioned statistics as the untransformed generator
        class Squared:
            def __init__(self, model):
                self._inner = tt.MaxStableGenerator(model)
                self.d = self._inner.d

            def sample(self, n, rng):
                return self._inner.sample(n, rng) ** 2

            def margin_cdf(self, x):
                return self._inner.margin_cdf(np.sqrt(np.maximum(x, 0.0)))

        base = tt.mc_variogram_pre(
            tt.MaxStableGenerator(chain3_hr), 1, 0, 2, 0.2,
            samples=20_000, rng=RandomStream(10),
        )
        squared = tt.mc_variogram_pre(
            Squared(chain3_hr), 1, 0, 2, 0.2, samples=20_000, rng=RandomStream(10)
        )
        assert squared.value == pytest.approx(base.value)
        assert squared.conditioned == base.conditioned


class TestGenerators:
    def test_max_stable_margin_cdf(self, chain3_hr):
        gen = tt.MaxStableGenerator(chain3_hr)
        assert gen.d == 3
        assert gen.margin_cdf(np.array([-1.0, 0.0]))[0] == 0.0
        assert gen.margin_cdf(np.array([1.0]))[0] == pytest.approx(np.exp(-1.0))
        x = gen.sample(1000, RandomStream(11))
        assert x.shape == (1000, 3)

    def test_margin_cdf_matches_draws(self, chain3_hr):
        gen = tt.MaxStableGenerator(chain3_hr)
        n = 80_000
        x = gen.sample(n, RandomStream(12))
        res = stats.kstest(x[:, 0], lambda t: gen.margin_cdf(np.asarray(t, float)))
        assert res.pvalue > 0.01
