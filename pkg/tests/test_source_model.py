import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from erasure_sources.adversary import intermediate_source, tilt_sources
from erasure_sources.prob_core import Channel, FiniteDistribution
from erasure_sources.source_model import (
    AdaptiveSource,
    ChannelFamily,
    ErasureAlphabet,
    OutcomeCapExceeded,
    enumerate_joint,
    find_delta_violation,
    in_perturbation_set,
    is_delta_source,
    is_sv_source,
    random_delta_source,
    sample,
    zero_erasure_source,
)
from erasure_sources.sv_bridge import check_entropy_inequality

import oracles
from helpers import random_family

F = Fraction
BIT = ("0", "1")
BITS_E = ("0", "1", "_")


def row(*ps):
    return FiniteDistribution(BITS_E, tuple(F(p) for p in ps))


class TestPerturbationSet:
    def test_zero_erasure_member(self):
        p = FiniteDistribution.uniform(BIT)
        for d in (F(0), F(1, 3), F(1)):
            assert in_perturbation_set(row(F(1, 2), F(1, 2), 0), p, d)

    def test_half_delta_erasure(self):
        p = FiniteDistribution.uniform(BIT)
        assert in_perturbation_set(row("0.45", "0.45", "0.1"), p, F(1, 5))

    def test_upper_violation(self):
        p = FiniteDistribution.uniform(BIT)
        assert not in_perturbation_set(row("0.55", "0.35", "0.1"), p, F(1, 5))

    def test_float_slack(self):
        p = FiniteDistribution.uniform(BIT, "float")
        pbar = FiniteDistribution(BITS_E, (0.4 - 5e-10, 0.5, 0.1 + 5e-10))
        assert in_perturbation_set(pbar, p, 0.2)

    def test_alphabet_mismatch(self):
        with pytest.raises(ValueError, match="alphabet"):
            in_perturbation_set(FiniteDistribution.uniform(BIT), FiniteDistribution.uniform(BIT), F(1, 5))

    def test_delta_range(self):
        with pytest.raises(ValueError):
            in_perturbation_set(row(F(1, 2), F(1, 2), 0), FiniteDistribution.uniform(BIT), F(3, 2))


class TestDeltaSource:
    def test_zero_erasure(self, uniform2):
        src = zero_erasure_source(uniform2)
        assert is_delta_source(src, uniform2, 0)
        assert is_delta_source(src, uniform2, F(1, 2))

    def test_intermediate_member(self, uniform2, fifth):
        assert is_delta_source(intermediate_source(uniform2, fifth), uniform2, fifth)

    def test_tilted_v_member_by_direct_interval_check(self, uniform1, fixture_f, fifth):
        v, _, _ = tilt_sources(fixture_f, uniform1, fifth)
        c = v.conditional(())
        for x in BIT:
            assert (1 - fifth) * F(1, 2) <= c[x] <= F(1, 2)
        assert is_delta_source(v, uniform1, fifth)

    def test_violation_reported(self, uniform1, bits):
        src = AdaptiveSource(1, bits.full, ({(): row("0.35", "0.35", "0.3")},), "_")
        assert find_delta_violation(src, uniform1, F(1, 5)) == ((), "0")

    def test_structural_mismatch(self, uniform1, uniform2):
        with pytest.raises(ValueError):
            is_delta_source(zero_erasure_source(uniform1), uniform2, F(1, 5))

    @given(st.integers(0, 10**6), st.integers(1, 3), st.fractions(0, 1))
    def test_bottom_mass_bounded(self, seed, n, delta):
        rng = random.Random(seed)
        fam = random_family(rng, n, ErasureAlphabet(BIT))
        src = random_delta_source(fam, delta, rng)
        assert is_delta_source(src, fam, delta)
        for _, d in src.items():
            assert d["_"] <= delta

    @given(st.integers(0, 10**6), st.fractions(0, 1), st.fractions(0, 1))
    def test_monotone_in_delta(self, seed, d1, d2):
        lo, hi = sorted((d1, d2))
        rng = random.Random(seed)
        fam = random_family(rng, 2, ErasureAlphabet(("a", "b", "c")))
        src = random_delta_source(fam, lo, rng)
        assert is_delta_source(src, fam, hi)

    @given(st.integers(0, 10**6), st.fractions(0, F(1, 2)))
    def test_entropy_never_drops_binary(self, seed, delta):
        rng = random.Random(seed)
        fam = random_family(rng, 2, ErasureAlphabet(BIT))
        src = random_delta_source(fam, delta, rng)
        assert check_entropy_inequality(src, fam, delta)

    @given(st.integers(0, 10**6), st.fractions(0, F(1, 3)))
    def test_entropy_never_drops_ternary(self, seed, delta):
        rng = random.Random(seed)
        fam = random_family(rng, 2, ErasureAlphabet(("a", "b", "c")))
        src = random_delta_source(fam, delta, rng)
        assert check_entropy_inequality(src, fam, delta)


class TestSV:
    def iid(self, p0, n=2):
        d = FiniteDistribution(BIT, (p0, 1 - p0))
        conds = tuple({h: d for h in Channel.constant(k, BIT, d).table} for k in range(n))
        return AdaptiveSource(n, BIT, conds)

    def test_uniform_half(self):
        assert is_sv_source(self.iid(F(1, 2)), F(1, 2))

    def test_vacuous(self):
        assert is_sv_source(self.iid(F(1)), 0)

    def test_biased(self):
        assert not is_sv_source(self.iid(F(7, 10)), F(2, 5))

    def test_rejects_erasure_mass(self, uniform1, fifth):
        with pytest.raises(ValueError, match="erasure"):
            is_sv_source(intermediate_source(uniform1, fifth), F(1, 4))

    def test_rejects_nonbinary(self):
        d = FiniteDistribution.uniform(("a", "b", "c"))
        with pytest.raises(ValueError, match="binary"):
            is_sv_source(AdaptiveSource(1, ("a", "b", "c"), ({(): d},)), 0)


class TestEnumerate:
    def test_base_case(self, uniform1, fifth):
        src = intermediate_source(uniform1, fifth)
        j = enumerate_joint(src)
        assert dict(j.items()) == {(x,): p for x, p in src.conditional(()).items()}

    def test_two_step_intermediate(self, uniform2, fifth):
        j = enumerate_joint(intermediate_source(uniform2, fifth))
        expected = oracles.xtilde_joint_uniform(2, fifth)
        assert dict(j.items()) == expected
        assert j[("0", "0")] == F("0.2025")
        assert j[("0", "_")] == F("0.045")
        assert j[("_", "_")] == F("0.01")
        assert sum(j.probs) == 1

    def test_deterministic_channels(self, bits):
        fam = ChannelFamily.constant(3, bits, FiniteDistribution.point_mass(BIT, "1"))
        j = enumerate_joint(intermediate_source(fam, 0))
        assert j[("1", "1", "1")] == 1
        assert j.support() == (("1", "1", "1"),)

    def test_cap(self, uniform2, fifth):
        with pytest.raises(OutcomeCapExceeded, match="9 outcomes"):
            enumerate_joint(intermediate_source(uniform2, fifth), max_outcomes=8)

    @given(st.integers(0, 10**6))
    def test_joint_normalised(self, seed):
        rng = random.Random(seed)
        fam = random_family(rng, 3, ErasureAlphabet(BIT))
        assert sum(enumerate_joint(random_delta_source(fam, F(1, 3), rng)).probs) == 1


class TestSample:
    def test_point_mass(self, bits):
        fam = ChannelFamily.constant(2, bits, FiniteDistribution.point_mass(BIT, "0"))
        src = zero_erasure_source(fam)
        assert {sample(src, s) for s in range(20)} == {("0", "0")}

    def test_deterministic(self, uniform2, fifth):
        src = intermediate_source(uniform2, fifth)
        assert sample(src, 1234) == sample(src, 1234)

    def test_erasure_frequency(self, uniform2, fifth):
        src = intermediate_source(uniform2, fifth)
        draws = [sample(src, s) for s in range(100_000)]
        n = len(draws)
        p = float(fifth / 2)
        sd = (n * p * (1 - p)) ** 0.5
        for k in range(2):
            count = Counter(d[k] for d in draws)["_"]
            assert abs(count - n * p) < 3 * sd
