"""Tier assignment, the analytic safety tail, and simulated block rounds.

The exact safety probabilities are cross-checked by enumerating all
delegate outcomes for small groups, and the simulated acceptance rate is
compared with the analytic value over many seeded rounds.
"""

import itertools
import math

import numpy as np
import pytest

from vtmsim import (
    ConsensusParams,
    UsageError,
    assign_tiers,
    security_probability,
    simulate_round,
)

EXACT = 1e-12


class TestAssignTiers:
    def test_one_per_tier(self):
        tiers = assign_tiers([(0, 0.9), (1, 0.8), (2, 0.7)], (1 / 3, 1 / 3, 1 / 3))
        assert tiers.a_level == (0,)
        assert tiers.b_level == (1,)
        assert tiers.c_level == (2,)

    def test_ties_resolve_by_id(self):
        tiers = assign_tiers([(2, 0.5), (0, 0.5), (1, 0.5)], (1 / 3, 1 / 3, 1 / 3))
        assert tiers.a_level == (0,)
        assert tiers.b_level == (1,)
        assert tiers.c_level == (2,)

    def test_largest_remainder_sizes(self):
        rsus = [(i, 1.0 - i / 100) for i in range(10)]
        tiers = assign_tiers(rsus, (0.2, 0.5, 0.3))
        assert (len(tiers.a_level), len(tiers.b_level), len(tiers.c_level)) == (2, 5, 3)

    def test_partition_properties(self):
        rng = np.random.default_rng(5)
        rsus = [(i, float(rng.random())) for i in range(23)]
        tiers = assign_tiers(rsus, (0.2, 0.5, 0.3))
        ids = tiers.all_ids()
        assert sorted(ids) == sorted(i for i, _ in rsus)
        assert len(set(ids)) == len(ids)
        rep = dict(rsus)
        if tiers.a_level and tiers.b_level:
            assert min(rep[i] for i in tiers.a_level) >= max(rep[i] for i in tiers.b_level)
        if tiers.b_level and tiers.c_level:
            assert min(rep[i] for i in tiers.b_level) >= max(rep[i] for i in tiers.c_level)

    def test_empty_population(self):
        with pytest.raises(UsageError):
            assign_tiers([], (0.2, 0.5, 0.3))


class TestSecurityProbability:
    def test_no_malicious(self):
        for n in (1, 4, 13, 40):
            assert security_probability(n, 0.0) == 1.0

    def test_exact_small_group(self):
        assert abs(security_probability(4, 0.2) - 0.8192) <= EXACT

    def test_exact_coin_flip_group(self):
        assert abs(security_probability(7, 0.5) - 29 / 128) <= EXACT

    def test_enumeration_oracle(self):
        # brute force over all 2^N delegate outcomes
        for n, p in ((4, 0.2), (5, 0.35), (7, 0.5), (8, 0.15)):
            want = 0.0
            for outcome in itertools.product((0, 1), repeat=n):
                if sum(outcome) <= n // 3:
                    want += math.prod(p if x else 1 - p for x in outcome)
            assert security_probability(n, p) == pytest.approx(want, abs=1e-12)

    def test_non_increasing_in_p(self):
        for n in (4, 10, 25):
            values = [security_probability(n, p / 20) for p in range(0, 21)]
            assert all(v2 <= v1 + EXACT for v1, v2 in zip(values, values[1:]))

    def test_monotone_in_group_size_on_lattice(self):
        # along N = 3k+1 the tail index grows each step; monotone from 4 for
        # small p, and from 7 when p approaches 1/3 (4 -> 7 dips at p = 0.3)
        for p, start in ((0.1, 4), (0.2, 4), (0.3, 7)):
            values = [security_probability(n, p) for n in range(start, 41, 3)]
            assert all(v2 >= v1 for v1, v2 in zip(values, values[1:])), (p, values)

    def test_known_dip_near_one_third(self):
        # the counterexample that forces the sweep to start at 7
        assert security_probability(4, 0.3) > security_probability(7, 0.3)

    def test_bounds(self):
        with pytest.raises(UsageError):
            security_probability(0, 0.2)
        with pytest.raises(UsageError):
            security_probability(4, 1.5)


def tier_fixture(n_delegates=10):
    ids = list(range(n_delegates + 4))
    reps = {i: 0.5 for i in ids}
    tiers_a = tuple(ids[:2])
    tiers_b = tuple(ids[2 : 2 + n_delegates])
    tiers_c = tuple(ids[2 + n_delegates :])
    from vtmsim.consensus import TierAssignment

    return TierAssignment(tiers_a, tiers_b, tiers_c, (0.2, 0.5, 0.3)), reps


class TestSimulateRound:
    def test_all_honest(self):
        tiers, reps = tier_fixture()
        params = ConsensusParams(p_malicious=0.0)
        result = simulate_round(tiers, reps, params, np.random.default_rng(0))
        assert result.accepted
        assert result.malicious == ()
        assert all(d == pytest.approx(params.bonus) for d in result.deltas.values())

    def test_all_malicious(self):
        tiers, reps = tier_fixture()
        params = ConsensusParams(p_malicious=1.0)
        result = simulate_round(tiers, reps, params, np.random.default_rng(0))
        assert not result.accepted
        assert set(result.malicious) == set(tiers.b_level)
        for rid in tiers.b_level:
            assert result.deltas[rid] == pytest.approx(-params.penalty)

    def test_clamping(self):
        tiers, reps = tier_fixture()
        reps = {i: 0.999 for i in reps}
        params = ConsensusParams(p_malicious=0.0, bonus=0.01)
        result = simulate_round(tiers, reps, params, np.random.default_rng(0))
        assert all(v <= 1.0 for v in result.new_reputations.values())
        tiers2, reps2 = tier_fixture()
        reps2 = {i: 0.01 for i in reps2}
        params2 = ConsensusParams(p_malicious=1.0, penalty=0.05)
        result2 = simulate_round(tiers2, reps2, params2, np.random.default_rng(0))
        assert all(v >= 0.0 for v in result2.new_reputations.values())

    def test_deterministic_for_seed(self):
        tiers, reps = tier_fixture()
        params = ConsensusParams(p_malicious=0.4)
        r1 = simulate_round(tiers, reps, params, np.random.default_rng(77))
        r2 = simulate_round(tiers, reps, params, np.random.default_rng(77))
        assert r1.malicious == r2.malicious
        assert r1.accepted == r2.accepted

    def test_monte_carlo_matches_analytic(self):
        tiers, reps = tier_fixture(n_delegates=10)
        params = ConsensusParams(p_malicious=0.2)
        rng = np.random.default_rng(123)
        runs = 100_000
        accepted = sum(
            simulate_round(tiers, reps, params, rng).accepted for _ in range(runs)
        )
        want = security_probability(10, 0.2)
        se = math.sqrt(want * (1 - want) / runs)
        assert abs(accepted / runs - want) <= 3 * se

    def test_empty_delegates(self):
        from vtmsim.consensus import TierAssignment

        tiers = TierAssignment((0,), (), (1,), (0.4, 0.2, 0.4))
        with pytest.raises(UsageError):
            simulate_round(tiers, {0: 0.5, 1: 0.5}, ConsensusParams(), np.random.default_rng(0))
