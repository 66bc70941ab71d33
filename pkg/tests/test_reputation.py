"""Opinion algebra: window opinions, freshness weighting, recommendation, fusion.

Derived expectations are recomputed here with exact rational arithmetic
(fractions) as an independent oracle of the float implementation.
"""

import logging
import math
from fractions import Fraction

import pytest

from vtmsim import (
    InteractionLog,
    NoEvidenceError,
    Opinion,
    ReputationParams,
    StaleEventError,
    UsageError,
    attenuation_weight,
    expectation,
    familiarity,
    fuse_opinions,
    local_opinion,
    recommended_opinion,
    rsu_reputation,
    window_opinion,
)
from vtmsim.errors import ConfigError

TOL = 1e-9

PARAMS = ReputationParams()  # delta1 = delta2 = 0.5, xi = 1, theta = 0.5, c = 1


def oracle_window(p, q, d1=Fraction(1, 2), d2=Fraction(1, 2), xi=1):
    den = d1 * p + d2 * q + xi
    return (d1 * p / den, d2 * q / den, Fraction(xi) / den)


def assert_opinion(op, b, d, u, tol=TOL):
    assert op.belief == pytest.approx(b, abs=tol)
    assert op.disbelief == pytest.approx(d, abs=tol)
    assert op.uncertainty == pytest.approx(u, abs=tol)
    assert abs(op.belief + op.disbelief + op.uncertainty - 1.0) <= TOL


class TestWindowOpinion:
    def test_no_evidence_is_vacuous(self):
        assert_opinion(window_opinion(0, 0, PARAMS), 0.0, 0.0, 1.0)

    def test_pure_positive(self):
        assert_opinion(window_opinion(100, 0, PARAMS), 50 / 51, 0.0, 1 / 51)

    def test_symmetric(self):
        assert_opinion(window_opinion(10, 10, PARAMS), 5 / 11, 5 / 11, 1 / 11)

    def test_matches_rational_oracle_on_grid(self):
        for p in range(0, 40, 7):
            for q in range(0, 40, 5):
                got = window_opinion(p, q, PARAMS)
                want = oracle_window(p, q)
                assert_opinion(got, float(want[0]), float(want[1]), float(want[2]))

    def test_monotonicity(self):
        for q in (0, 5, 17):
            beliefs = [window_opinion(p, q, PARAMS).belief for p in range(0, 30)]
            assert all(b2 >= b1 for b1, b2 in zip(beliefs, beliefs[1:]))
        for p in (0, 5, 17):
            disbeliefs = [window_opinion(p, q, PARAMS).disbelief for q in range(0, 30)]
            assert all(d2 >= d1 for d1, d2 in zip(disbeliefs, disbeliefs[1:]))
        # uncertainty strictly falls as total evidence grows
        uncertainties = [window_opinion(n, n, PARAMS).uncertainty for n in range(0, 30)]
        assert all(u2 < u1 for u1, u2 in zip(uncertainties, uncertainties[1:]))

    def test_negative_counts_rejected(self):
        with pytest.raises(UsageError):
            window_opinion(-1, 0, PARAMS)


class TestAttenuation:
    def test_zero_age(self):
        assert attenuation_weight(5, 5, PARAMS) == 1.0

    def test_examples(self):
        assert attenuation_weight(3, 5, PARAMS) == pytest.approx(0.5, abs=TOL)
        assert attenuation_weight(1, 5, PARAMS) == pytest.approx(1 / 3, abs=TOL)

    def test_strictly_decreasing_and_bounded(self):
        weights = [attenuation_weight(10 - age, 10, PARAMS) for age in range(PARAMS.tau + 1)]
        assert all(0 < w <= 1 for w in weights)
        assert all(w2 < w1 for w1, w2 in zip(weights, weights[1:]))

    def test_stale_event(self):
        with pytest.raises(StaleEventError):
            attenuation_weight(0, PARAMS.tau + 1, PARAMS)

    def test_future_event(self):
        with pytest.raises(UsageError):
            attenuation_weight(6, 5, PARAMS)


class TestLocalOpinion:
    def test_single_record_equals_window_opinion(self):
        log = InteractionLog(0, 0, [(7, 100, 0)])
        got = local_opinion(log, 7, PARAMS)
        want = window_opinion(100, 0, PARAMS)
        assert_opinion(got, want.belief, want.disbelief, want.uncertainty)

    def test_equal_weight_average(self):
        # windows (b=0.8, u=0.2) and (b=0.4, u=0.6) need delta1 = 1/3
        params = ReputationParams(delta1=1 / 3, delta2=2 / 3)
        assert_opinion(window_opinion(12, 0, params), 0.8, 0.0, 0.2)
        assert_opinion(window_opinion(2, 0, params), 0.4, 0.0, 0.6)
        log = InteractionLog(0, 0, [(4, 12, 0), (5, 2, 0)])
        got = local_opinion(log, 5, params, freshness=False)
        assert_opinion(got, 0.6, 0.0, 0.4)

    def test_two_record_weighted_average_oracle(self):
        # hand oracle: windows (0,20)@now-2 and (20,0)@now, weights 1/2 and 1
        w1, w2 = Fraction(1, 2), Fraction(1)
        o1, o2 = oracle_window(0, 20), oracle_window(20, 0)
        want = tuple((w1 * a + w2 * b) / (w1 + w2) for a, b in zip(o1, o2))
        assert want == (Fraction(20, 33), Fraction(10, 33), Fraction(3, 33))

        log = InteractionLog(0, 0, [(8, 0, 20), (10, 20, 0)])
        got = local_opinion(log, 10, PARAMS)
        assert_opinion(got, float(want[0]), float(want[1]), float(want[2]))

    def test_empty_window_raises(self):
        log = InteractionLog(0, 0, [(0, 5, 5)])
        with pytest.raises(NoEvidenceError):
            local_opinion(log, PARAMS.tau + 1, PARAMS)

    def test_record_order_enforced(self):
        with pytest.raises(ValueError):
            InteractionLog(0, 0, [(3, 1, 0), (3, 1, 0)])
        log = InteractionLog(0, 0, [(3, 1, 0)])
        with pytest.raises(ValueError):
            log.add(2, 1, 0)


class TestExpectation:
    def test_vacuous_gives_base_rate(self):
        assert expectation(Opinion(0.0, 0.0, 1.0, 0.5)) == 0.5

    def test_full_belief(self):
        assert expectation(Opinion(1.0, 0.0, 0.0, 0.123)) == 1.0

    def test_mixed(self):
        assert expectation(Opinion(0.5, 0.3, 0.2, 0.5)) == pytest.approx(0.6, abs=TOL)


class TestFamiliarity:
    def _logs(self, counts):
        return [
            InteractionLog(9, rid, [(10, c, 0)]) if c else InteractionLog(9, rid, [])
            for rid, c in enumerate(counts)
        ]

    def test_uniform_counts(self):
        logs = self._logs([10, 10, 10])
        assert familiarity(logs, 1, 10, PARAMS) == pytest.approx(1.0, abs=TOL)

    def test_double_the_mean(self):
        logs = self._logs([20, 10, 0])
        assert familiarity(logs, 0, 10, PARAMS) == pytest.approx(2.0, abs=TOL)

    def test_zero_with_target(self):
        logs = self._logs([0, 10, 20])
        assert familiarity(logs, 0, 10, PARAMS) == 0.0

    def test_no_interactions_at_all(self):
        logs = self._logs([0, 0, 0])
        with pytest.raises(NoEvidenceError):
            familiarity(logs, 0, 10, PARAMS)

    def test_explicit_population_size(self):
        logs = self._logs([20, 10])
        # mean over 4 RSUs (two never interacted): (20+10)/4 = 7.5
        assert familiarity(logs, 0, 10, PARAMS, total_rsus=4) == pytest.approx(20 / 7.5, abs=TOL)


class TestRecommendedOpinion:
    def test_single_recommender_unchanged(self):
        op = Opinion(0.7, 0.1, 0.2)
        got = recommended_opinion([(op, 0.37)])
        assert_opinion(got, 0.7, 0.1, 0.2)

    def test_equal_weight_mean(self):
        ops = [(Opinion(0.8, 0.0, 0.2), 1.0), (Opinion(0.4, 0.2, 0.4), 1.0)]
        assert_opinion(recommended_opinion(ops), 0.6, 0.1, 0.3)

    def test_weighted_mean(self):
        ops = [(Opinion(0.8, 0.0, 0.2), 3.0), (Opinion(0.4, 0.2, 0.4), 1.0)]
        assert_opinion(recommended_opinion(ops), 0.7, 0.05, 0.25)

    def test_empty_and_nonpositive_weights(self):
        with pytest.raises(NoEvidenceError):
            recommended_opinion([])
        with pytest.raises(UsageError):
            recommended_opinion([(Opinion(0.5, 0.2, 0.3), 0.0)])


class TestFusion:
    def test_vacuous_recommendation_is_exact_identity(self):
        local = Opinion(0.61, 0.17, 0.22, 0.41)
        fused = fuse_opinions(local, Opinion.vacuous())
        assert fused == local  # exact, including base rate

    def test_vacuous_local_is_exact_identity(self):
        rec = Opinion(0.61, 0.17, 0.22, 0.5)
        fused = fuse_opinions(Opinion.vacuous(0.3), rec)
        assert (fused.belief, fused.disbelief, fused.uncertainty) == (0.61, 0.17, 0.22)
        assert fused.base_rate == 0.3  # base rate stays the local one

    def test_derived_example(self):
        fused = fuse_opinions(Opinion(0.6, 0.2, 0.2), Opinion(0.4, 0.4, 0.2))
        # rational oracle: denominator 0.36, components 5/9, 1/3, 1/9
        assert_opinion(fused, float(Fraction(5, 9)), float(Fraction(1, 3)), float(Fraction(1, 9)), tol=1e-6)

    def test_never_increases_uncertainty_on_grid(self):
        grid = [i / 10 for i in range(1, 11)]
        count = 0
        for ul in grid:
            for ur in grid:
                local = Opinion((1 - ul) * 0.7, (1 - ul) * 0.3, ul)
                rec = Opinion((1 - ur) * 0.2, (1 - ur) * 0.8, ur)
                fused = fuse_opinions(local, rec)
                assert fused.uncertainty <= min(ul, ur) + TOL
                count += 1
        assert count == 100

    def test_degenerate_fusion_keeps_local(self, caplog):
        local = Opinion(0.9, 0.1, 0.0)
        rec = Opinion(0.2, 0.8, 0.0)
        with caplog.at_level(logging.WARNING, logger="vtmsim.reputation"):
            fused = fuse_opinions(local, rec)
        assert fused == local
        assert any("degenerate" in r.message for r in caplog.records)

    def test_components_valid_on_random_pairs(self):
        import random

        rng = random.Random(7)
        for _ in range(200):
            def rand_opinion():
                b = rng.random()
                d = rng.random() * (1 - b)
                return Opinion(b, d, 1 - b - d)

            fused = fuse_opinions(rand_opinion(), rand_opinion())
            total = fused.belief + fused.disbelief + fused.uncertainty
            assert abs(total - 1.0) <= TOL


class TestRsuReputation:
    def test_examples(self):
        assert rsu_reputation([0.7]) == 0.7
        assert rsu_reputation([1.0, 0.0]) == 0.5
        assert rsu_reputation([0.7, 0.8, 0.6]) == pytest.approx(0.7, abs=TOL)

    def test_empty(self):
        with pytest.raises(NoEvidenceError):
            rsu_reputation([])

    def test_out_of_range(self):
        with pytest.raises(UsageError):
            rsu_reputation([1.2])


class TestParamValidation:
    def test_delta_ordering(self):
        with pytest.raises(ConfigError):
            ReputationParams(delta1=0.7, delta2=0.3)

    def test_delta_sum(self):
        with pytest.raises(ConfigError):
            ReputationParams(delta1=0.4, delta2=0.4)

    def test_theta_range(self):
        with pytest.raises(ConfigError):
            ReputationParams(theta=1.0)

    def test_opinion_sum_enforced(self):
        with pytest.raises(ValueError):
            Opinion(0.5, 0.5, 0.5)

    def test_opinion_component_range(self):
        with pytest.raises(ValueError):
            Opinion(1.2, -0.2, 0.0)


def test_window_then_attenuation_composition():
    # local opinion stays a convex combination, so expectation stays in [0, 1]
    log = InteractionLog(0, 0, [(t, (t * 13) % 30, (t * 7) % 20) for t in range(1, 9)])
    op = local_opinion(log, 8, PARAMS)
    assert 0.0 <= expectation(op) <= 1.0
    assert math.isclose(op.belief + op.disbelief + op.uncertainty, 1.0, abs_tol=TOL)
