"""Reputation-tiered block validation and its analytic safety probability.

Miners (RSUs) are ranked by reputation and cut into A/B/C tiers: A creates
blocks, B validates them, C broadcasts.  Only B-level validation is
stochastic here; a block survives when at most floor(N/3) of the N
delegates are malicious, the classic BFT bound.  Validators earn a
reputation bonus when honest and a penalty when malicious, clamped to
[0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, UsageError


@dataclass(frozen=True)
class TierAssignment:
    a_level: tuple[int, ...]
    b_level: tuple[int, ...]
    c_level: tuple[int, ...]
    proportions: tuple[float, float, float]

    def all_ids(self) -> tuple[int, ...]:
        return self.a_level + self.b_level + self.c_level


@dataclass(frozen=True)
class ConsensusParams:
    p_malicious: float = 0.2
    bonus: float = 0.01
    penalty: float = 0.05
    tier_proportions: tuple[float, float, float] = (0.2, 0.5, 0.3)

    def __post_init__(self):
        if not (0.0 <= self.p_malicious <= 1.0):
            raise ConfigError(f"consensus.p_malicious={self.p_malicious}: must lie in [0, 1]")
        if self.bonus < 0 or self.penalty < 0:
            raise ConfigError("consensus.bonus and penalty must be >= 0")
        if any(p < 0 for p in self.tier_proportions) or abs(sum(self.tier_proportions) - 1.0) > 1e-9:
            raise ConfigError("consensus.tier_proportions must be non-negative and sum to 1")


def _largest_remainder_counts(n: int, proportions: Sequence[float]) -> list[int]:
    raw = [p * n for p in proportions]
    counts = [math.floor(x) for x in raw]
    short = n - sum(counts)
    # distribute leftovers by largest fractional part, ties to earlier tiers
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[:short]:
        counts[i] += 1
    return counts


def assign_tiers(
    rsus: Sequence[tuple[int, float]],
    proportions: Sequence[float] = (0.2, 0.5, 0.3),
) -> TierAssignment:
    """Cut the reputation-sorted miners into A/B/C tiers.

    Sorting is by reputation descending with ids ascending as tie-break;
    tier sizes come from largest-remainder rounding of the proportions.
    """
    if not rsus:
        raise UsageError("need at least one RSU to tier")
    if len(proportions) != 3 or any(p < 0 for p in proportions):
        raise UsageError("proportions must be three non-negative fractions")
    if abs(sum(proportions) - 1.0) > 1e-9:
        raise UsageError("proportions must sum to 1")
    ranked = sorted(rsus, key=lambda ir: (-ir[1], ir[0]))
    ids = [i for i, _ in ranked]
    na, nb, _ = _largest_remainder_counts(len(ids), proportions)
    return TierAssignment(
        a_level=tuple(ids[:na]),
        b_level=tuple(ids[na : na + nb]),
        c_level=tuple(ids[na + nb :]),
        proportions=(float(proportions[0]), float(proportions[1]), float(proportions[2])),
    )


def security_probability(n: int, p_m: float) -> float:
    """P(at most floor(N/3) of N delegates are malicious) — exact binomial tail."""
    if n < 1:
        raise UsageError("delegate count must be >= 1")
    if not (0.0 <= p_m <= 1.0):
        raise UsageError(f"p_m={p_m} outside [0, 1]")
    limit = n // 3
    terms = [math.comb(n, z) * p_m**z * (1.0 - p_m) ** (n - z) for z in range(limit + 1)]
    return min(1.0, math.fsum(terms))


@dataclass
class RoundResult:
    accepted: bool
    malicious: tuple[int, ...]
    deltas: dict[int, float]
    new_reputations: dict[int, float]


def simulate_round(
    tiers: TierAssignment,
    reputations: Mapping[int, float],
    params: ConsensusParams,
    rng: np.random.Generator,
) -> RoundResult:
    """One abstract block round.

    Each delegate turns malicious independently with p_malicious; the block
    is accepted when the malicious count stays within the BFT bound.  Honest
    participants (including the always-correct A and C tiers) gain the
    bonus, malicious delegates pay the penalty; updates clamp to [0, 1].
    """
    if not tiers.b_level:
        raise UsageError("cannot run a round with an empty B-level group")
    n = len(tiers.b_level)
    draws = rng.random(n)
    malicious = tuple(
        rid for rid, x in zip(tiers.b_level, draws) if x < params.p_malicious
    )
    accepted = len(malicious) <= n // 3
    malicious_set = set(malicious)
    deltas: dict[int, float] = {}
    new_reps: dict[int, float] = {}
    for rid in tiers.all_ids():
        delta = -params.penalty if rid in malicious_set else params.bonus
        current = reputations[rid]
        updated = min(1.0, max(0.0, current + delta))
        deltas[rid] = updated - current
        new_reps[rid] = updated
    return RoundResult(accepted, malicious, deltas, new_reps)
