#!/usr/bin/env python3
"""Reputation-tiered block validation and the BFT safety curve.

Miners are cut into A/B/C tiers by reputation; the B tier validates blocks
and a block survives while at most a third of its validators misbehave.
The analytic safety probability is compared with simulated rounds.
"""

import numpy as np

from vtmsim import ConsensusParams, assign_tiers, security_probability, simulate_round

# analytic curve: bigger validator groups are safer (on the 3k+1 lattice)
print("safety probability by validator group size:")
print(f"{'N':>4} {'p_m=0.1':>9} {'p_m=0.2':>9} {'p_m=0.3':>9}")
for n in range(7, 41, 3):
    row = " ".join(f"{security_probability(n, p):>9.5f}" for p in (0.1, 0.2, 0.3))
    print(f"{n:>4} {row}")

# one concrete tiering plus a simulated epoch
rng = np.random.default_rng(3)
rsus = [(i, float(rng.uniform(0.4, 1.0))) for i in range(20)]
tiers = assign_tiers(rsus, (0.2, 0.5, 0.3))
print(f"\ntiers from 20 miners: A={tiers.a_level} B={tiers.b_level} C={tiers.c_level}")

params = ConsensusParams(p_malicious=0.2, bonus=0.01, penalty=0.05)
reputations = dict(rsus)
accepted = 0
rounds = 20_000
for _ in range(rounds):
    result = simulate_round(tiers, reputations, params, rng)
    accepted += result.accepted
analytic = security_probability(len(tiers.b_level), params.p_malicious)
print(f"\nsimulated acceptance over {rounds} rounds: {accepted / rounds:.4f}")
print(f"analytic safety probability:             {analytic:.4f}")

one = simulate_round(tiers, reputations, params, np.random.default_rng(8))
print(f"\none round: accepted={one.accepted}, malicious validators={list(one.malicious)}")
for rid in tiers.b_level:
    delta = one.deltas[rid]
    print(f"  rsu {rid}: {reputations[rid]:.3f} -> {one.new_reputations[rid]:.3f} ({delta:+.3f})")
