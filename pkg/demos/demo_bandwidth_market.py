#!/usr/bin/env python3
"""The bandwidth market between a coalition and its users.

The coalition posts a unit price; each user buys its concave-optimal
bandwidth or opts out.  The grid scan and the closed-form stationary price
land on the same equilibrium, and sampled unilateral deviations confirm
nobody can do better alone.
"""

import numpy as np

from vtmsim import (
    MarketParams,
    VmuProfile,
    best_response,
    closed_form_price,
    solve_grid,
    verify_equilibrium,
)

market = MarketParams(cost=5.0, price_max=100.0, bandwidth_max=10.0)
profiles = [VmuProfile(i, alpha, 0.5) for i, alpha in enumerate((0.3, 0.5, 0.7, 0.9))]

print("users (latency sensitivity, data volume):")
for p in profiles:
    print(f"  vmu {p.id}: alpha={p.alpha}, data={p.data_size} Mb")

outcome = solve_grid(profiles, market)
p_closed = closed_form_price(profiles, market)
print(f"\ngrid price    : {outcome.price:.3f}  (step {outcome.grid_step:.3f})")
print(f"closed form   : {p_closed:.3f}")
print(f"leader utility: {outcome.leader_utility:.4f}")
print("demands:")
for vid, demand in outcome.demands.items():
    print(f"  vmu {vid}: {demand:.5f} MHz (utility {outcome.follower_utilities[vid]:.4f})")

ok = verify_equilibrium(outcome, profiles, market, trials=400, rng=np.random.default_rng(1))
print(f"\nno profitable unilateral deviation found: {ok}")

print("\nhow demand responds to price (alpha = 0.5):")
probe = VmuProfile(99, 0.5, 0.5)
for price in (10.0, 20.0, 30.0):
    print(f"  P={price:>5.1f}: B* = {best_response(probe, price, market):.5f} MHz")
b10 = best_response(probe, 10.0, market)
b30 = best_response(probe, 30.0, market)
print(f"  raising P from 10 to 30 cuts the purchase by {(b10 - b30) / b10:.1%}")

print("\nhow the posted price responds to cost (alpha = 0.5):")
for cost in (5.0, 10.0):
    m = MarketParams(cost=cost, price_max=100.0, bandwidth_max=10.0)
    print(f"  C={cost:>4.1f}: P* = {closed_form_price([probe], m):.2f}")
