#!/usr/bin/env python3
"""Watching a misbehaving roadside unit lose its reputation.

One RSU starts with a seeded good history worth a reputation of 0.7, then
from t=3 keeps treating 10% of users well while serving everyone else
negative interactions.  We track four views of the same RSU:

  * fused opinion with freshness weighting and recommendations (the full scheme)
  * the same fusion without time attenuation
  * the favoured user's local opinion alone
  * a naive positive-count ratio with no protection at all

The full scheme dives under the 0.5 trust threshold first; the naive views
keep climbing because the favoured user never sees the misbehaviour.
"""

from vtmsim.harness import ScenarioConfig, run_experiment

cfg = ScenarioConfig(seed=7)
result = run_experiment("reputation-decay", cfg)

print(f"seeded history: {result.metadata['seed_history']} (local expectation ≈ 0.7)")
print(f"misbehaviour starts at t={result.metadata['misbehave_from']}, threshold 0.5")
print()
print(f"{'t':>3} {'fused+fresh':>12} {'fused-flat':>11} {'local-only':>11} {'naive':>7}")
for t, fresh, flat, local, naive in result.rows:
    marker = "  <- below threshold" if fresh < 0.5 else ""
    print(f"{t:>3} {fresh:>12.4f} {flat:>11.4f} {local:>11.4f} {naive:>7.4f}{marker}")

crossing = next((t for t, fresh, *_ in result.rows if fresh < 0.5), None)
flat_crossing = next((t for t, _, flat, *_ in result.rows if flat < 0.5), None)
print()
print(f"freshness-aware fusion crossed at t={crossing}, flat weighting at t={flat_crossing}")
