#!/usr/bin/env python3
"""One full migration round, end to end.

Interaction histories produce fused reputations; untrusted RSUs are
excluded; the surviving nodes play the coalition game; the winning
coalition sells its pooled bandwidth at the equilibrium price; and a
block round settles the reputation updates.
"""

from vtmsim.harness import ScenarioConfig, run_pipeline
from vtmsim.harness.config import MarketConfig, PopulationConfig

cfg = ScenarioConfig(
    seed=5,
    population=PopulationConfig(rsus=60, vmus=25, nodes=8),
    market=MarketConfig(data_size=0.5),
)

result = run_pipeline(cfg)

print(f"pipeline status: {result.status}\n")
for step, detail in result.audit:
    print(f"  [{step}] {detail}")

print(f"\nexcluded RSUs ({len(result.excluded_rsus)}): {list(result.excluded_rsus)}")
print(f"selected coalition nodes: {list(result.selected_nodes)}")
print(f"pooled bandwidth for sale: {result.bandwidth_max:.2f} MHz")
print(f"settled unit price: {result.outcome.price:.2f}")

buyers = {v: b for v, b in result.outcome.demands.items() if b > 0}
print(f"buyers: {len(buyers)} of {cfg.population.vmus} users")
for vid, demand in sorted(buyers.items())[:8]:
    print(f"  vmu {vid}: {demand:.5f} MHz")
if len(buyers) > 8:
    print("  ...")

print(f"\nblock round accepted: {result.consensus.accepted}")
moved = {
    rid: (result.rsu_reputations[rid], result.post_reputations[rid])
    for rid in result.consensus.deltas
    if result.consensus.deltas[rid] != 0.0
}
up = sum(1 for old, new in moved.values() if new > old)
down = len(moved) - up
print(f"reputation updates: {up} rewarded, {down} penalised")
