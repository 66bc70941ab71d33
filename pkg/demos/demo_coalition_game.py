#!/usr/bin/env python3
"""Merge-and-split coalition formation on a desk-scale instance.

Six RSU nodes with random reputations and bandwidth offers play the
coalition game: any merge or split goes through only when nobody affected
loses utility and someone strictly gains.  At this size the scans are
exhaustive, so the fixed point provably survives the defection check.
"""

import numpy as np

from vtmsim import (
    CoalitionContext,
    CoalitionParams,
    Rsu,
    RsuNode,
    check_dhp_stability,
    form_coalitions,
    select_best,
)

rng = np.random.default_rng(21)

nodes = {}
rsus = {}
next_rsu = 0
for nid in range(6):
    size = int(rng.integers(1, 4))
    members = range(next_rsu, next_rsu + size)
    for rid in members:
        rsus[rid] = Rsu(rid, float(rng.uniform(0.55, 0.95)), float(rng.uniform(2.0, 8.0)))
    nodes[nid] = RsuNode(nid, frozenset(members))
    next_rsu += size

params = CoalitionParams()
ctx = CoalitionContext(nodes, rsus, params)

print("population:")
for nid, node in nodes.items():
    reps = ", ".join(f"{rsus[r].reputation:.2f}" for r in sorted(node.members))
    print(f"  node {nid}: rsus {sorted(node.members)} (reputations {reps})")
print()

result = form_coalitions(nodes, rsus, params, ctx=ctx)
print(f"converged after {result.rounds} rounds with {len(result.moves)} accepted moves:")
for move in result.moves:
    before = [sorted(c.node_ids) for c in move.before]
    after = [sorted(c.node_ids) for c in move.after]
    print(f"  {move.kind}: {before} -> {after}")
print()

print("final partition:")
for coal in result.partition.coalitions:
    rsu_count, bandwidth, mean_rep = ctx.metrics(coal)
    print(
        f"  nodes {sorted(coal.node_ids)}: {rsu_count} RSUs, "
        f"{bandwidth:.1f} MHz, mean reputation {mean_rep:.3f}, "
        f"utility {ctx.utility(coal):.4f}"
    )

best = select_best(result.partition, ctx)
print(f"\nselected coalition: nodes {sorted(best.node_ids)}")
print(f"defection-stable: {check_dhp_stability(result.partition, ctx)}")
