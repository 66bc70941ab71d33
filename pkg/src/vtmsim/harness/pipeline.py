"""End-to-end migration round: reputation -> coalition -> market -> consensus.

One call walks the whole pipeline for a seeded population: compute fused
reputations from interaction histories, drop RSUs under the trust
threshold, form coalitions among the surviving nodes, sell the selected
coalition's bandwidth to the VMUs, and settle one block round that updates
reputations.  Degenerate situations (everyone excluded, nobody buying)
come back as named outcomes instead of exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..coalition import CoalitionContext, RsuNode, form_coalitions, select_best
from ..consensus import RoundResult, assign_tiers, simulate_round
from ..stackelberg import MarketOutcome, VmuProfile, solve_grid
from .config import ScenarioConfig
from .csvio import render_csv
from .scenarios import (
    build_rsus,
    compute_population_reputation,
    draw_bandwidth_offers,
    draw_misbehavior_counts,
    make_rsu_nodes,
)


@dataclass
class PipelineResult:
    status: str  # "ok" | "no-coalition" | "empty-market"
    rsu_reputations: dict[int, float]
    excluded_rsus: tuple[int, ...]
    selected_nodes: tuple[int, ...] | None
    selected_rsus: tuple[int, ...] | None
    bandwidth_max: float | None
    outcome: MarketOutcome | None
    consensus: RoundResult | None
    post_reputations: dict[int, float] | None
    audit: list[tuple[str, str]] = field(default_factory=list)

    def audit_csv(self, seed: int, version: str) -> str:
        rows = [(i, step, detail) for i, (step, detail) in enumerate(self.audit, start=1)]
        return render_csv(
            ["step", "stage", "detail"],
            rows,
            {"experiment": "pipeline", "seed": seed, "version": version, "status": self.status},
        )


def run_pipeline(config: ScenarioConfig) -> PipelineResult:
    pop = config.population
    rep_params = config.reputation
    audit: list[tuple[str, str]] = []

    rng_pop = np.random.default_rng([config.seed, 101])
    rng_interactions = np.random.default_rng([config.seed, 102])
    rng_market = np.random.default_rng([config.seed, 103])
    rng_consensus = np.random.default_rng([config.seed, 104])

    nodes = make_rsu_nodes(pop.nodes, pop.rsus, rng_pop, pop.node_size_range())
    bandwidths = draw_bandwidth_offers(pop.rsus, rng_pop, pop.bandwidth_min, pop.bandwidth_max)
    audit.append(("population", f"rsus={pop.rsus} vmus={pop.vmus} nodes={pop.nodes}"))

    draws = draw_misbehavior_counts(
        pop.vmus, pop.rsus, rep_params.tau, rng_interactions, pop.interaction_prob
    )
    pos, neg, bad_mask = draws.counts_at_ratio(config.pipeline.misbehavior_ratio)
    now = int(draws.times[-1])
    reputation = compute_population_reputation(pos, neg, draws.times, now, rep_params)
    reputations = {i: float(reputation.rsu_final[i]) for i in range(pop.rsus)}
    audit.append(
        (
            "reputation",
            f"windows={rep_params.tau} misbehaving={int(bad_mask.sum())} "
            f"mean={np.mean(reputation.rsu_final):.4f}",
        )
    )

    threshold = config.coalition.reputation_threshold
    excluded = tuple(sorted(i for i, r in reputations.items() if r < threshold))
    kept = set(reputations) - set(excluded)
    audit.append(("exclusion", f"threshold={threshold} excluded={len(excluded)}"))

    trimmed: dict[int, RsuNode] = {}
    for nid, node in nodes.items():
        members = node.members & kept
        if members:
            trimmed[nid] = RsuNode(nid, frozenset(members))
    if not trimmed:
        audit.append(("coalition", "no nodes left after exclusion"))
        return PipelineResult(
            "no-coalition", reputations, excluded, None, None, None, None, None, None, audit
        )

    rsus = build_rsus(reputation.rsu_final, bandwidths)
    ctx = CoalitionContext(trimmed, rsus, config.coalition, total_rsus=pop.rsus)
    formation = form_coalitions(trimmed, rsus, config.coalition, ctx=ctx)
    best = select_best(formation.partition, ctx)
    selected_rsus = tuple(sorted(ctx.rsu_union(best)))
    b_max = ctx.metrics(best)[1]
    audit.append(
        (
            "coalition",
            f"moves={len(formation.moves)} coalitions={len(formation.partition.coalitions)} "
            f"selected_nodes={sorted(best.node_ids)} b_max={b_max:.4f}",
        )
    )

    alphas = rng_market.uniform(config.market.alpha_min, config.market.alpha_max, size=pop.vmus)
    profiles = [
        VmuProfile(v, float(alphas[v]), config.market.data_size) for v in range(pop.vmus)
    ]
    market_params, _ = config.market_params(bandwidth_max=b_max)
    outcome = solve_grid(profiles, market_params)
    status = "empty-market" if outcome.is_empty() else "ok"
    audit.append(
        (
            "market",
            f"price={outcome.price:.4f} demand={outcome.total_demand():.6f} "
            f"leader_utility={outcome.leader_utility:.4f}",
        )
    )

    participating = [(i, reputations[i]) for i in sorted(kept)]
    tiers = assign_tiers(participating, config.consensus.tier_proportions)
    round_result = simulate_round(tiers, reputations, config.consensus, rng_consensus)
    post = dict(reputations)
    post.update(round_result.new_reputations)
    audit.append(
        (
            "consensus",
            f"delegates={len(tiers.b_level)} malicious={len(round_result.malicious)} "
            f"accepted={round_result.accepted}",
        )
    )

    return PipelineResult(
        status,
        reputations,
        excluded,
        tuple(sorted(best.node_ids)),
        selected_rsus,
        b_max,
        outcome,
        round_result,
        post,
        audit,
    )
