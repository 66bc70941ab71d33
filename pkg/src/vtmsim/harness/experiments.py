"""The eight seeded experiment families and their tabular results.

Each experiment is a pure function of (config, seed): sweep cells are
evaluated in a fixed order and serialised with repr-level floats, so a
rerun with the same config produces byte-identical CSV output.  The one
measured quantity — wall-clock coalition-formation time — is kept out of
the CSV (it goes to a .txt sidecar and the in-memory result) so the CSV
contract stays deterministic.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from ..coalition import CoalitionContext, RsuNode, form_coalitions, select_best
from ..consensus import security_probability
from ..errors import UsageError
from ..reputation import InteractionLog, expectation, local_opinion
from ..stackelberg import VmuProfile, best_response, closed_form_price, solve_grid
from .config import ScenarioConfig
from .csvio import render_csv, write_text
from .scenarios import (
    build_rsus,
    compute_population_reputation,
    draw_bandwidth_offers,
    draw_misbehavior_counts,
    make_rsu_nodes,
    search_seed_history,
)

UNIT_CONVENTION = (
    "data Mb, bandwidth MHz, rate Mb/s, latency s; "
    "power dBm->W via 10^((x-30)/10), gain dB->ratio via 10^(x/10)"
)


@dataclass
class ExperimentResult:
    name: str
    columns: list[str]
    rows: list[tuple]
    metadata: dict[str, object]
    sidecars: dict[str, str] = field(default_factory=dict)
    # formation-time only: measured (rsus, nodes, median_seconds); volatile,
    # deliberately not serialised into the CSV
    wallclock: list[tuple[int, int, float]] | None = None

    def to_csv(self) -> str:
        return render_csv(self.columns, self.rows, self.metadata)

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        paths = [write_text(out / f"{self.name}.csv", self.to_csv())]
        for fname, content in self.sidecars.items():
            paths.append(write_text(out / fname, content))
        return paths

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def _base_metadata(config: ScenarioConfig, name: str, **extra) -> dict[str, object]:
    md: dict[str, object] = {
        "experiment": name,
        "seed": config.seed,
        "version": __version__,
        "units": UNIT_CONVENTION,
    }
    md.update(extra)
    return md


def _rng(config: ScenarioConfig, stream: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, stream])


# ---------------------------------------------------------------------------
# reputation-decay: one unreliable RSU watched over time


def _decay_scenario_counts(config: ScenarioConfig, rng: np.random.Generator):
    exp = config.experiments.reputation_decay
    seeds = search_seed_history(config.reputation, exp.initial_reputation)
    times = np.array([t for t, _ in seeds] + list(range(1, exp.horizon + 1)))
    n_windows = len(times)
    pos = np.zeros((exp.vmus, 1, n_windows), dtype=np.int64)
    neg = np.zeros_like(pos)
    n_seed = len(seeds)
    for i, (_, p) in enumerate(seeds):
        pos[:, 0, i] = p
    favored = rng.permutation(exp.vmus)[: max(1, int(np.ceil(exp.favored_fraction * exp.vmus)))]
    favored_mask = np.zeros(exp.vmus, dtype=bool)
    favored_mask[favored] = True
    for i in range(n_seed, n_windows):
        t = int(times[i])
        p_draw = rng.integers(1, 101, size=exp.vmus)
        q_draw = rng.integers(1, 201, size=exp.vmus)
        if t < exp.misbehave_from:
            pos[:, 0, i] = p_draw
        else:
            pos[favored_mask, 0, i] = p_draw[favored_mask]
            neg[~favored_mask, 0, i] = q_draw[~favored_mask]
    return pos, neg, times, int(favored[0]), seeds


def run_reputation_decay(config: ScenarioConfig) -> ExperimentResult:
    """Four views of a misbehaving RSU's reputation over time.

    The fused freshness-aware curve should dive under the trust threshold;
    dropping the attenuation weights delays the dive; a favoured VMU's
    local-only view and the naive positive-ratio baseline keep rising.
    """
    exp = config.experiments.reputation_decay
    rng = _rng(config, 1)
    pos, neg, times, observer, seeds = _decay_scenario_counts(config, rng)
    rows = []
    for now in range(0, exp.horizon + 1):
        fused = compute_population_reputation(
            pos, neg, times, now, config.reputation, freshness=True
        )
        flat = compute_population_reputation(
            pos, neg, times, now, config.reputation, freshness=False
        )
        log = InteractionLog(
            observer,
            0,
            [
                (int(t), int(pos[observer, 0, i]), int(neg[observer, 0, i]))
                for i, t in enumerate(times)
                if pos[observer, 0, i] > 0 or neg[observer, 0, i] > 0
            ],
        )
        local = expectation(local_opinion(log, now, config.reputation))
        past = times <= now
        total_p = int(pos[observer, 0, past].sum())
        total_q = int(neg[observer, 0, past].sum())
        naive = total_p / (total_p + total_q + 1)
        rows.append(
            (
                now,
                float(fused.fused_expectation[observer, 0]),
                float(flat.fused_expectation[observer, 0]),
                float(local),
                float(naive),
            )
        )
    metadata = _base_metadata(
        config,
        "reputation-decay",
        vmus=exp.vmus,
        favored_fraction=exp.favored_fraction,
        misbehave_from=exp.misbehave_from,
        tau=config.reputation.tau,
        threshold=config.coalition.reputation_threshold,
        seed_history=";".join(f"t{t}:p{p}" for t, p in seeds),
        observer=observer,
    )
    return ExperimentResult(
        "reputation-decay",
        ["t", "with_freshness", "without_freshness", "local_only", "no_protection"],
        rows,
        metadata,
    )


# ---------------------------------------------------------------------------
# coalition-distribution: who ends up with whom


def _formation_instance(config: ScenarioConfig, n_nodes: int, rng: np.random.Generator):
    n_rsus = config.population.rsus
    reputations = rng.uniform(config.coalition.reputation_threshold, 1.0, size=n_rsus)
    bandwidths = draw_bandwidth_offers(
        n_rsus, rng, config.population.bandwidth_min, config.population.bandwidth_max
    )
    rsus = build_rsus(reputations, bandwidths)
    nodes = make_rsu_nodes(n_nodes, n_rsus, rng)
    return nodes, rsus


def run_coalition_distribution(config: ScenarioConfig) -> ExperimentResult:
    exp = config.experiments.coalition_distribution
    rows = []
    for n_nodes in exp.node_counts:
        rng = _rng(config, 2000 + n_nodes)
        nodes, rsus = _formation_instance(config, n_nodes, rng)
        ctx = CoalitionContext(nodes, rsus, config.coalition, total_rsus=config.population.rsus)
        result = form_coalitions(nodes, rsus, config.coalition, ctx=ctx)
        best = select_best(result.partition, ctx)
        ranked = sorted(
            result.partition.coalitions,
            key=lambda c: (-ctx.metrics(c)[0], c.sort_key()),
        )
        for rank, coal in enumerate(ranked, start=1):
            rsu_count, bandwidth, mean_rep = ctx.metrics(coal)
            rows.append(
                (
                    n_nodes,
                    rank,
                    len(coal.node_ids),
                    rsu_count,
                    float(bandwidth),
                    float(ctx.utility(coal)),
                    coal == best,
                )
            )
    metadata = _base_metadata(
        config,
        "coalition-distribution",
        rsus=config.population.rsus,
        node_counts=",".join(str(n) for n in exp.node_counts),
    )
    return ExperimentResult(
        "coalition-distribution",
        ["node_count", "coalition_rank", "num_nodes", "num_rsus", "bandwidth", "utility", "selected"],
        rows,
        metadata,
    )


# ---------------------------------------------------------------------------
# formation-time: measured cost of the coalition game


def run_formation_time(config: ScenarioConfig) -> ExperimentResult:
    """Median wall-clock formation time per (R, N) cell plus deterministic
    work counters.

    Cells run serially to avoid contention skew.  Measured seconds are
    volatile and therefore live in the sidecar and in `wallclock`, not in
    the CSV.
    """
    exp = config.experiments.formation_time
    instances = {}
    for n_rsus in exp.rsu_counts:
        for n_nodes in exp.node_counts:
            rng = _rng(config, 3000 + 97 * n_rsus + n_nodes)
            reputations = rng.uniform(config.coalition.reputation_threshold, 1.0, size=n_rsus)
            bandwidths = draw_bandwidth_offers(
                n_rsus, rng, config.population.bandwidth_min, config.population.bandwidth_max
            )
            rsus = build_rsus(reputations, bandwidths)
            nodes = make_rsu_nodes(n_nodes, n_rsus, rng)
            instances[(n_rsus, n_nodes)] = (nodes, rsus)

    # serial execution, with repetitions rotating across the whole grid so a
    # machine-load episode touches every cell's samples alike instead of
    # swallowing one cell's entire median
    samples: dict[tuple[int, int], list[float]] = {key: [] for key in instances}
    results = {}
    for _ in range(exp.repetitions):
        for n_nodes in exp.node_counts:
            for n_rsus in exp.rsu_counts:
                nodes, rsus = instances[(n_rsus, n_nodes)]
                start = time.perf_counter()
                result = form_coalitions(nodes, rsus, config.coalition, total_rsus=n_rsus)
                samples[(n_rsus, n_nodes)].append(time.perf_counter() - start)
                results[(n_rsus, n_nodes)] = result

    rows = []
    wallclock = []
    timing_lines = ["# rsus nodes median_seconds (measured; excluded from the CSV contract)"]
    for n_rsus in exp.rsu_counts:
        for n_nodes in exp.node_counts:
            result = results[(n_rsus, n_nodes)]
            median = statistics.median(samples[(n_rsus, n_nodes)])
            rows.append(
                (
                    n_rsus,
                    n_nodes,
                    exp.repetitions,
                    len(result.moves),
                    result.rounds,
                    result.utility_evaluations,
                    len(result.partition.coalitions),
                )
            )
            wallclock.append((n_rsus, n_nodes, median))
            timing_lines.append(f"{n_rsus} {n_nodes} {median:.6f}")
    metadata = _base_metadata(
        config,
        "formation-time",
        repetitions=exp.repetitions,
        timing_sidecar="formation-time-wallclock.txt",
    )
    return ExperimentResult(
        "formation-time",
        ["rsus", "nodes", "repetitions", "accepted_moves", "rounds", "utility_evaluations", "final_coalitions"],
        rows,
        metadata,
        sidecars={"formation-time-wallclock.txt": "\n".join(timing_lines) + "\n"},
        wallclock=wallclock,
    )


# ---------------------------------------------------------------------------
# misbehavior-sweep: does threshold exclusion keep coalitions trustworthy?


def _selected_mean_reputation(
    config: ScenarioConfig,
    nodes,
    rsus,
    exclude: bool,
) -> float:
    threshold = config.coalition.reputation_threshold
    if exclude:
        kept = {rid for rid, rsu in rsus.items() if rsu.reputation >= threshold}
        trimmed = {}
        for nid, node in nodes.items():
            members = node.members & kept
            if members:
                trimmed[nid] = RsuNode(nid, frozenset(members))
        nodes = trimmed
        if not nodes:
            return float("nan")
    ctx = CoalitionContext(nodes, rsus, config.coalition, total_rsus=len(rsus))
    result = form_coalitions(nodes, rsus, config.coalition, ctx=ctx)
    best = select_best(result.partition, ctx)
    _, _, mean_rep = ctx.metrics(best)
    return mean_rep


def run_misbehavior_sweep(config: ScenarioConfig) -> ExperimentResult:
    """Mean reputation of the selected coalition vs the misbehaving share.

    With threshold exclusion the mean barely moves; the ablation admits the
    misbehaving RSUs and degrades as their share grows.  Bad sets nest as
    the ratio rises so reputations fall pointwise within one seed.
    """
    exp = config.experiments.misbehavior_sweep
    n_rsus = config.population.rsus
    per_cell: dict[tuple[float, int, bool], list[float]] = {}
    for seed_idx in range(exp.seeds_per_cell):
        rng = _rng(config, 4000 + seed_idx)
        draws = draw_misbehavior_counts(
            exp.vmus, n_rsus, config.reputation.tau, rng, config.population.interaction_prob
        )
        bandwidths = draw_bandwidth_offers(
            n_rsus, rng, config.population.bandwidth_min, config.population.bandwidth_max
        )
        node_sets = {
            n_nodes: make_rsu_nodes(n_nodes, n_rsus, _rng(config, 4500 + 31 * seed_idx + n_nodes))
            for n_nodes in exp.node_counts
        }
        for ratio in exp.ratios:
            pos, neg, _ = draws.counts_at_ratio(ratio)
            now = int(draws.times[-1])
            rep = compute_population_reputation(pos, neg, draws.times, now, config.reputation)
            rsus = build_rsus(rep.rsu_final, bandwidths)
            for n_nodes in exp.node_counts:
                for exclude in (True, False):
                    value = _selected_mean_reputation(config, node_sets[n_nodes], rsus, exclude)
                    per_cell.setdefault((ratio, n_nodes, exclude), []).append(value)

    columns = ["misbehavior_ratio"]
    for n_nodes in exp.node_counts:
        columns.append(f"excluded_n{n_nodes}")
    for n_nodes in exp.node_counts:
        columns.append(f"ablation_n{n_nodes}")
    rows = []
    for ratio in exp.ratios:
        row: list = [float(ratio)]
        for exclude in (True, False):
            for n_nodes in exp.node_counts:
                vals = per_cell[(ratio, n_nodes, exclude)]
                row.append(float(np.mean(vals)))
        rows.append(tuple(row))
    metadata = _base_metadata(
        config,
        "misbehavior-sweep",
        rsus=n_rsus,
        vmus=exp.vmus,
        seeds_per_cell=exp.seeds_per_cell,
        threshold=config.coalition.reputation_threshold,
        node_counts=",".join(str(n) for n in exp.node_counts),
    )
    return ExperimentResult("misbehavior-sweep", columns, rows, metadata)


# ---------------------------------------------------------------------------
# consensus-security: analytic BFT safety curve


def run_consensus_security(config: ScenarioConfig) -> ExperimentResult:
    exp = config.experiments.consensus_security
    columns = ["delegates"] + [f"safety_pm_{p:g}" for p in exp.p_malicious]
    rows = []
    for n in exp.delegate_counts:
        rows.append((n, *(security_probability(n, p) for p in exp.p_malicious)))
    metadata = _base_metadata(
        config,
        "consensus-security",
        p_malicious=",".join(f"{p:g}" for p in exp.p_malicious),
        note="delegate sweep starts at 7: the safety tail is not monotone from 4 near p_m=1/3",
    )
    return ExperimentResult("consensus-security", columns, rows, metadata)


# ---------------------------------------------------------------------------
# market sweeps: follower demand, leader price, leader utility


def _market_profile(config: ScenarioConfig, alpha: float) -> VmuProfile:
    return VmuProfile(0, alpha, config.experiments.market.data_size)


def run_market_demand(config: ScenarioConfig) -> ExperimentResult:
    exp = config.experiments.market
    params, data_size = config.market_params(data_size=exp.data_size)
    k = params.spectral_eff()
    c0 = data_size * params.compression / k
    columns = ["alpha"] + [f"demand_p{p:g}" for p in exp.prices]
    rows = []
    for alpha in exp.alphas:
        profile = _market_profile(config, alpha)
        rows.append(
            (float(alpha), *(best_response(profile, price, params) for price in exp.prices))
        )
    drop = (0.5 / 10 - 0.5 / 30) / (0.5 / 10 - c0)
    metadata = _base_metadata(
        config,
        "market-demand",
        data_size=data_size,
        latency_offset_c0=c0,
    )
    metadata["demand_drop_alpha0.5_p10_to_p30"] = drop
    return ExperimentResult("market-demand", columns, rows, metadata)


def run_market_price(config: ScenarioConfig) -> ExperimentResult:
    exp = config.experiments.market
    columns = ["alpha"]
    for c in exp.costs:
        columns += [f"price_grid_c{c:g}", f"price_closed_c{c:g}"]
    rows = []
    for alpha in exp.alphas:
        row: list = [float(alpha)]
        for c in exp.costs:
            params, data_size = config.market_params(cost=c, data_size=exp.data_size)
            profile = VmuProfile(0, alpha, data_size)
            outcome = solve_grid([profile], params)
            row += [outcome.price, closed_form_price([profile], params)]
        rows.append(tuple(row))
    metadata = _base_metadata(
        config,
        "market-price",
        data_size=config.experiments.market.data_size,
        costs=",".join(f"{c:g}" for c in exp.costs),
        grid_step=config.market_params()[0].step(),
    )
    return ExperimentResult("market-price", columns, rows, metadata)


def run_market_utility(config: ScenarioConfig) -> ExperimentResult:
    exp = config.experiments.market
    columns = ["alpha"] + [f"utility_c{c:g}" for c in exp.costs]
    rows = []
    for alpha in exp.alphas:
        row: list = [float(alpha)]
        for c in exp.costs:
            params, data_size = config.market_params(cost=c, data_size=exp.data_size)
            outcome = solve_grid([VmuProfile(0, alpha, data_size)], params)
            row.append(outcome.leader_utility)
        rows.append(tuple(row))
    metadata = _base_metadata(
        config,
        "market-utility",
        data_size=config.experiments.market.data_size,
        costs=",".join(f"{c:g}" for c in exp.costs),
        grid_step=config.market_params()[0].step(),
    )
    return ExperimentResult("market-utility", columns, rows, metadata)


# ---------------------------------------------------------------------------

_RUNNERS = {
    "reputation-decay": run_reputation_decay,
    "coalition-distribution": run_coalition_distribution,
    "formation-time": run_formation_time,
    "misbehavior-sweep": run_misbehavior_sweep,
    "consensus-security": run_consensus_security,
    "market-demand": run_market_demand,
    "market-price": run_market_price,
    "market-utility": run_market_utility,
}

EXPERIMENT_NAMES = tuple(_RUNNERS)


def run_experiment(name: str, config: ScenarioConfig) -> ExperimentResult:
    try:
        runner = _RUNNERS[name]
    except KeyError:
        raise UsageError(
            f"unknown experiment '{name}'; choose from {', '.join(EXPERIMENT_NAMES)}"
        ) from None
    return runner(config)
