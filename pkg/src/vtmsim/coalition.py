"""Coalition formation over RSU nodes via Pareto-improving merges and splits.

An RSU node (one edge server plus the RSUs it serves) is the atomic player.
A coalition's worth combines its contribution (share of all RSUs plus mean
member reputation), a log latency reward driven by the pooled bandwidth, and
a convex communication cost in the coalition's node count.  Utility is
non-transferable: every RSU of a node receives its coalition's utility, so
the Pareto comparison between partitions reduces to comparing per-node
utilities.

Merge-and-split runs from the all-singletons partition and applies only
moves that leave no affected node worse off and at least one strictly
better, hence it terminates and its fixed point cannot be improved by any
move the scan covers.  At desk scale (<= 8 nodes) the scans are exhaustive
(all unions of coalitions, all sub-partitions of a coalition), which makes
the fixed point provably stable under the defection check below; larger
instances fall back to pairwise merges and two-way splits.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ConfigError, InfeasibleCoalitionError, SizeLimitError, UsageError

# Exhaustive-scan bounds: unions of existing coalitions are all enumerated
# when the instance has at most this many nodes, and a coalition's full
# sub-partition lattice is enumerated up to this member count.  Both are
# needed for the defection check to hold exactly on desk-scale instances.
EXHAUSTIVE_NODE_LIMIT = 8
DHP_CHECK_NODE_LIMIT = 10


def db_to_linear(db: float) -> float:
    """Plain ratio from decibels."""
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    """Absolute power from dBm."""
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class ChannelParams:
    """Radio link between the premigration RSU and the coalition.

    tx_power and noise_power are absolute powers on the dBm scale (the
    noise figure is a power, so it converts like one); unit_gain is a
    plain dB ratio.
    """

    tx_power_dbm: float = 40.0
    unit_gain_db: float = -20.0
    distance_m: float = 500.0
    pathloss_exp: float = 2.0
    noise_power_db: float = -150.0

    def __post_init__(self):
        if self.distance_m <= 0:
            raise ConfigError(f"channel.distance_m={self.distance_m}: must be > 0")
        if self.pathloss_exp < 0:
            raise ConfigError(f"channel.pathloss_exp={self.pathloss_exp}: must be >= 0")

    def snr_linear(self) -> float:
        rx = (
            dbm_to_watts(self.tx_power_dbm)
            * db_to_linear(self.unit_gain_db)
            * self.distance_m ** (-self.pathloss_exp)
        )
        return rx / dbm_to_watts(self.noise_power_db)


def spectral_efficiency(ch: ChannelParams) -> float:
    """Shannon efficiency log2(1 + SNR) in bits/s/Hz."""
    return math.log2(1.0 + ch.snr_linear())


@dataclass(frozen=True)
class Rsu:
    id: int
    reputation: float
    bandwidth_offer: float  # MHz

    def __post_init__(self):
        if not (0.0 <= self.reputation <= 1.0):
            raise ConfigError(f"rsu {self.id}: reputation {self.reputation} outside [0, 1]")
        if self.bandwidth_offer < 0:
            raise ConfigError(f"rsu {self.id}: negative bandwidth offer")


@dataclass(frozen=True)
class RsuNode:
    id: int
    members: frozenset[int]  # RSU ids; may overlap with other nodes

    def __post_init__(self):
        if not self.members:
            raise ConfigError(f"node {self.id}: must serve at least one RSU")


@dataclass(frozen=True)
class Coalition:
    node_ids: frozenset[int]

    def __post_init__(self):
        if not self.node_ids:
            raise ConfigError("coalition must contain at least one node")

    def sort_key(self) -> tuple[int, ...]:
        return tuple(sorted(self.node_ids))


@dataclass(frozen=True)
class Partition:
    coalitions: tuple[Coalition, ...]

    def __post_init__(self):
        seen: set[int] = set()
        for c in self.coalitions:
            if seen & c.node_ids:
                raise ConfigError("partition coalitions must be node-disjoint")
            seen |= c.node_ids

    @classmethod
    def singletons(cls, node_ids: Iterable[int]) -> "Partition":
        return cls(tuple(Coalition(frozenset({n})) for n in sorted(node_ids)))

    def node_ids(self) -> frozenset[int]:
        out: set[int] = set()
        for c in self.coalitions:
            out |= c.node_ids
        return frozenset(out)

    def coalition_of(self, node_id: int) -> Coalition:
        for c in self.coalitions:
            if node_id in c.node_ids:
                return c
        raise UsageError(f"node {node_id} not in partition")


@dataclass(frozen=True)
class CoalitionParams:
    """Weights of the coalition utility and migration constants."""

    zeta1: float = 0.5
    zeta2: float = 0.5
    gamma: float = 1.0
    sigma: float = 1.0
    epsilon_cost: float = 0.1
    channel: ChannelParams = field(default_factory=ChannelParams)
    data_size: float = 500.0  # Mb
    compression: float = 0.5
    reputation_threshold: float = 0.5

    def __post_init__(self):
        if self.zeta1 < 0 or self.zeta2 < 0:
            raise ConfigError("coalition.zeta1/zeta2 must be >= 0")
        if not (0.0 < self.epsilon_cost < 1.0):
            raise ConfigError(f"coalition.epsilon_cost={self.epsilon_cost}: must lie in (0, 1)")
        if not (0.0 < self.compression <= 1.0):
            raise ConfigError(f"coalition.compression={self.compression}: must lie in (0, 1]")
        if self.data_size < 0:
            raise ConfigError("coalition.data_size must be >= 0")


class CoalitionContext:
    """Population plus parameters; caches per-coalition metrics and utility.

    total_rsus is the population size R used for the contribution share;
    it defaults to the number of distinct RSUs across the nodes but should
    stay at the pre-exclusion count when low-reputation RSUs were removed.
    """

    def __init__(
        self,
        nodes: Mapping[int, RsuNode],
        rsus: Mapping[int, Rsu],
        params: CoalitionParams,
        total_rsus: int | None = None,
    ):
        self.nodes = dict(nodes)
        self.rsus = dict(rsus)
        self.params = params
        for node in self.nodes.values():
            missing = node.members - self.rsus.keys()
            if missing:
                raise UsageError(f"node {node.id} references unknown RSUs {sorted(missing)}")
        if total_rsus is None:
            all_members: set[int] = set()
            for node in self.nodes.values():
                all_members |= node.members
            total_rsus = len(all_members)
        if total_rsus <= 0:
            raise UsageError("total_rsus must be positive")
        self.total_rsus = total_rsus
        self.total_nodes = len(self.nodes)
        self.spectral_eff = spectral_efficiency(params.channel)
        self._metrics: dict[frozenset[int], tuple[int, float, float]] = {}
        self._utilities: dict[frozenset[int], float] = {}
        self.utility_evaluations = 0

    def rsu_union(self, coal: Coalition) -> frozenset[int]:
        out: set[int] = set()
        for nid in coal.node_ids:
            out |= self.nodes[nid].members
        return frozenset(out)

    def metrics(self, coal: Coalition) -> tuple[int, float, float]:
        """(rsu_count, pooled bandwidth, mean member reputation) with union semantics."""
        key = coal.node_ids
        cached = self._metrics.get(key)
        if cached is not None:
            return cached
        union = self.rsu_union(coal)
        bandwidth = 0.0
        rep_total = 0.0
        rsus = self.rsus
        for r in union:
            rsu = rsus[r]
            bandwidth += rsu.bandwidth_offer
            rep_total += rsu.reputation
        out = (len(union), bandwidth, rep_total / len(union))
        self._metrics[key] = out
        return out

    def utility(self, coal: Coalition) -> float:
        key = coal.node_ids
        cached = self._utilities.get(key)
        if cached is not None:
            return cached
        u = coalition_utility(coal, self)
        self._utilities[key] = u
        self.utility_evaluations += 1
        return u


def coalition_bandwidth(coal: Coalition, ctx: CoalitionContext) -> float:
    """Pooled bandwidth: each RSU counted once even when nodes overlap."""
    _, bandwidth, _ = ctx.metrics(coal)
    if bandwidth <= 0:
        raise InfeasibleCoalitionError(
            f"coalition {sorted(coal.node_ids)} offers no bandwidth"
        )
    return bandwidth


def contribution_value(coal: Coalition, ctx: CoalitionContext) -> float:
    """zeta1 * (member RSUs / all RSUs) + zeta2 * mean member reputation."""
    rsu_count, _, mean_rep = ctx.metrics(coal)
    p = ctx.params
    return p.zeta1 * (rsu_count / ctx.total_rsus) + p.zeta2 * mean_rep


def service_latency(coal: Coalition, ctx: CoalitionContext) -> float:
    """Seconds to push the compressed twin state over the pooled link."""
    bandwidth = coalition_bandwidth(coal, ctx)
    p = ctx.params
    return (p.data_size * p.compression) / (bandwidth * ctx.spectral_eff)


def communication_cost(coal: Coalition, total_nodes: int, epsilon: float = 0.1) -> float:
    """-ln(1 - (|nodes| - eps)/N) for multi-node coalitions, 0 for singletons.

    Increasing and convex in the node count; eps keeps the grand coalition
    finite.
    """
    size = len(coal.node_ids)
    if not (1 <= size <= total_nodes):
        raise UsageError(f"coalition size {size} outside [1, {total_nodes}]")
    if size < 2:
        return 0.0
    return -math.log(1.0 - (size - epsilon) / total_nodes)


def coalition_utility(coal: Coalition, ctx: CoalitionContext) -> float:
    """Contribution + gamma*ln(1 + 1/latency) - sigma*cost."""
    p = ctx.params
    q = contribution_value(coal, ctx)
    lat = service_latency(coal, ctx)
    latency_reward = math.inf if lat == 0.0 else math.log(1.0 + 1.0 / lat)
    cost = communication_cost(coal, ctx.total_nodes, p.epsilon_cost)
    return q + p.gamma * latency_reward - p.sigma * cost


def pareto_prefers(p1: Partition, p2: Partition, ctx: CoalitionContext) -> bool:
    """True iff p1 leaves no affected node worse off and one strictly better.

    Under non-transferable utility every RSU of a node receives the node's
    coalition utility, so comparing per-node utilities is equivalent to
    comparing per-RSU utilities.  Only nodes whose coalition changed are
    compared; untouched coalitions keep their utility by construction.
    """
    if p1.node_ids() != p2.node_ids():
        raise UsageError("partitions must cover the same node set")
    set1 = {c.node_ids for c in p1.coalitions}
    set2 = {c.node_ids for c in p2.coalitions}
    affected: set[int] = set()
    for members in set1 ^ set2:
        affected |= members
    if not affected:
        return False
    strict = False
    for nid in sorted(affected):
        u1 = ctx.utility(p1.coalition_of(nid))
        u2 = ctx.utility(p2.coalition_of(nid))
        if u1 < u2:
            return False
        if u1 > u2:
            strict = True
    return strict


def _set_partitions(items: Sequence[int]) -> Iterator[list[frozenset[int]]]:
    """All partitions of items into non-empty blocks (canonical order)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [sub[i] | {first}] + sub[i + 1 :]
        yield [frozenset({first})] + sub


@dataclass
class Move:
    """One accepted merge or split, for audit and re-verification."""

    kind: str  # "merge" | "split"
    before: tuple[Coalition, ...]
    after: tuple[Coalition, ...]


@dataclass
class FormationResult:
    partition: Partition
    moves: list[Move]
    rounds: int
    utility_evaluations: int


def _replace(partition: Partition, remove: Sequence[Coalition], add: Sequence[Coalition]) -> Partition:
    removed = {c.node_ids for c in remove}
    kept = [c for c in partition.coalitions if c.node_ids not in removed]
    out = kept + list(add)
    out.sort(key=Coalition.sort_key)
    return Partition(tuple(out))


def _merge_candidates(n: int, exhaustive: bool) -> Iterator[tuple[int, ...]]:
    """Index tuples of coalition groups to probe, in ascending scan order."""
    sizes: Iterable[int] = range(2, n + 1) if exhaustive else (2,)
    for size in sizes:
        yield from itertools.combinations(range(n), size)


def _split_candidates(coal: Coalition, exhaustive: bool) -> Iterator[tuple[frozenset[int], ...]]:
    members = sorted(coal.node_ids)
    n = len(members)
    if n < 2:
        return
    if exhaustive:
        # desk scale: the full sub-partition lattice, so the fixed point is
        # provably stable under the defection check
        for blocks in _set_partitions(members):
            if len(blocks) >= 2:
                yield tuple(blocks)
    elif n <= 6:
        # all two-way splits
        for r in range(1, n // 2 + 1):
            for combo in itertools.combinations(members, r):
                left = frozenset(combo)
                right = frozenset(members) - left
                if r == n - r and min(left) > min(right):
                    continue  # skip mirrored halves
                yield (left, right)
    else:
        # contiguous two-way splits in id order; cheap and scan-order stable
        for cut in range(1, n):
            yield (frozenset(members[:cut]), frozenset(members[cut:]))


def form_coalitions(
    nodes: Mapping[int, RsuNode],
    rsus: Mapping[int, Rsu],
    params: CoalitionParams,
    seed: int | None = None,
    total_rsus: int | None = None,
    ctx: CoalitionContext | None = None,
) -> FormationResult:
    """Run merge-and-split from singletons until no improving move remains.

    The scan applies the first Pareto-improving move found each round
    (merges by ascending coalition-index tuples, then splits per coalition).
    seed, when given, shuffles the initial singleton order; the procedure is
    deterministic for a fixed seed.  Every accepted move is recorded so
    callers can re-verify the strict-improvement property.
    """
    if not nodes:
        raise UsageError("population must contain at least one node")
    if ctx is None:
        ctx = CoalitionContext(nodes, rsus, params, total_rsus=total_rsus)
    node_ids = sorted(nodes)
    if seed is not None:
        random.Random(seed).shuffle(node_ids)
    coalitions = [Coalition(frozenset({n})) for n in node_ids]
    partition = Partition(tuple(coalitions))
    exhaustive = len(node_ids) <= EXHAUSTIVE_NODE_LIMIT
    # strict Pareto steps cannot revisit a partition, so Bell(n) bounds the
    # move count; the cube of the node count is asserted as the practical cap
    cap = max(len(node_ids) ** 3, 8)

    moves: list[Move] = []
    rounds = 0
    improved = True

    # A move's Pareto test touches only the coalitions it merges or splits
    # (everyone else keeps their coalition and utility), so it reduces to
    # comparing the candidate's utility against the touched coalitions' own
    # utilities, and its outcome is independent of the rest of the partition.
    # Probe outcomes are therefore cached for the whole run, keyed by
    # interned coalition ids; each round's scan still walks candidates in
    # ascending order and applies the first improving move.
    intern: dict[frozenset[int], int] = {}

    def cid(coal: Coalition) -> int:
        return intern.setdefault(coal.node_ids, len(intern))

    merge_probe: dict[tuple[int, ...], Coalition | None] = {}
    split_probe: dict[int, tuple[Coalition, ...] | None] = {}

    while improved:
        rounds += 1
        improved = False
        ordered = sorted(partition.coalitions, key=Coalition.sort_key)
        cids = [cid(c) for c in ordered]

        merge_move: tuple[tuple[Coalition, ...], Coalition] | None = None
        for combo in _merge_candidates(len(ordered), exhaustive):
            key = tuple(cids[i] for i in combo)
            found = merge_probe.get(key, False)
            if found is False:
                group = tuple(ordered[i] for i in combo)
                merged = Coalition(frozenset().union(*(c.node_ids for c in group)))
                mu = ctx.utility(merged)
                old = [ctx.utility(c) for c in group]
                ok = all(mu >= u for u in old) and any(mu > u for u in old)
                found = merged if ok else None
                merge_probe[key] = found
            if found is not None and merge_move is None:
                merge_move = (tuple(ordered[i] for i in combo), found)
        if merge_move is not None:
            group, merged = merge_move
            candidate = _replace(partition, group, [merged])
            assert pareto_prefers(candidate, partition, ctx)
            moves.append(Move("merge", tuple(group), (merged,)))
            partition = candidate
            improved = True
            if len(moves) > cap:
                raise RuntimeError("merge-and-split exceeded its step cap")
            continue

        split_move: tuple[Coalition, tuple[Coalition, ...]] | None = None
        for coal in ordered:
            key = cid(coal)
            found = split_probe.get(key, False)
            if found is False:
                found = None
                cu = ctx.utility(coal)
                for blocks in _split_candidates(coal, exhaustive):
                    pieces = tuple(Coalition(b) for b in blocks)
                    utils = [ctx.utility(p) for p in pieces]
                    if all(u >= cu for u in utils) and any(u > cu for u in utils):
                        found = pieces
                        break
                split_probe[key] = found
            if found is not None and split_move is None:
                split_move = (coal, found)
        if split_move is not None:
            coal, pieces = split_move
            candidate = _replace(partition, [coal], list(pieces))
            assert pareto_prefers(candidate, partition, ctx)
            moves.append(Move("split", (coal,), pieces))
            partition = candidate
            improved = True
            if len(moves) > cap:
                raise RuntimeError("merge-and-split exceeded its step cap")

    return FormationResult(partition, moves, rounds, ctx.utility_evaluations)


def check_dhp_stability(partition: Partition, ctx: CoalitionContext) -> bool:
    """Exhaustive defection check: no sub-partition of a coalition and no
    union of existing coalitions is Pareto-preferred.

    Only feasible for desk-scale instances; larger ones raise SizeLimitError.
    """
    total = sum(len(c.node_ids) for c in partition.coalitions)
    if total > DHP_CHECK_NODE_LIMIT:
        raise SizeLimitError(
            f"stability check enumerates partitions exhaustively; {total} nodes exceeds "
            f"the {DHP_CHECK_NODE_LIMIT}-node limit"
        )
    # condition (i): splits of one coalition
    for coal in partition.coalitions:
        for blocks in _set_partitions(sorted(coal.node_ids)):
            if len(blocks) < 2:
                continue
            candidate = _replace(partition, [coal], [Coalition(b) for b in blocks])
            if pareto_prefers(candidate, partition, ctx):
                return False
    # condition (ii): unions of existing coalitions
    ordered = sorted(partition.coalitions, key=Coalition.sort_key)
    for size in range(2, len(ordered) + 1):
        for group in itertools.combinations(ordered, size):
            merged = Coalition(frozenset().union(*(c.node_ids for c in group)))
            candidate = _replace(partition, group, [merged])
            if pareto_prefers(candidate, partition, ctx):
                return False
    return True


def select_best(partition: Partition, ctx: CoalitionContext) -> Coalition:
    """The coalition with the highest utility; ties go to the smallest
    sorted node-id tuple."""
    if not partition.coalitions:
        raise UsageError("partition is empty")
    return min(partition.coalitions, key=lambda c: (-ctx.utility(c), c.sort_key()))
