"""Subjective-logic reputation of roadside units (RSUs) as judged by vehicle users (VMUs).

An opinion is a (belief, disbelief, uncertainty, base_rate) tuple with
b + d + u = 1.  Evidence arrives as per-window positive/negative interaction
counts; windows are weighted by a time-attenuation factor so fresh behaviour
dominates.  Other VMUs contribute recommendations weighted by how familiar
they are with the rated RSU, and the local and recommended views are fused
by consensus into a final opinion whose expectation b + alpha*u is the scalar
reputation.

All functions are pure; they can be evaluated in parallel across (VMU, RSU)
pairs without shared state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ConfigError, NoEvidenceError, StaleEventError, UsageError

log = logging.getLogger(__name__)

_SUM_TOL = 1e-9
_COMPONENT_TOL = 1e-12


@dataclass(frozen=True)
class Opinion:
    """A subjective-logic opinion: belief/disbelief/uncertainty plus base rate.

    Components live in [0, 1] and b + d + u must equal 1 (within 1e-9).
    """

    belief: float
    disbelief: float
    uncertainty: float
    base_rate: float = 0.5

    def __post_init__(self):
        for name in ("belief", "disbelief", "uncertainty", "base_rate"):
            v = getattr(self, name)
            if not (-_COMPONENT_TOL <= v <= 1.0 + _COMPONENT_TOL):
                raise ValueError(f"opinion {name}={v} outside [0, 1]")
        total = self.belief + self.disbelief + self.uncertainty
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"opinion components sum to {total}, expected 1")

    @classmethod
    def vacuous(cls, base_rate: float = 0.5) -> "Opinion":
        """The no-evidence opinion (0, 0, 1)."""
        return cls(0.0, 0.0, 1.0, base_rate)

    def is_vacuous(self) -> bool:
        return self.belief == 0.0 and self.disbelief == 0.0 and self.uncertainty == 1.0

    def expectation(self) -> float:
        return expectation(self)


@dataclass(frozen=True)
class ReputationParams:
    """Weights and rates of the reputation scheme.

    delta1/delta2 weight positive/negative interactions and must satisfy
    0 < delta1 <= delta2 < 1 with delta1 + delta2 = 1 (negative evidence
    may never count less than positive).  xi controls how fast uncertainty
    shrinks with evidence, theta and attenuation_constant shape the time
    decay, tau is the effective period in windows, rho_m scales every
    recommender's familiarity into a recommendation weight.
    """

    delta1: float = 0.5
    delta2: float = 0.5
    xi: float = 1.0
    theta: float = 0.5
    attenuation_constant: float = 1.0
    tau: int = 10
    base_rate: float = 0.5
    rho_m: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.delta1 <= self.delta2 < 1.0):
            raise ConfigError(
                f"reputation.delta1={self.delta1}, delta2={self.delta2}: "
                "need 0 < delta1 <= delta2 < 1"
            )
        if abs(self.delta1 + self.delta2 - 1.0) > _SUM_TOL:
            raise ConfigError("reputation.delta1 + delta2 must equal 1")
        if self.xi <= 0:
            raise ConfigError(f"reputation.xi={self.xi}: must be > 0")
        if not (0.0 < self.theta < 1.0):
            raise ConfigError(f"reputation.theta={self.theta}: must lie in (0, 1)")
        if self.attenuation_constant <= 0:
            raise ConfigError("reputation.attenuation_constant must be > 0")
        if self.tau < 1:
            raise ConfigError(f"reputation.tau={self.tau}: must be >= 1")
        if not (0.0 <= self.base_rate <= 1.0):
            raise ConfigError(f"reputation.base_rate={self.base_rate}: must lie in [0, 1]")
        if not (0.0 <= self.rho_m <= 1.0):
            raise ConfigError(f"reputation.rho_m={self.rho_m}: must lie in [0, 1]")


@dataclass
class InteractionLog:
    """Time-windowed interaction counts between one VMU and one RSU.

    records holds (window_time, positives, negatives) with strictly
    increasing integer window times; one window per time unit.
    """

    vmu_id: int
    rsu_id: int
    records: list[tuple[int, int, int]] = field(default_factory=list)

    def __post_init__(self):
        last = None
        for t, p, q in self.records:
            if last is not None and t <= last:
                raise ValueError(f"window times must be strictly increasing (got {t} after {last})")
            if p < 0 or q < 0:
                raise ValueError(f"negative interaction count at window {t}")
            last = t

    def add(self, window_time: int, positives: int, negatives: int) -> None:
        if self.records and window_time <= self.records[-1][0]:
            raise ValueError("window times must be strictly increasing")
        if positives < 0 or negatives < 0:
            raise ValueError("interaction counts must be non-negative")
        self.records.append((window_time, positives, negatives))

    def effective_records(self, now: int, tau: int) -> list[tuple[int, int, int]]:
        """Records inside the effective period [now - tau, now]."""
        return [r for r in self.records if now - tau <= r[0] <= now]

    def total_interactions(self, now: int, tau: int) -> int:
        return sum(p + q for _, p, q in self.effective_records(now, tau))


@dataclass
class ReputationReport:
    """Final per-VMU reputations of one RSU and their average."""

    rsu_id: int
    per_vmu_final: dict[int, float]
    rsu_final: float


def window_opinion(positives: int, negatives: int, params: ReputationParams) -> Opinion:
    """Opinion formed from one window's interaction counts.

    (b, d, u) = (delta1*p, delta2*q, xi) normalised by their sum, so zero
    evidence yields the vacuous opinion and u shrinks as evidence grows.
    """
    if positives < 0 or negatives < 0:
        raise UsageError("interaction counts must be non-negative")
    bp = params.delta1 * positives
    dq = params.delta2 * negatives
    den = bp + dq + params.xi
    return Opinion(bp / den, dq / den, params.xi / den, params.base_rate)


def attenuation_weight(event_time: int, now: int, params: ReputationParams) -> float:
    """Freshness weight c / (c + theta * age); 1 at age 0, decaying with age.

    Events older than tau are the caller's job to filter; asking for their
    weight raises StaleEventError.
    """
    if event_time > now:
        raise UsageError(f"event_time {event_time} is in the future of now={now}")
    age = now - event_time
    if age > params.tau:
        raise StaleEventError(f"event at {event_time} is older than tau={params.tau} (now={now})")
    c = params.attenuation_constant
    return c / (c + params.theta * age)


def local_opinion(
    log: InteractionLog,
    now: int,
    params: ReputationParams,
    freshness: bool = True,
) -> Opinion:
    """Attenuation-weighted average of the per-window opinions in the effective period.

    With freshness=False every window gets weight 1 (the ablation used to
    show why time decay matters).  Raises NoEvidenceError when no record
    falls inside [now - tau, now]; callers substitute the vacuous opinion.
    """
    records = log.effective_records(now, params.tau)
    if not records:
        raise NoEvidenceError(
            f"no interactions between vmu {log.vmu_id} and rsu {log.rsu_id} "
            f"within {params.tau} windows of t={now}"
        )
    wb = wd = wu = wsum = 0.0
    for t, p, q in records:
        w = attenuation_weight(t, now, params) if freshness else 1.0
        op = window_opinion(p, q, params)
        wb += w * op.belief
        wd += w * op.disbelief
        wu += w * op.uncertainty
        wsum += w
    return Opinion(wb / wsum, wd / wsum, wu / wsum, params.base_rate)


def expectation(op: Opinion) -> float:
    """Scalar reputation b + base_rate * u."""
    return op.belief + op.base_rate * op.uncertainty


def familiarity(
    recommender_logs: Iterable[InteractionLog],
    target_rsu: int,
    now: int,
    params: ReputationParams,
    total_rsus: int | None = None,
) -> float:
    """How familiar one recommender is with the target RSU.

    Ratio of the recommender's interaction count with the target (inside the
    effective period) to its mean count over all total_rsus RSUs.  A
    recommender with zero interactions overall has no defined familiarity
    and must be excluded by the caller (NoEvidenceError).
    """
    logs = list(recommender_logs)
    counts = {lg.rsu_id: lg.total_interactions(now, params.tau) for lg in logs}
    total = sum(counts.values())
    if total == 0:
        raise NoEvidenceError("recommender has no interactions with any RSU in the period")
    n_rsus = total_rsus if total_rsus is not None else len(counts)
    if n_rsus <= 0:
        raise UsageError("total_rsus must be positive")
    mean = total / n_rsus
    return counts.get(target_rsu, 0) / mean


def recommended_opinion(
    weighted_opinions: Sequence[tuple[Opinion, float]],
    base_rate: float | None = None,
) -> Opinion:
    """Weight-averaged opinion of the recommenders.

    Each entry pairs a recommender's local opinion with its weight
    gamma = rho_m * familiarity; weights must be positive.
    """
    if not weighted_opinions:
        raise NoEvidenceError("no recommenders")
    if any(w <= 0 for _, w in weighted_opinions):
        raise UsageError("recommendation weights must be positive")
    wsum = sum(w for _, w in weighted_opinions)
    b = sum(w * op.belief for op, w in weighted_opinions) / wsum
    d = sum(w * op.disbelief for op, w in weighted_opinions) / wsum
    u = sum(w * op.uncertainty for op, w in weighted_opinions) / wsum
    if base_rate is None:
        base_rate = weighted_opinions[0][0].base_rate
    return Opinion(b, d, u, base_rate)


def fuse_opinions(local: Opinion, recommended: Opinion) -> Opinion:
    """Consensus fusion of the local and recommended opinions.

    A vacuous argument leaves the other side unchanged (exact identity,
    handled as an explicit branch so no rounding creeps in).  Two dogmatic
    opinions (both u = 0) cannot be fused; the local one wins and a
    diagnostic is logged.
    """
    if recommended.is_vacuous():
        return local
    if local.is_vacuous():
        return Opinion(
            recommended.belief, recommended.disbelief, recommended.uncertainty, local.base_rate
        )
    ul, ur = local.uncertainty, recommended.uncertainty
    den = ul + ur - ul * ur
    if den == 0.0:
        log.warning("degenerate fusion: both opinions dogmatic (u=0); keeping local opinion")
        return local
    b = (local.belief * ur + recommended.belief * ul) / den
    d = (local.disbelief * ur + recommended.disbelief * ul) / den
    u = (ul * ur) / den
    return Opinion(b, d, u, local.base_rate)


def rsu_reputation(per_vmu_finals: Sequence[float]) -> float:
    """Average of the final per-VMU reputations (the RSU-level scalar)."""
    vals = list(per_vmu_finals)
    if not vals:
        raise NoEvidenceError("no per-VMU reputations to average")
    for v in vals:
        if not (0.0 <= v <= 1.0):
            raise UsageError(f"reputation {v} outside [0, 1]")
    return sum(vals) / len(vals)
