"""Single-leader multi-follower bandwidth market between an RSU coalition and VMUs.

The coalition posts a unit price P; each VMU buys the bandwidth that
maximises its own latency-vs-cost trade-off.  The follower problem is
strictly concave, so the best response is the clamped stationary point
alpha/P - D*lambda/K.  The leader's induced profit is concave in P with a
closed-form interior maximiser sqrt(C*K*sum(alpha) / (lambda*sum(D)));
a grid scan over feasible prices recovers the same equilibrium to within
one grid step and doubles as the reference when constraints bind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coalition import ChannelParams, spectral_efficiency
from .errors import ConfigError, UsageError


@dataclass(frozen=True)
class VmuProfile:
    id: int
    alpha: float  # latency sensitivity, in (0, 1)
    data_size: float  # Mb of twin state to move

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ConfigError(f"vmu {self.id}: alpha {self.alpha} outside (0, 1)")
        if self.data_size < 0:
            raise ConfigError(f"vmu {self.id}: negative data size")


@dataclass(frozen=True)
class MarketParams:
    cost: float = 5.0  # transmission cost per MHz
    price_max: float = 100.0
    bandwidth_max: float = 100.0  # MHz the coalition can sell
    compression: float = 0.5
    channel: ChannelParams = field(default_factory=ChannelParams)
    grid_step: float | None = None  # defaults to 1% of the price range

    def __post_init__(self):
        if not (0.0 < self.cost <= self.price_max):
            raise ConfigError(
                f"market.cost={self.cost}, price_max={self.price_max}: need 0 < cost <= price_max"
            )
        if self.bandwidth_max <= 0:
            raise ConfigError("market.bandwidth_max must be > 0")
        if self.grid_step is not None and self.grid_step <= 0:
            raise ConfigError("market.grid_step must be > 0")

    def step(self) -> float:
        if self.grid_step is not None:
            return self.grid_step
        return max(0.01 * (self.price_max - self.cost), 1e-9)

    def spectral_eff(self) -> float:
        return spectral_efficiency(self.channel)


@dataclass
class MarketOutcome:
    price: float
    demands: dict[int, float]
    leader_utility: float
    follower_utilities: dict[int, float]
    grid_step: float

    def total_demand(self) -> float:
        return sum(self.demands.values())

    def is_empty(self) -> bool:
        return all(b == 0.0 for b in self.demands.values())


def migration_latency(profile: VmuProfile, bandwidth: float, market: MarketParams) -> float:
    """Seconds to migrate one twin at the purchased bandwidth."""
    if bandwidth <= 0:
        raise UsageError("bandwidth must be positive for a latency")
    return (profile.data_size * market.compression) / (bandwidth * market.spectral_eff())


def vmu_utility(profile: VmuProfile, bandwidth: float, price: float, market: MarketParams) -> float:
    """alpha*ln(1 + 1/latency) - price*bandwidth; buying nothing is worth 0."""
    if bandwidth < 0:
        raise UsageError("bandwidth must be >= 0")
    if bandwidth == 0.0:
        return 0.0
    a = (profile.data_size * market.compression) / (bandwidth * market.spectral_eff())
    reward = math.inf if a == 0.0 else math.log(1.0 + 1.0 / a)
    return profile.alpha * reward - price * bandwidth


def vmu_marginal_utility(
    profile: VmuProfile, bandwidth: float, price: float, market: MarketParams
) -> float:
    """d(vmu_utility)/d(bandwidth): alpha*K/(D*lambda + B*K) - P."""
    k = market.spectral_eff()
    dl = profile.data_size * market.compression
    return profile.alpha * k / (dl + bandwidth * k) - price


def best_response(profile: VmuProfile, price: float, market: MarketParams) -> float:
    """The follower's optimal purchase max(0, alpha/P - D*lambda/K)."""
    if price <= 0:
        raise UsageError("price must be positive")
    k = market.spectral_eff()
    return max(0.0, profile.alpha / price - profile.data_size * market.compression / k)


def leader_utility(price: float, demands: dict[int, float], market: MarketParams) -> float:
    """(P - C) * total demand sold."""
    total = sum(demands.values())
    if total > market.bandwidth_max * (1 + 1e-12):
        raise UsageError(
            f"total demand {total} exceeds bandwidth_max {market.bandwidth_max}"
        )
    return (price - market.cost) * total


def leader_marginal_utility(
    price: float, profiles: list[VmuProfile], market: MarketParams
) -> float:
    """d(leader utility)/dP on the all-participating region:
    sum(alpha_v*C/P^2 - D_v*lambda/K)."""
    k = market.spectral_eff()
    return sum(
        p.alpha * market.cost / price**2 - p.data_size * market.compression / k
        for p in profiles
    )


def _demands_at(profiles: list[VmuProfile], price: float, market: MarketParams) -> dict[int, float]:
    return {p.id: best_response(p, price, market) for p in profiles}


def _empty_outcome(profiles: list[VmuProfile], market: MarketParams) -> MarketOutcome:
    return MarketOutcome(
        price=market.price_max,
        demands={p.id: 0.0 for p in profiles},
        leader_utility=0.0,
        follower_utilities={p.id: 0.0 for p in profiles},
        grid_step=market.step(),
    )


def solve_grid(profiles: list[VmuProfile], market: MarketParams) -> MarketOutcome:
    """Scan prices from C to P_max and keep the best feasible one.

    A price is feasible when someone buys, the total fits the coalition's
    bandwidth, and every buyer ends up with positive utility.  Equal-utility
    ties resolve to the lower price (the scan ascends and only strict
    improvements replace the incumbent).
    """
    if not profiles:
        raise UsageError("need at least one VMU profile")
    step = market.step()
    n_steps = int(math.floor((market.price_max - market.cost) / step + 1e-9))
    best_price: float | None = None
    best_utility = -math.inf
    best_demands: dict[int, float] | None = None
    for i in range(n_steps + 1):
        price = min(market.cost + i * step, market.price_max)
        demands = _demands_at(profiles, price, market)
        total = sum(demands.values())
        if total <= 0 or total > market.bandwidth_max:
            continue
        if any(
            vmu_utility(p, demands[p.id], price, market) <= 0
            for p in profiles
            if demands[p.id] > 0
        ):
            continue
        utility = (price - market.cost) * total
        if utility > best_utility:
            best_utility = utility
            best_price = price
            best_demands = demands
    if best_price is None or best_demands is None:
        return _empty_outcome(profiles, market)
    follower_utilities = {
        p.id: vmu_utility(p, best_demands[p.id], best_price, market) for p in profiles
    }
    return MarketOutcome(best_price, best_demands, best_utility, follower_utilities, step)


def closed_form_price(profiles: list[VmuProfile], market: MarketParams) -> float:
    """Interior stationary price sqrt(C*K*sum(alpha)/(lambda*sum(D))),
    clipped into [C, P_max].

    Valid when every VMU participates; a zero data-size total makes the
    leader's profit increasing in P, so the price clips to P_max.
    """
    sum_alpha = sum(p.alpha for p in profiles)
    sum_data = sum(p.data_size for p in profiles)
    if sum_alpha <= 0:
        raise UsageError("sum of alphas must be positive")
    if sum_data == 0:
        return market.price_max
    k = market.spectral_eff()
    p_star = math.sqrt(market.cost * k * sum_alpha / (market.compression * sum_data))
    return min(max(p_star, market.cost), market.price_max)


def _feasible_price(profiles: list[VmuProfile], price: float, market: MarketParams) -> bool:
    demands = _demands_at(profiles, price, market)
    total = sum(demands.values())
    if total <= 0 or total > market.bandwidth_max:
        return False
    return all(
        vmu_utility(p, demands[p.id], price, market) > 0 for p in profiles if demands[p.id] > 0
    )


def verify_equilibrium(
    outcome: MarketOutcome,
    profiles: list[VmuProfile],
    market: MarketParams,
    trials: int = 200,
    rng: np.random.Generator | None = None,
    tolerance: float | None = None,
) -> bool:
    """Sample unilateral deviations and confirm none of them pays.

    Followers deviate in purchased bandwidth at the settled price; the
    leader deviates in price against re-computed best responses (within the
    same feasibility rules the scan used).  The default tolerance covers the
    profit the leader may legitimately leave on the table between two grid
    points of a concave profit curve.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if tolerance is None:
        sum_alpha = sum(p.alpha for p in profiles)
        tolerance = max(1e-6, sum_alpha * outcome.grid_step**2 / market.cost**2)

    base_leader = (outcome.price - market.cost) * outcome.total_demand()
    for _ in range(trials):
        price = float(rng.uniform(market.cost, market.price_max))
        if not _feasible_price(profiles, price, market):
            continue
        demands = _demands_at(profiles, price, market)
        if (price - market.cost) * sum(demands.values()) > base_leader + tolerance:
            return False

    follower_tol = 1e-6
    n_each = max(1, trials // max(1, len(profiles)))
    for p in profiles:
        base = vmu_utility(p, outcome.demands[p.id], outcome.price, market)
        # mix coarse deviations over the whole sellable range with fine ones
        # on the best-response scale (any optimum lies below alpha/cost)
        coarse = rng.uniform(0.0, market.bandwidth_max, size=n_each)
        fine = rng.uniform(0.0, min(market.bandwidth_max, 2.0 * p.alpha / market.cost), size=n_each)
        for b in np.concatenate([coarse, fine]):
            if vmu_utility(p, float(b), outcome.price, market) > base + follower_tol:
                return False
    return True
