"""Reputation-gated coalition formation and bandwidth trading for
vehicle-twin migration at the roadside edge.

Core modules:

- ``reputation``: subjective-logic opinions with interaction freshness
- ``coalition``: Pareto-order merge-and-split coalition formation
- ``stackelberg``: leader/follower bandwidth market and its equilibrium
- ``consensus``: reputation-tiered block validation and the BFT safety curve
- ``harness``: seeded experiments, the end-to-end pipeline, and the CLI
"""

__version__ = "0.1.0"

from .coalition import (
    ChannelParams,
    Coalition,
    CoalitionContext,
    CoalitionParams,
    Partition,
    Rsu,
    RsuNode,
    check_dhp_stability,
    coalition_utility,
    form_coalitions,
    pareto_prefers,
    select_best,
    spectral_efficiency,
)
from .consensus import (
    ConsensusParams,
    TierAssignment,
    assign_tiers,
    security_probability,
    simulate_round,
)
from .errors import (
    ConfigError,
    InfeasibleCoalitionError,
    NoEvidenceError,
    SizeLimitError,
    StaleEventError,
    UsageError,
    VtmsimError,
)
from .reputation import (
    InteractionLog,
    Opinion,
    ReputationParams,
    attenuation_weight,
    expectation,
    familiarity,
    fuse_opinions,
    local_opinion,
    recommended_opinion,
    rsu_reputation,
    window_opinion,
)
from .stackelberg import (
    MarketOutcome,
    MarketParams,
    VmuProfile,
    best_response,
    closed_form_price,
    leader_utility,
    migration_latency,
    solve_grid,
    verify_equilibrium,
    vmu_utility,
)
