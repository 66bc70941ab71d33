"""Flat key=value scenario configuration with dotted sections.

The format is line-oriented for diff-friendliness::

    seed = 42
    population.rsus = 200
    reputation.theta = 0.5
    experiments.market.alphas = 0.2, 0.3, 0.4

Lines starting with '#' and blank lines are ignored.  Every omitted field
falls back to the simulation defaults (the published key-parameter set);
list-valued fields take comma-separated entries.  Unknown keys and invalid
values raise ConfigError naming the offending key.
"""

from __future__ import annotations

import dataclasses
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path

from ..coalition import ChannelParams, CoalitionParams
from ..consensus import ConsensusParams
from ..errors import ConfigError
from ..reputation import ReputationParams
from ..stackelberg import MarketParams


@dataclass(frozen=True)
class PopulationConfig:
    rsus: int = 200
    vmus: int = 100
    nodes: int = 20
    node_size_min: int | None = None  # defaults to max(1, rsus // nodes)
    node_size_max: int | None = None  # defaults to 3 * rsus // nodes
    bandwidth_min: float = 1.0
    bandwidth_max: float = 10.0
    interaction_prob: float = 0.6

    def __post_init__(self):
        if self.rsus < 1 or self.vmus < 1 or self.nodes < 1:
            raise ConfigError("population counts must be >= 1")
        if not (0.0 < self.interaction_prob <= 1.0):
            raise ConfigError("population.interaction_prob must lie in (0, 1]")
        if self.bandwidth_min < 0 or self.bandwidth_max < self.bandwidth_min:
            raise ConfigError("population bandwidth range must satisfy 0 <= min <= max")

    def node_size_range(self) -> tuple[int, int]:
        lo = self.node_size_min if self.node_size_min is not None else max(1, self.rsus // self.nodes)
        hi = self.node_size_max if self.node_size_max is not None else max(lo, 3 * self.rsus // self.nodes)
        if lo < 1 or hi < lo:
            raise ConfigError("population node size range must satisfy 1 <= min <= max")
        return lo, min(hi, self.rsus)


@dataclass(frozen=True)
class MarketConfig:
    cost: float = 5.0
    price_max: float = 100.0
    bandwidth_max: float = 100.0
    data_size: float = 500.0  # per-twin Mb in the pipeline market
    grid_step: float | None = None
    alpha_min: float = 0.1
    alpha_max: float = 0.9

    def __post_init__(self):
        if not (0.0 < self.alpha_min <= self.alpha_max < 1.0):
            raise ConfigError("market alpha range must satisfy 0 < min <= max < 1")


@dataclass(frozen=True)
class PipelineConfig:
    misbehavior_ratio: float = 0.2

    def __post_init__(self):
        if not (0.0 <= self.misbehavior_ratio <= 1.0):
            raise ConfigError("pipeline.misbehavior_ratio must lie in [0, 1]")


@dataclass(frozen=True)
class ReputationDecayConfig:
    horizon: int = 16
    vmus: int = 100
    favored_fraction: float = 0.1
    misbehave_from: int = 3
    initial_reputation: float = 0.7

    def __post_init__(self):
        if self.horizon < self.misbehave_from:
            raise ConfigError("reputation-decay horizon must reach the misbehaviour start")
        if not (0.0 < self.favored_fraction < 1.0):
            raise ConfigError("reputation-decay favored_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class CoalitionDistributionConfig:
    node_counts: tuple[int, ...] = (5, 10, 15, 20)


@dataclass(frozen=True)
class FormationTimeConfig:
    rsu_counts: tuple[int, ...] = (100, 200)
    node_counts: tuple[int, ...] = (10, 15, 20, 25, 30, 35, 40)
    repetitions: int = 7

    def __post_init__(self):
        if self.repetitions < 5:
            raise ConfigError("formation-time needs at least 5 repetitions per cell")


@dataclass(frozen=True)
class MisbehaviorSweepConfig:
    ratios: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5)
    node_counts: tuple[int, ...] = (10, 15, 20)
    seeds_per_cell: int = 3
    vmus: int = 30


@dataclass(frozen=True)
class ConsensusSecurityConfig:
    # the lattice where floor(N/3) grows each step; see the README note on
    # why the sweep starts at 7 rather than 4
    delegate_counts: tuple[int, ...] = (7, 10, 13, 16, 19, 22, 25, 28, 31, 34, 37, 40)
    p_malicious: tuple[float, ...] = (0.1, 0.2, 0.3)


@dataclass(frozen=True)
class MarketSweepConfig:
    alphas: tuple[float, ...] = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    prices: tuple[float, ...] = (10.0, 20.0, 30.0)
    costs: tuple[float, ...] = (5.0, 10.0)
    # effective per-twin data volume; 0.5 makes the sweep magnitudes match
    # the published curves (see README on units)
    data_size: float = 0.5


@dataclass(frozen=True)
class ExperimentsConfig:
    reputation_decay: ReputationDecayConfig = field(default_factory=ReputationDecayConfig)
    coalition_distribution: CoalitionDistributionConfig = field(
        default_factory=CoalitionDistributionConfig
    )
    formation_time: FormationTimeConfig = field(default_factory=FormationTimeConfig)
    misbehavior_sweep: MisbehaviorSweepConfig = field(default_factory=MisbehaviorSweepConfig)
    consensus_security: ConsensusSecurityConfig = field(default_factory=ConsensusSecurityConfig)
    market: MarketSweepConfig = field(default_factory=MarketSweepConfig)


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 0
    out_dir: str = "results"
    population: PopulationConfig = field(default_factory=PopulationConfig)
    reputation: ReputationParams = field(default_factory=ReputationParams)
    channel: ChannelParams = field(default_factory=ChannelParams)
    coalition: CoalitionParams = field(default_factory=CoalitionParams)
    market: MarketConfig = field(default_factory=MarketConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    consensus: ConsensusParams = field(default_factory=ConsensusParams)
    experiments: ExperimentsConfig = field(default_factory=ExperimentsConfig)

    def market_params(
        self, bandwidth_max: float | None = None, cost: float | None = None, data_size: float | None = None
    ) -> tuple[MarketParams, float]:
        """Build MarketParams plus the per-VMU data size to use with it."""
        params = MarketParams(
            cost=self.market.cost if cost is None else cost,
            price_max=self.market.price_max,
            bandwidth_max=self.market.bandwidth_max if bandwidth_max is None else bandwidth_max,
            compression=self.coalition.compression,
            channel=self.channel,
            grid_step=self.market.grid_step,
        )
        return params, (self.market.data_size if data_size is None else data_size)


# ---------------------------------------------------------------------------
# parsing

_SCALARS = {int, float, str, bool}


def _parse_scalar(raw: str, target: type, key: str):
    raw = raw.strip()
    try:
        if target is bool:
            low = raw.lower()
            if low in ("true", "yes", "1"):
                return True
            if low in ("false", "no", "0"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if target is int:
            return int(raw)
        if target is float:
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def _coerce(raw: str, annotation, key: str):
    origin = typing.get_origin(annotation)
    args = typing.get_args(annotation)
    if origin in (typing.Union, types.UnionType):
        non_none = [a for a in args if a is not type(None)]
        if raw.strip().lower() in ("none", ""):
            return None
        return _coerce(raw, non_none[0], key)
    if origin is tuple:
        item_type = args[0]
        parts = [p for p in (s.strip() for s in raw.split(",")) if p]
        if not parts:
            raise ConfigError(f"{key}: empty list")
        return tuple(_parse_scalar(p, item_type, key) for p in parts)
    if annotation in _SCALARS:
        return _parse_scalar(raw, annotation, key)
    raise ConfigError(f"{key}: unsupported field type {annotation}")


def _build_section(cls, values: dict[str, str], prefix: str):
    hints = typing.get_type_hints(cls)
    kwargs = {}
    known = {f.name for f in dataclasses.fields(cls)}
    for name, raw in values.items():
        if name not in known:
            raise ConfigError(f"unknown key '{prefix}{name}'")
        kwargs[name] = _coerce(raw, hints[name], prefix + name)
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"section '{prefix.rstrip('.')}': {exc}") from exc


_EXPERIMENT_SECTIONS = {
    "reputation-decay": ("reputation_decay", ReputationDecayConfig),
    "coalition-distribution": ("coalition_distribution", CoalitionDistributionConfig),
    "formation-time": ("formation_time", FormationTimeConfig),
    "misbehavior-sweep": ("misbehavior_sweep", MisbehaviorSweepConfig),
    "consensus-security": ("consensus_security", ConsensusSecurityConfig),
    "market": ("market", MarketSweepConfig),
}

_TOP_SECTIONS = {
    "population": ("population", PopulationConfig),
    "reputation": ("reputation", ReputationParams),
    "channel": ("channel", ChannelParams),
    "coalition": ("coalition", CoalitionParams),
    "market": ("market", MarketConfig),
    "pipeline": ("pipeline", PipelineConfig),
    "consensus": ("consensus", ConsensusParams),
}


def parse_config_text(text: str) -> ScenarioConfig:
    """Parse config text into a validated ScenarioConfig."""
    flat: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in flat:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        flat[key] = raw.strip()

    top: dict[str, str] = {}
    sections: dict[str, dict[str, str]] = {}
    experiment_sections: dict[str, dict[str, str]] = {}
    for key, raw in flat.items():
        parts = key.split(".")
        if len(parts) == 1:
            top[key] = raw
        elif parts[0] == "experiments":
            if len(parts) != 3 or parts[1] not in _EXPERIMENT_SECTIONS:
                raise ConfigError(f"unknown key '{key}'")
            experiment_sections.setdefault(parts[1], {})[parts[2]] = raw
        elif len(parts) == 2 and parts[0] in _TOP_SECTIONS:
            sections.setdefault(parts[0], {})[parts[1]] = raw
        else:
            raise ConfigError(f"unknown key '{key}'")

    kwargs: dict[str, object] = {}
    for name, raw in top.items():
        if name == "seed":
            kwargs["seed"] = _parse_scalar(raw, int, "seed")
        elif name == "out_dir":
            kwargs["out_dir"] = raw
        else:
            raise ConfigError(f"unknown key '{name}'")

    channel = _build_section(ChannelParams, sections.get("channel", {}), "channel.")
    for section_name, (attr, cls) in _TOP_SECTIONS.items():
        if section_name == "channel":
            kwargs["channel"] = channel
            continue
        values = sections.get(section_name, {})
        if section_name == "coalition":
            # the coalition section shares the single channel block
            built = _build_section(cls, values, "coalition.")
            kwargs[attr] = dataclasses.replace(built, channel=channel)
        else:
            kwargs[attr] = _build_section(cls, values, section_name + ".")

    exp_kwargs: dict[str, object] = {}
    for section_name, values in experiment_sections.items():
        attr, cls = _EXPERIMENT_SECTIONS[section_name]
        exp_kwargs[attr] = _build_section(cls, values, f"experiments.{section_name}.")
    kwargs["experiments"] = ExperimentsConfig(**exp_kwargs)

    return ScenarioConfig(**kwargs)


def load_config(path: str | Path) -> ScenarioConfig:
    """Read and validate a scenario config file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return parse_config_text(text)
