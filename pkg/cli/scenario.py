"""
Scenario Configuration

The scenario document drives every command: protocol parameters, the attack
strategy, output destination and sweep settings. It is read from a JSON file
whose keys mirror the field names below; command-line flags override it.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from adversary.collective import CollectiveCoefficients, InconsistentParams, collective_from_coefficients
from adversary.strategies import StrategyError, parse_strategy
from config.settings import get_settings, resolve_seed
from protocol.schema import ProtocolConfig
from registry.strategy_registry import StrategyRegistry, StrategyRegistryError

DEFAULT_ROUNDS = 10000


class ScenarioError(Exception):
    """Raised when a scenario cannot be loaded or validated"""
    pass


class ProtocolSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rounds: Optional[int] = Field(default=None, ge=0, description="Number of rounds")
    p_alice_mh: float = Field(default=0.5, gt=0.0, lt=1.0)
    p_bob_mh: float = Field(default=0.5, gt=0.0, lt=1.0)
    check_fraction: float = Field(default=0.5, ge=0.0, le=1.0)
    error_threshold: float = Field(default=0.0, ge=0.0, le=1.0)
    master_seed: Optional[int] = Field(default=None, ge=0, lt=2 ** 64)


class OutputSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    path: Optional[str] = Field(default=None, description="Output file, stdout when omitted")
    format: Literal["json", "csv"] = Field(default="json")


class ScenarioConfig(BaseModel):
    """Complete description of one command invocation"""
    model_config = ConfigDict(extra="forbid")

    protocol: ProtocolSection = Field(default_factory=ProtocolSection)
    strategy: Union[str, Dict[str, Any]] = Field(
        default="honest", description="Registry name, tagged strategy document or collective parameters"
    )
    output: OutputSpec = Field(default_factory=OutputSpec)
    n_values: List[int] = Field(default_factory=lambda: [1, 4, 16, 64])
    angles: Optional[List[float]] = Field(default=None, description="Measurement-basis angles for sweeps")
    workers: Optional[int] = Field(default=None, ge=1)
    include_keys: bool = Field(default=False, description="Write the raw keys with run results")
    transcript_log: Optional[str] = Field(default=None, description="JSON-lines transcript file for run")
    perturb_expected: bool = Field(default=False, description="Shift verify expectations (negative control)")

    @property
    def rounds(self) -> int:
        return DEFAULT_ROUNDS if self.protocol.rounds is None else self.protocol.rounds

    @property
    def seed(self) -> int:
        return resolve_seed(self.protocol.master_seed)

    @property
    def worker_count(self) -> int:
        return self.workers or get_settings().workers

    def protocol_config(self, rounds: Optional[int] = None) -> ProtocolConfig:
        """ProtocolConfig for this scenario; rounds must be positive"""
        section = self.protocol
        try:
            return ProtocolConfig(
                rounds=self.rounds if rounds is None else rounds,
                p_alice_mh=section.p_alice_mh,
                p_bob_mh=section.p_bob_mh,
                check_fraction=section.check_fraction,
                error_threshold=section.error_threshold,
                master_seed=self.seed,
            )
        except ValidationError as e:
            raise ScenarioError(format_validation_error(e, prefix="protocol")) from e

    def build_strategy(self, registry: Optional[StrategyRegistry] = None):
        """Resolve the strategy field to a strategy object"""
        descriptor = self.strategy
        try:
            if isinstance(descriptor, str):
                return (registry or StrategyRegistry()).build(descriptor)
            if "kind" in descriptor:
                return parse_strategy(descriptor)
            return collective_from_coefficients(CollectiveCoefficients(**descriptor))
        except ValidationError as e:
            raise ScenarioError(format_validation_error(e, prefix="strategy")) from e
        except (StrategyRegistryError, StrategyError, InconsistentParams) as e:
            raise ScenarioError(f"strategy: {e}") from e


def format_validation_error(error: ValidationError, prefix: str = "") -> str:
    """One line per problem, each naming the dotted field path"""
    lines = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"])
        if prefix:
            path = f"{prefix}.{path}" if path else prefix
        lines.append(f"{path}: {item['msg']}")
    return "; ".join(lines)


def merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Recursive dict merge; None in ``overrides`` keeps the base value"""
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key, {}), dict):
            merged[key] = merge(merged.get(key, {}), value)
        else:
            merged[key] = value
    return merged


def load_scenario(path: Optional[Union[str, Path]] = None, overrides: Optional[Dict[str, Any]] = None) -> ScenarioConfig:
    document: Dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "r") as f:
                document = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ScenarioError(f"cannot read scenario {path}: {e}") from e
        if not isinstance(document, dict):
            raise ScenarioError(f"scenario {path} must be a JSON object")

    document = merge(document, overrides or {})
    try:
        return ScenarioConfig(**document)
    except ValidationError as e:
        raise ScenarioError(format_validation_error(e)) from e
