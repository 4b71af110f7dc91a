"""
Strategy Registry

This module implements the registry of built-in attack strategies.
Entries are loaded from ``strategy_registry.json`` and carry the detection
probability each strategy is expected to reach.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from adversary.collective import CollectiveCoefficients, collective_from_coefficients
from adversary.strategies import parse_strategy
from utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_REGISTRY_FILE = Path(__file__).with_name("strategy_registry.json")


class StrategyRegistryError(Exception):
    """Custom exception for strategy registry errors"""
    pass


def parse_probability(value: Union[str, float, int]) -> float:
    """A probability written as a float or as a fraction string such as "7/16" """
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


class StrategyEntry(BaseModel):
    """One named strategy of the registry"""
    name: str = Field(description="Registry name used by --strategy")
    description: str = Field(default="")
    strategy: Optional[Dict[str, Any]] = Field(default=None, description="Tagged strategy document")
    collective_params: Optional[CollectiveCoefficients] = Field(
        default=None, description="Coefficient description of a collective attack"
    )
    expected_detection: Optional[float] = Field(default=None, description="Per-round detection probability")
    expected_distinguishability: Optional[float] = None

    @field_validator("expected_detection", "expected_distinguishability", mode="before")
    @classmethod
    def _parse_fraction(cls, value):
        if value is None:
            return None
        return parse_probability(value)

    @model_validator(mode="after")
    def _one_description(self):
        if (self.strategy is None) == (self.collective_params is None):
            raise ValueError("entry needs exactly one of 'strategy' or 'collective_params'")
        return self

    def build(self):
        if self.collective_params is not None:
            return collective_from_coefficients(self.collective_params)
        return parse_strategy(self.strategy)


class StrategyRegistry:
    """
    Registry of named attack strategies

    Resolves names given on the command line and supplies the expected
    values used by the verification command.
    """

    def __init__(self, config_file: Union[str, Path] = DEFAULT_REGISTRY_FILE):
        """
        Initialize strategy registry

        Args:
            config_file: Path to the registry JSON file
        """
        self.config_file = Path(config_file)
        self.entries: Dict[str, StrategyEntry] = {}
        self.registry_config: Dict[str, Any] = {}

        self._load_config()

    def _load_config(self):
        """Load strategy entries from file"""
        try:
            with open(self.config_file, "r") as f:
                config = json.load(f)

            for entry_config in config.get("strategies", []):
                self.register(StrategyEntry(**entry_config))

            self.registry_config = config.get("registry_config", {})

            logger.debug(f"Loaded {len(self.entries)} strategies from {self.config_file}")

        except (OSError, json.JSONDecodeError, ValidationError) as e:
            logger.error(f"Error loading strategy registry: {e}")
            raise StrategyRegistryError(f"Failed to load registry: {e}")

    def register(self, entry: StrategyEntry) -> None:
        if entry.name in self.entries:
            logger.warning(f"Strategy {entry.name} already registered, updating")
        self.entries[entry.name] = entry

    def names(self) -> List[str]:
        return list(self.entries)

    def get(self, name: str) -> StrategyEntry:
        try:
            return self.entries[name]
        except KeyError:
            known = ", ".join(self.entries)
            raise StrategyRegistryError(f"Unknown strategy '{name}' (known: {known})") from None

    def build(self, name: str):
        """Strategy object for a registry name"""
        return self.get(name).build()

    def verification_entries(self) -> List[StrategyEntry]:
        """Entries that carry an expected detection probability"""
        return [e for e in self.entries.values() if e.expected_detection is not None]
