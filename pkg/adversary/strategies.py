"""
Attack Strategy Definitions

This module defines the adversary strategies as a tagged union of pydantic
models, serializable to and from JSON scenario documents. Complex numbers are
written either as a bare real number or as a ``[re, im]`` pair; unitaries are
row-major nested lists of such values.
"""

from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, TypeAdapter, field_validator, model_validator

from quantum.operations import is_unitary
from quantum.states import (
    BELL_BASIS,
    BREIDBART_BASIS,
    COMPUTATIONAL_2Q,
    X_BASIS,
    Z_BASIS,
    Basis1Q,
    Basis2Q,
    PureState1Q,
)


ComplexValue = Union[float, Tuple[float, float]]
ComplexMatrix = List[List[ComplexValue]]


class StrategyError(Exception):
    """Raised when a strategy cannot be built or applied"""
    pass


def to_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise StrategyError(f"complex value must be [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def to_complex_vector(values: Any) -> np.ndarray:
    return np.array([to_complex(v) for v in values], dtype=np.complex128)


def complex_to_json(array: np.ndarray) -> Any:
    """Nested [re, im] pairs for a 1-D or 2-D complex array"""
    array = np.asarray(array, dtype=np.complex128)
    if array.ndim == 1:
        return [(float(z.real), float(z.imag)) for z in array]
    return [[(float(z.real), float(z.imag)) for z in row] for row in array]


def _matrix(values: ComplexMatrix) -> np.ndarray:
    return np.array([[to_complex(v) for v in row] for row in values], dtype=np.complex128)


class BasisDescriptor(BaseModel):
    """Serializable single-qubit basis: named, rotated by theta, or custom rows"""
    model_config = ConfigDict(frozen=True)

    name: Literal["Z", "X", "Breidbart", "rotated", "custom"] = Field(default="X")
    theta: Optional[float] = Field(default=None, description="Rotation angle for 'rotated'")
    vectors: Optional[List[List[ComplexValue]]] = Field(default=None, description="Rows for 'custom'")

    @model_validator(mode="after")
    def _check_buildable(self):
        self.to_basis()
        return self

    def to_basis(self) -> Basis1Q:
        if self.name == "Z":
            return Z_BASIS
        if self.name == "X":
            return X_BASIS
        if self.name == "Breidbart":
            return BREIDBART_BASIS
        if self.name == "rotated":
            if self.theta is None:
                raise ValueError("rotated basis needs theta")
            return Basis1Q.rotated(self.theta)
        if not self.vectors or len(self.vectors) != 2:
            raise ValueError("custom basis needs two vectors")
        rows = [PureState1Q(np.array([to_complex(v) for v in row])) for row in self.vectors]
        return Basis1Q.custom(rows[0], rows[1])


class AnnouncementPolicy(BaseModel):
    """Map from TP's raw outcome index to the announced bit"""
    model_config = ConfigDict(frozen=True)

    mapping: Dict[int, int] = Field(description="Outcome index -> announced bit")

    @field_validator("mapping")
    @classmethod
    def _check_bits(cls, mapping: Dict[int, int]) -> Dict[int, int]:
        if any(bit not in (0, 1) for bit in mapping.values()):
            raise ValueError("announced bits must be 0 or 1")
        return mapping

    @classmethod
    def identity(cls) -> "AnnouncementPolicy":
        return cls(mapping={0: 0, 1: 1})

    def announce(self, outcome: int) -> int:
        try:
            return self.mapping[outcome]
        except KeyError:
            raise StrategyError(f"announcement policy has no entry for outcome {outcome}")

    def covers(self, outcomes: int) -> bool:
        return all(k in self.mapping for k in range(outcomes))


IDENTITY_POLICY = AnnouncementPolicy.identity()
# Bell outcomes phi+, phi-, psi+, psi-: announce 0 for phi+ and psi+
BELL_POLICY = AnnouncementPolicy(mapping={0: 0, 1: 1, 2: 0, 3: 1})
# Computational outcomes 00, 01, 10, 11 (received, retained): announce the received bit
COMPUTATIONAL_POLICY = AnnouncementPolicy(mapping={0: 0, 1: 0, 2: 1, 3: 1})


class _StrategyBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    policy: Optional[AnnouncementPolicy] = Field(default=None, description="Override of the announcement rule")

    def outcome_count(self) -> int:
        return 2

    def default_policy(self) -> AnnouncementPolicy:
        return IDENTITY_POLICY

    def announcement_policy(self) -> AnnouncementPolicy:
        policy = self.policy or self.default_policy()
        if not policy.covers(self.outcome_count()):
            raise StrategyError(f"announcement policy does not cover {self.outcome_count()} outcomes")
        return policy

    @property
    def is_collective(self) -> bool:
        return False

    def label(self) -> str:
        return self.kind


class HonestStrategy(_StrategyBase):
    """TP follows the protocol"""
    kind: Literal["honest"] = "honest"


class TPMeasureBasisStrategy(_StrategyBase):
    """TP replaces its final X measurement by a measurement in another basis"""
    kind: Literal["tp-measure-basis"] = "tp-measure-basis"
    basis: BasisDescriptor = Field(default_factory=lambda: BasisDescriptor(name="Z"))

    def label(self) -> str:
        return f"{self.kind}/{self.basis.name}"


class FakedSingleStrategy(_StrategyBase):
    """TP sends a Z-basis state instead of |+>"""
    kind: Literal["faked-single"] = "faked-single"
    prep: Literal[0, 1] = Field(default=0, description="Prepared computational state")
    tp_basis: Literal["Z", "X"] = Field(default="Z", description="TP's final measurement basis")

    def label(self) -> str:
        return f"{self.kind}/|{self.prep}>/{self.tp_basis}"


class FakedBellStrategy(_StrategyBase):
    """TP sends half of a phi+ pair and keeps the other half"""
    kind: Literal["faked-bell"] = "faked-bell"
    tp_basis: Literal["Bell", "Computational2Q"] = Field(default="Bell")

    def outcome_count(self) -> int:
        return 4

    def default_policy(self) -> AnnouncementPolicy:
        return BELL_POLICY if self.tp_basis == "Bell" else COMPUTATIONAL_POLICY

    def two_qubit_basis(self) -> Basis2Q:
        return BELL_BASIS if self.tp_basis == "Bell" else COMPUTATIONAL_2Q

    def label(self) -> str:
        return f"{self.kind}/{self.tp_basis}"


class _CollectiveBase(_StrategyBase):
    u1: ComplexMatrix = Field(description="Interception unitary on channel TP->Alice")
    u2: ComplexMatrix = Field(description="Interception unitary on channel Alice->Bob")
    u3: ComplexMatrix = Field(description="Interception unitary on channel Bob->TP")
    ancilla_dim: int = Field(default=2, ge=1, description="Dimension of each ancilla")
    tp_basis: BasisDescriptor = Field(default_factory=BasisDescriptor)

    _unitaries: Tuple[np.ndarray, np.ndarray, np.ndarray] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_unitaries(self):
        size = 2 * self.ancilla_dim
        matrices = tuple(_matrix(u) for u in (self.u1, self.u2, self.u3))
        for name, matrix in zip(("u1", "u2", "u3"), matrices):
            if matrix.shape != (size, size):
                raise ValueError(f"{name} must be {size}x{size} for ancilla_dim {self.ancilla_dim}")
            if not is_unitary(matrix):
                raise ValueError(f"{name} fails the unitarity check")
        self._unitaries = matrices
        return self

    @classmethod
    def from_unitaries(cls, u1, u2, u3, tp_basis: Optional[BasisDescriptor] = None, **kwargs):
        u1 = np.asarray(u1, dtype=np.complex128)
        return cls(
            u1=complex_to_json(u1),
            u2=complex_to_json(u2),
            u3=complex_to_json(u3),
            ancilla_dim=u1.shape[0] // 2,
            tp_basis=tp_basis or BasisDescriptor(),
            **kwargs,
        )

    def unitaries(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self._unitaries is None:
            # instances built with model_construct skip validation
            self._unitaries = tuple(_matrix(u) for u in (self.u1, self.u2, self.u3))
        return self._unitaries

    def unitary(self, channel: int) -> np.ndarray:
        return self.unitaries()[channel - 1]

    def initial_ancilla(self) -> np.ndarray:
        ancilla = np.zeros(self.ancilla_dim, dtype=np.complex128)
        ancilla[0] = 1.0
        return ancilla

    @property
    def is_collective(self) -> bool:
        return True

    def label(self) -> str:
        return f"{self.kind}/{self.tp_basis.name}"


class CollectiveFreshStrategy(_CollectiveBase):
    """A fresh ancilla is entangled with the qubit on each of the three channels"""
    kind: Literal["collective-fresh"] = "collective-fresh"


class CollectiveSharedStrategy(_CollectiveBase):
    """One persistent ancilla is entangled with the qubit on all three channels"""
    kind: Literal["collective-shared"] = "collective-shared"


AttackStrategy = Annotated[
    Union[
        HonestStrategy,
        TPMeasureBasisStrategy,
        FakedSingleStrategy,
        FakedBellStrategy,
        CollectiveFreshStrategy,
        CollectiveSharedStrategy,
    ],
    Field(discriminator="kind"),
]

STRATEGY_ADAPTER: TypeAdapter = TypeAdapter(AttackStrategy)


def parse_strategy(data: Dict[str, Any]):
    """Build a strategy from its tagged JSON document"""
    return STRATEGY_ADAPTER.validate_python(data)


def dump_strategy(strategy) -> Dict[str, Any]:
    return strategy.model_dump(mode="json", exclude_none=True)
