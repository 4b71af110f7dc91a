"""
Protocol Schema Definitions

This module defines the data models of the protocol engine: participant
operations, run configuration, per-round transcripts, round classification and
the sifting outcome.
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from adversary.records import AdversaryRecord


class ParticipantOp(str, Enum):
    """Operation chosen by a classical participant in one round"""
    MH = "MH"  # measure, then Hadamard on the resent qubit
    HM = "HM"  # Hadamard, then measure and resend


class AbortReason(str, Enum):
    """Why the sifting phase aborted the run"""
    NONE = "none"
    THRESHOLD_EXCEEDED = "threshold-exceeded"
    ALICE_HM_MEASURED_ONE = "alice-HM-measured-one"


class ProtocolConfig(BaseModel):
    """Configuration of one protocol run"""
    model_config = ConfigDict(frozen=True)

    rounds: int = Field(ge=1, description="Number of TP-prepared qubits")
    p_alice_mh: float = Field(default=0.5, gt=0.0, lt=1.0, description="Probability Alice chooses MH")
    p_bob_mh: float = Field(default=0.5, gt=0.0, lt=1.0, description="Probability Bob chooses MH")
    check_fraction: float = Field(
        default=0.5, ge=0.0, le=1.0, description="Fraction of situation-2 rounds disclosed"
    )
    error_threshold: float = Field(
        default=0.0, ge=0.0, le=1.0, description="Maximum tolerated per-situation error rate"
    )
    master_seed: int = Field(default=42, ge=0, lt=2 ** 64, description="Master seed of all streams")


class RoundTranscript(BaseModel):
    """Everything one protocol round produced"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    round_index: int = Field(ge=0, description="Index of the round in the run")
    alice_op: ParticipantOp = Field(description="Alice's operation")
    bob_op: ParticipantOp = Field(description="Bob's operation")
    alice_bit: int = Field(ge=0, le=1, description="Alice's recorded measurement bit")
    bob_bit: int = Field(ge=0, le=1, description="Bob's recorded measurement bit")
    tp_announced_bit: int = Field(ge=0, le=1, description="Bit announced by TP")
    alice_aborted_flag: bool = Field(default=False, description="Alice chose HM and measured 1")
    adversary_record: Optional[AdversaryRecord] = Field(
        default=None, exclude=True, description="What TP retained from the round"
    )

    @model_validator(mode="after")
    def _check_abort_flag(self):
        if self.alice_aborted_flag and (self.alice_op != ParticipantOp.HM or self.alice_bit != 1):
            raise ValueError("alice_aborted_flag requires alice_op HM and alice_bit 1")
        return self


class SituationClass(BaseModel):
    """Situation (1-4) and case (1-9, None when undefined) of a round"""
    situation: int = Field(ge=1, le=4)
    case_id: Optional[int] = Field(default=None, ge=1, le=9)


class SiftOutcome(BaseModel):
    """Result of the public discussion over a full run"""
    total_rounds: int = Field(description="Number of sifted transcripts")
    per_situation_error_rate: List[float] = Field(description="Error rate of situations 1-4")
    situation_counts: List[int] = Field(description="Rounds per situation")
    situation_error_counts: List[int] = Field(description="Error events per situation")
    raw_key_alice: str = Field(default="", description="Alice's raw key bits")
    raw_key_bob: str = Field(default="", description="Bob's raw key bits")
    disclosed_positions: List[int] = Field(default_factory=list, description="Disclosed situation-2 rounds")
    flagged_positions: List[int] = Field(default_factory=list, description="Rounds with an error event")
    aborted: bool = Field(default=False)
    abort_reason: AbortReason = Field(default=AbortReason.NONE)
    counts: List[int] = Field(description="Histogram of cases 1-9")
    undefined_count: int = Field(default=0, description="Rounds matching no case")
    situation4_announcements: List[int] = Field(
        default_factory=lambda: [0, 0], description="TP announcements 0/1 in situation 4"
    )

    @property
    def key_length(self) -> int:
        return len(self.raw_key_alice)
