"""
Adversary Pipeline Hooks

The round pipeline calls these hooks at the points where a dishonest third party
can act: when preparing the qubit, on each of the three quantum channels, and
when performing the final measurement and announcement.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from adversary.records import AdversaryRecord
from adversary.strategies import (
    AnnouncementPolicy,
    CollectiveFreshStrategy,
    FakedBellStrategy,
    FakedSingleStrategy,
    TPMeasureBasisStrategy,
    _CollectiveBase,
)
from quantum.operations import (
    TRIVIAL_ANCILLA,
    apply_joint_unitary,
    attach_ancilla,
    measure_2q,
    measure_qubit_residual,
    split_product,
)
from quantum.rng import RngStream
from quantum.states import (
    COMPUTATIONAL_KETS,
    KET_PLUS,
    PHI_PLUS,
    X_BASIS,
    Z_BASIS,
    Basis1Q,
    DimensionMismatch,
    JointState,
)


@dataclass
class InterceptionContext:
    """Per-round bookkeeping of the ancillas TP has already set aside"""
    stored: List[Tuple[str, np.ndarray]] = field(default_factory=list)

    def store(self, channel_name: str, ket: np.ndarray) -> None:
        self.stored.append((channel_name, ket))


def hook_prepare(strategy) -> JointState:
    """Initial system: the qubit sent to Alice tensored with whatever TP keeps"""
    if isinstance(strategy, FakedSingleStrategy):
        return attach_ancilla(COMPUTATIONAL_KETS[strategy.prep], TRIVIAL_ANCILLA)
    if isinstance(strategy, FakedBellStrategy):
        # particle 1 travels, particle 2 is retained
        return JointState(PHI_PLUS.vector, 2)
    if isinstance(strategy, _CollectiveBase):
        return attach_ancilla(KET_PLUS, strategy.initial_ancilla())
    return attach_ancilla(KET_PLUS, TRIVIAL_ANCILLA)


def hook_channel(strategy, channel: int, system: JointState, context: InterceptionContext) -> JointState:
    """Interception on channel 1 (TP->Alice), 2 (Alice->Bob) or 3 (Bob->TP)"""
    if not isinstance(strategy, _CollectiveBase):
        return system
    if system.ancilla_dim != strategy.ancilla_dim:
        raise DimensionMismatch(
            f"system carries a {system.ancilla_dim}-dim ancilla, strategy expects {strategy.ancilla_dim}"
        )
    if isinstance(strategy, CollectiveFreshStrategy) and channel > 1:
        qubit, previous = split_product(system)
        context.store(f"channel_{channel - 1}", previous)
        system = attach_ancilla(qubit, strategy.initial_ancilla())
    return apply_joint_unitary(system, strategy.unitary(channel))


def final_basis(strategy) -> Basis1Q:
    if isinstance(strategy, TPMeasureBasisStrategy):
        return strategy.basis.to_basis()
    if isinstance(strategy, FakedSingleStrategy):
        return Z_BASIS if strategy.tp_basis == "Z" else X_BASIS
    if isinstance(strategy, _CollectiveBase):
        return strategy.tp_basis.to_basis()
    return X_BASIS


def hook_tp_final_measure(
    strategy,
    system: JointState,
    context: InterceptionContext,
    rng: RngStream,
    policy: Optional[AnnouncementPolicy] = None,
) -> Tuple[int, AdversaryRecord]:
    """TP's final measurement, announcement and record of retained information"""
    policy = policy or strategy.announcement_policy()

    if isinstance(strategy, FakedBellStrategy):
        if system.ancilla_dim != 2:
            raise DimensionMismatch("faked Bell measurement needs the retained particle")
        basis = strategy.two_qubit_basis()
        outcome, _ = measure_2q(system.as_two_qubit(), basis, rng)
        record = AdversaryRecord(tp_outcome=outcome, final_system=system, final_pair_basis=basis)
        return policy.announce(outcome), record

    basis = final_basis(strategy)
    expected_dim = strategy.ancilla_dim if isinstance(strategy, _CollectiveBase) else 1
    if system.ancilla_dim != expected_dim:
        raise DimensionMismatch(
            f"final measurement expects a {expected_dim}-dim ancilla, got {system.ancilla_dim}"
        )
    last_ancilla = None
    if isinstance(strategy, CollectiveFreshStrategy):
        last_ancilla = "channel_3"
    elif isinstance(strategy, _CollectiveBase):
        last_ancilla = "shared"
    outcome, _ = measure_qubit_residual(system, basis, rng)
    record = AdversaryRecord(
        tp_outcome=outcome,
        stored_ancillas=tuple(context.stored),
        final_system=system,
        final_basis=basis,
        last_ancilla=last_ancilla,
    )
    return policy.announce(outcome), record
