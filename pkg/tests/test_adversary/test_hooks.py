"""
Tests for the adversary pipeline hooks and records
"""

import numpy as np
import pytest

from adversary.hooks import InterceptionContext, final_basis, hook_channel, hook_prepare, hook_tp_final_measure
from adversary.records import AdversaryRecord
from adversary.strategies import (
    AnnouncementPolicy,
    BasisDescriptor,
    CollectiveFreshStrategy,
    CollectiveSharedStrategy,
    FakedBellStrategy,
    FakedSingleStrategy,
    HonestStrategy,
    TPMeasureBasisStrategy,
)
from protocol.engine import run_round
from protocol.schema import ParticipantOp, ProtocolConfig
from quantum.operations import attach_ancilla, reduced_qubit_state
from quantum.rng import RngStream, ScriptedRngStream
from quantum.states import (
    KET_0,
    KET_1,
    KET_PLUS,
    PHI_PLUS,
    X_BASIS,
    Z_BASIS,
    DensityMatrix,
    DimensionMismatch,
    JointState,
)

SWAP_LIKE = np.array([
    [1, 0, 0, 0],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 1],
], dtype=complex)


class TestPrepare:
    """Initial systems"""

    def test_honest(self):
        """|+> with a trivial ancilla"""
        state = hook_prepare(HonestStrategy())
        assert state.d == 1
        assert np.allclose(state.vector, KET_PLUS.vector)

    @pytest.mark.parametrize("prep,ket", [(0, KET_0), (1, KET_1)])
    def test_faked_single(self, prep, ket):
        """Computational state instead of |+>"""
        assert np.allclose(hook_prepare(FakedSingleStrategy(prep=prep)).vector, ket.vector)

    def test_faked_bell(self):
        """Travelling particle entangled with the retained one"""
        state = hook_prepare(FakedBellStrategy())
        assert state.d == 2
        assert np.allclose(state.vector, PHI_PLUS.vector)
        assert reduced_qubit_state(state).isclose(DensityMatrix(np.eye(2) / 2))

    def test_collective(self):
        """|+> with the ancilla in its first basis state"""
        eye = np.eye(6)
        state = hook_prepare(CollectiveSharedStrategy.from_unitaries(eye, eye, eye))
        assert state.isclose(attach_ancilla(KET_PLUS, np.array([1.0, 0.0, 0.0])))


class TestChannels:
    """Channel interception"""

    def test_non_collective_is_identity(self):
        """Only collective strategies touch the channels"""
        system = hook_prepare(HonestStrategy())
        context = InterceptionContext()
        assert hook_channel(FakedSingleStrategy(), 2, system, context) is system
        assert context.stored == []

    def test_fresh_stores_previous_ancilla(self):
        """A fresh ancilla replaces the previous one on channels 2 and 3"""
        eye = np.eye(4)
        strategy = CollectiveFreshStrategy.from_unitaries(eye, SWAP_LIKE, eye)
        context = InterceptionContext()
        system = hook_channel(strategy, 1, hook_prepare(strategy), context)
        system = hook_channel(strategy, 2, attach_ancilla(KET_1, np.array([0.0, 1.0])), context)
        assert [name for name, _ in context.stored] == ["channel_1"]
        assert np.allclose(np.abs(context.stored[0][1]), [0.0, 1.0])
        # the swap moves the qubit's |1> into the fresh ancilla
        expected = attach_ancilla(KET_0, np.array([0.0, 1.0]))
        assert abs(np.vdot(expected.vector, system.vector)) == pytest.approx(1.0)

    def test_dimension_check(self):
        """The system's ancilla must match the strategy"""
        eye = np.eye(4)
        strategy = CollectiveSharedStrategy.from_unitaries(eye, eye, eye)
        with pytest.raises(DimensionMismatch):
            hook_channel(strategy, 1, attach_ancilla(KET_PLUS, np.ones(1)), InterceptionContext())


class TestFinalMeasurement:
    """TP's final measurement and its record"""

    def test_final_bases(self):
        """Each strategy measures in its own basis"""
        assert final_basis(HonestStrategy()) is X_BASIS
        assert final_basis(FakedSingleStrategy(tp_basis="Z")) is Z_BASIS
        assert final_basis(TPMeasureBasisStrategy(basis=BasisDescriptor(name="X"))) is X_BASIS

    def test_bell_measurement_of_phi_plus(self):
        """phi+ is identified and announced as 0"""
        system = JointState(PHI_PLUS.vector, 2)
        bit, record = hook_tp_final_measure(FakedBellStrategy(), system, InterceptionContext(), RngStream(0, 0))
        assert bit == 0
        assert record.tp_outcome == 0

    def test_policy_override(self):
        """A supplied policy replaces the default"""
        inverted = AnnouncementPolicy(mapping={0: 1, 1: 0})
        system = attach_ancilla(KET_PLUS, np.ones(1))
        bit, record = hook_tp_final_measure(HonestStrategy(), system, InterceptionContext(), RngStream(0, 0), inverted)
        assert record.tp_outcome == 0
        assert bit == 1

    def test_faked_bell_retained_particle(self):
        """Alice HM, Bob MH: TP ends up holding |+>|+>"""
        cfg = ProtocolConfig(rounds=1)
        # alice HM, bob MH, bits 0 and 0, TP finds phi+
        t = run_round(cfg, FakedBellStrategy(), 0, ScriptedRngStream([1, 0, 0, 0, 0]))
        assert (t.alice_op, t.bob_op) == (ParticipantOp.HM, ParticipantOp.MH)
        expected = JointState(np.kron(KET_PLUS.vector, KET_PLUS.vector), 2)
        assert t.adversary_record.final_system.isclose(expected)
        assert t.tp_announced_bit == 0


class TestRecords:
    """Derived density matrices"""

    def test_empty_record(self):
        """No final system means no side information"""
        assert AdversaryRecord().memory_state.d == 1

    def test_honest_memory_is_outcome_register(self):
        """Honest TP only keeps its measurement outcome"""
        t = run_round(ProtocolConfig(rounds=1), HonestStrategy(), 0)
        assert t.adversary_record.memory_state.d == 2

    def test_fresh_memory_includes_stored_ancillas(self):
        """Two stored ancillas and the final qubit-ancilla register"""
        eye = np.eye(4)
        t = run_round(ProtocolConfig(rounds=1), CollectiveFreshStrategy.from_unitaries(eye, eye, eye), 0)
        record = t.adversary_record
        assert sorted(record.ancilla_states) == ["channel_1", "channel_2", "channel_3"]
        assert record.memory_state.d == 2 * 2 * 4

    def test_to_dict(self):
        """Serializable summary"""
        t = run_round(ProtocolConfig(rounds=1), CollectiveSharedStrategy.from_unitaries(np.eye(4), np.eye(4), np.eye(4)), 0)
        summary = t.adversary_record.to_dict()
        assert summary["tp_outcome"] in (0, 1)
        assert list(summary["ancilla_states"]) == ["shared"]
