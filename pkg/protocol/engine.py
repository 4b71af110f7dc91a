"""
Protocol Round Engine

This module executes single protocol rounds. A round runs TP's preparation, the
channel-1 hook, Alice's step, the channel-2 hook, Bob's step, the channel-3 hook
and TP's measurement/announcement, honoring the substitutions of the adversary
strategy. Every round draws from its own stream keyed by the round index.
"""

import logging
from typing import Optional, Tuple

from adversary.hooks import InterceptionContext, hook_channel, hook_prepare, hook_tp_final_measure
from adversary.strategies import HonestStrategy
from protocol.schema import ParticipantOp, ProtocolConfig, RoundTranscript, SituationClass
from quantum.operations import (
    HADAMARD,
    TRIVIAL_ANCILLA,
    apply_qubit_unitary,
    attach_ancilla,
    measure_1q,
    measure_qubit_residual,
)
from quantum.rng import RngStream
from quantum.states import COMPUTATIONAL_KETS, KET_MINUS, KET_PLUS, X_BASIS, Z_BASIS, JointState, PureState1Q
from utils.logger import get_logger

logger = get_logger(__name__)


class RoundIndexError(IndexError):
    """Raised when a round index lies outside the configured run"""
    pass


# (alice_op, bob_op) -> situation
SITUATIONS = {
    (ParticipantOp.MH, ParticipantOp.MH): 1,
    (ParticipantOp.MH, ParticipantOp.HM): 2,
    (ParticipantOp.HM, ParticipantOp.MH): 3,
    (ParticipantOp.HM, ParticipantOp.HM): 4,
}

# (situation, alice_bit, bob_bit) -> case
CASES = {
    (1, 0, 0): 1,
    (1, 0, 1): 2,
    (1, 1, 0): 4,
    (1, 1, 1): 5,
    (2, 0, 0): 3,
    (2, 1, 1): 6,
    (3, 0, 0): 7,
    (4, 0, 0): 8,
    (4, 0, 1): 9,
}


# H|bit>
HADAMARD_KETS = (KET_PLUS, KET_MINUS)


def tp_prepare() -> PureState1Q:
    return KET_PLUS


def party_step_joint(op: ParticipantOp, incoming: JointState, rng: RngStream) -> Tuple[int, JointState]:
    """
    Classical participant acting on the qubit of a qubit-ancilla system.

    MH: measure Z, prepare |bit>, apply H. HM: apply H, measure Z, prepare |bit>.
    The ancilla keeps the residual left by the measurement.
    """
    state = incoming
    if op == ParticipantOp.HM:
        state = apply_qubit_unitary(state, HADAMARD)
    bit, residual = measure_qubit_residual(state, Z_BASIS, rng)
    outgoing = HADAMARD_KETS[bit] if op == ParticipantOp.MH else COMPUTATIONAL_KETS[bit]
    return bit, attach_ancilla(outgoing, residual)


def classical_party_step(op: ParticipantOp, incoming: PureState1Q, rng: RngStream) -> Tuple[int, PureState1Q]:
    bit, _ = party_step_joint(op, attach_ancilla(incoming, TRIVIAL_ANCILLA), rng)
    return bit, HADAMARD_KETS[bit] if op == ParticipantOp.MH else COMPUTATIONAL_KETS[bit]


def tp_measure_announce(incoming: PureState1Q, rng: RngStream) -> int:
    """Honest X measurement; + announces 0, - announces 1"""
    outcome, _ = measure_1q(incoming, X_BASIS, rng)
    return outcome


def choose_ops(cfg: ProtocolConfig, rng: RngStream) -> Tuple[ParticipantOp, ParticipantOp]:
    alice_op = ParticipantOp.MH if rng.bernoulli(cfg.p_alice_mh, "alice op") else ParticipantOp.HM
    bob_op = ParticipantOp.MH if rng.bernoulli(cfg.p_bob_mh, "bob op") else ParticipantOp.HM
    return alice_op, bob_op


def run_round(
    cfg: ProtocolConfig,
    adversary=None,
    round_index: int = 0,
    rng: Optional[RngStream] = None,
    keep_record: bool = True,
) -> RoundTranscript:
    """Execute one round; deterministic given (cfg.master_seed, round_index)"""
    if not 0 <= round_index < cfg.rounds:
        raise RoundIndexError(f"round {round_index} outside run of {cfg.rounds} rounds")
    adversary = adversary or HonestStrategy()
    rng = rng or RngStream(cfg.master_seed, round_index)

    alice_op, bob_op = choose_ops(cfg, rng)
    context = InterceptionContext()

    system = hook_prepare(adversary)
    system = hook_channel(adversary, 1, system, context)
    alice_bit, system = party_step_joint(alice_op, system, rng)
    system = hook_channel(adversary, 2, system, context)
    bob_bit, system = party_step_joint(bob_op, system, rng)
    system = hook_channel(adversary, 3, system, context)
    announced, record = hook_tp_final_measure(adversary, system, context, rng)

    transcript = RoundTranscript(
        round_index=round_index,
        alice_op=alice_op,
        bob_op=bob_op,
        alice_bit=alice_bit,
        bob_bit=bob_bit,
        tp_announced_bit=announced,
        alice_aborted_flag=alice_op == ParticipantOp.HM and alice_bit == 1,
        adversary_record=record if keep_record else None,
    )
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            f"Round {round_index}: {alice_op.value}/{bob_op.value} bits {alice_bit}{bob_bit} announced {announced}"
        )
    return transcript


def situation_of(alice_op: ParticipantOp, bob_op: ParticipantOp) -> int:
    return SITUATIONS[(alice_op, bob_op)]


def classify_round(t: RoundTranscript) -> SituationClass:
    situation = situation_of(t.alice_op, t.bob_op)
    if t.alice_aborted_flag:
        return SituationClass(situation=situation, case_id=None)
    return SituationClass(situation=situation, case_id=CASES.get((situation, t.alice_bit, t.bob_bit)))
