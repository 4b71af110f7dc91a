"""
Sifting

Public discussion over a full run: classify every round, check the honesty
conditions of each situation, disclose part of the situation-2 rounds, extract
the raw key and decide whether to abort.
"""

import math
from typing import Iterable, List, Optional

from protocol.engine import classify_round
from protocol.schema import AbortReason, ProtocolConfig, RoundTranscript, SiftOutcome
from quantum.rng import SIFT_STREAM_ID, RngStream
from utils.logger import get_logger

logger = get_logger(__name__)


class EmptyRun(ValueError):
    """Raised when there is nothing to sift"""
    pass


def disclosed_count(check_fraction: float, count: int) -> int:
    # guard against products like 0.1 * 30 = 3.0000000000000004
    return min(count, max(0, math.ceil(check_fraction * count - 1e-9)))


def round_error_event(t: RoundTranscript, situation: int, disclosed: bool = False) -> bool:
    """Honesty check of one round; situation-2 rounds only count when disclosed"""
    if t.alice_aborted_flag:
        return True
    if situation == 1:
        return t.tp_announced_bit != t.bob_bit
    if situation == 2:
        return disclosed and t.alice_bit != t.bob_bit
    if situation == 3:
        return t.alice_bit != 0 or t.bob_bit != 0 or t.tp_announced_bit != 0
    return t.alice_bit != 0


def sift(
    transcripts: Iterable[RoundTranscript],
    cfg: ProtocolConfig,
    rng: Optional[RngStream] = None,
) -> SiftOutcome:
    transcripts = sorted(transcripts, key=lambda t: t.round_index)
    if not transcripts:
        raise EmptyRun("no transcripts to sift")
    rng = rng or RngStream(cfg.master_seed, SIFT_STREAM_ID)

    classes = [classify_round(t) for t in transcripts]
    situation_counts = [0, 0, 0, 0]
    counts = [0] * 9
    undefined = 0
    situation4_announcements = [0, 0]
    for t, c in zip(transcripts, classes):
        situation_counts[c.situation - 1] += 1
        if c.case_id is None:
            undefined += 1
        else:
            counts[c.case_id - 1] += 1
        if c.situation == 4:
            situation4_announcements[t.tp_announced_bit] += 1

    key_rounds = [i for i, c in enumerate(classes) if c.situation == 2]
    picks = rng.sample_indices(len(key_rounds), disclosed_count(cfg.check_fraction, len(key_rounds)))
    disclosed = {key_rounds[p] for p in picks}

    errors = [0, 0, 0, 0]
    flagged: List[int] = []
    key_alice: List[str] = []
    key_bob: List[str] = []
    for i, (t, c) in enumerate(zip(transcripts, classes)):
        if round_error_event(t, c.situation, i in disclosed):
            errors[c.situation - 1] += 1
            flagged.append(t.round_index)
        if c.situation == 2 and i not in disclosed:
            key_alice.append(str(t.alice_bit))
            key_bob.append(str(t.bob_bit))

    # situation-2 agreement is only tested on the disclosed rounds
    denominators = list(situation_counts)
    denominators[1] = len(disclosed)
    rates = [e / n if n else 0.0 for e, n in zip(errors, denominators)]

    aborted = any(rate > cfg.error_threshold for rate in rates)
    reason = AbortReason.NONE
    if aborted:
        any_alice_abort = any(t.alice_aborted_flag for t in transcripts)
        reason = AbortReason.ALICE_HM_MEASURED_ONE if any_alice_abort else AbortReason.THRESHOLD_EXCEEDED

    outcome = SiftOutcome(
        total_rounds=len(transcripts),
        per_situation_error_rate=rates,
        situation_counts=situation_counts,
        situation_error_counts=errors,
        raw_key_alice="".join(key_alice),
        raw_key_bob="".join(key_bob),
        disclosed_positions=sorted(transcripts[i].round_index for i in disclosed),
        flagged_positions=flagged,
        aborted=aborted,
        abort_reason=reason,
        counts=counts,
        undefined_count=undefined,
        situation4_announcements=situation4_announcements,
    )
    if aborted:
        logger.warning(f"Sifting aborted the run: {reason.value} (error rates {rates})")
    else:
        logger.info(f"Sifted {len(transcripts)} rounds into a {outcome.key_length}-bit raw key")
    return outcome


def qubit_efficiency(outcome: SiftOutcome, cfg: ProtocolConfig) -> float:
    """Raw-key bits per TP-prepared qubit"""
    if outcome.aborted:
        logger.warning("Efficiency requested for an aborted run")
    return outcome.key_length / cfg.rounds
