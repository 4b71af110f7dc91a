"""
Branch Oracle

Exact analysis of a strategy by exhaustive enumeration of protocol branches.
The round pipeline is replayed with scripted outcomes; whenever it reaches an
unscripted draw, every possible outcome of that draw is explored. Each complete
branch carries its Born weight and the sift error predicate evaluated on it.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from adversary.strategies import BasisDescriptor, HonestStrategy, TPMeasureBasisStrategy
from protocol.engine import classify_round, run_round
from protocol.schema import ParticipantOp, ProtocolConfig, RoundTranscript
from protocol.sifting import round_error_event
from quantum.rng import BRANCH_EPSILON, ScriptedRngStream, ScriptExhausted
from utils.logger import get_logger

logger = get_logger(__name__)

WEIGHT_TOLERANCE = 1e-12

# Probability of each case in an honest run
HONEST_CASE_WEIGHTS = (1 / 16, 1 / 16, 1 / 8, 1 / 16, 1 / 16, 1 / 8, 1 / 4, 1 / 8, 1 / 8)


@dataclass(frozen=True)
class Branch:
    """One fully resolved protocol branch"""
    alice_op: ParticipantOp
    bob_op: ParticipantOp
    outcomes: Tuple[int, ...]
    weight: float
    situation: int
    case_id: Optional[int]
    disclosed: Optional[bool]
    flagged: bool
    transcript: RoundTranscript = field(compare=False, repr=False)


@dataclass
class BranchEnumeration:
    strategy_label: str
    branches: List[Branch]

    @property
    def total_weight(self) -> float:
        return sum(b.weight for b in self.branches)

    @property
    def flagged_weight(self) -> float:
        return sum(b.weight for b in self.branches if b.flagged)

    def case_weights(self) -> List[float]:
        weights = [0.0] * 9
        for b in self.branches:
            if b.case_id is not None:
                weights[b.case_id - 1] += b.weight
        return weights

    @property
    def undefined_weight(self) -> float:
        return sum(b.weight for b in self.branches if b.case_id is None)

    def situation_weights(self) -> List[float]:
        weights = [0.0] * 4
        for b in self.branches:
            weights[b.situation - 1] += b.weight
        return weights

    def flagged_by_situation(self) -> List[float]:
        weights = [0.0] * 4
        for b in self.branches:
            if b.flagged:
                weights[b.situation - 1] += b.weight
        return weights


def enumerate_branches(strategy=None, cfg: Optional[ProtocolConfig] = None) -> BranchEnumeration:
    """Walk every measurement branch of one round under ``strategy``"""
    strategy = strategy or HonestStrategy()
    cfg = cfg or ProtocolConfig(rounds=1)
    branches: List[Branch] = []
    pending: List[Tuple[int, ...]] = [()]

    while pending:
        script = pending.pop()
        rng = ScriptedRngStream(script)
        try:
            transcript = run_round(cfg, strategy, 0, rng)
        except ScriptExhausted as point:
            possible = [k for k, p in enumerate(point.probabilities) if p > BRANCH_EPSILON]
            # reversed so that branches come out in outcome order
            pending.extend(script + (k,) for k in reversed(possible))
            continue

        situation_class = classify_round(transcript)
        situation = situation_class.situation
        if situation == 2:
            # disclosure is a separate random split of the key rounds
            splits = ((True, cfg.check_fraction), (False, 1.0 - cfg.check_fraction))
        else:
            splits = ((None, 1.0),)
        for disclosed, share in splits:
            weight = rng.path_probability * share
            if weight <= 0.0:
                continue
            branches.append(Branch(
                alice_op=transcript.alice_op,
                bob_op=transcript.bob_op,
                outcomes=script,
                weight=weight,
                situation=situation,
                case_id=situation_class.case_id,
                disclosed=disclosed,
                flagged=round_error_event(transcript, situation, bool(disclosed)),
                transcript=transcript,
            ))

    enumeration = BranchEnumeration(strategy_label=strategy.label(), branches=branches)
    if abs(enumeration.total_weight - 1.0) > WEIGHT_TOLERANCE:
        logger.warning(f"Branch weights of {strategy.label()} sum to {enumeration.total_weight!r}")
    logger.debug(f"Enumerated {len(branches)} branches for {strategy.label()}")
    return enumeration


def per_round_detection(strategy=None, cfg: Optional[ProtocolConfig] = None) -> float:
    """Probability that a single round raises an error event"""
    return enumerate_branches(strategy, cfg).flagged_weight


def basis_angle_detection(theta: float, cfg: Optional[ProtocolConfig] = None) -> float:
    """Detection of a TP measuring in the basis rotated by ``theta`` from Z"""
    strategy = TPMeasureBasisStrategy(basis=BasisDescriptor(name="rotated", theta=theta))
    return per_round_detection(strategy, cfg)
