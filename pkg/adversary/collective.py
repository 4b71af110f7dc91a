"""
Collective Attacks

Builds collective-attack strategies from the coefficient/ancilla description of
the interception unitaries, checks the zero-disturbance constraints as vector
residuals, and measures how much TP's retained state reveals about the key.

The unitaries are only pinned down on the inputs that occur in an honest round
(e.g. |+>|e> for U1); the remaining columns are completed to a unitary with an
orthonormal extension of the specified inputs and images.
"""

from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.linalg import null_space
from scipy.stats import unitary_group

from adversary.strategies import (
    BasisDescriptor,
    CollectiveFreshStrategy,
    CollectiveSharedStrategy,
    ComplexValue,
    complex_to_json,
    to_complex,
    to_complex_vector,
)
from analysis.oracle import enumerate_branches
from analysis.statistics import InsufficientData
from protocol.engine import classify_round
from protocol.schema import ProtocolConfig, RoundTranscript
from quantum.operations import mixture, trace_distance
from quantum.states import KET_MINUS, KET_PLUS
from utils.logger import get_logger

logger = get_logger(__name__)

RESIDUAL_TOLERANCE = 1e-10


class InconsistentParams(ValueError):
    """Raised when collective parameters cannot define a unitary"""
    pass


class CollectiveCoefficients(BaseModel):
    """
    Coefficient description of the three interception unitaries.

    U1 |+>|e>  = a0|0>|f0> + a1|1>|f1>
    U2 |+>|in> = b0|0>|g0> + b1|1>|g1>,  U2 |->|in> = c0|0>|h0> + c1|1>|h1>
    U3 |+>|in> = d0|0>|i0> + d1|1>|i1>,  U3 |->|in> = e0|0>|j0> + e1|1>|j1>

    |in> is a fresh |e> for the fresh variant; f0 (for U2) and g0 (for U3)
    for the shared variant.
    """
    variant: Literal["fresh", "shared"] = Field(default="fresh")
    tp_basis: Literal["Z", "X"] = Field(default="X", description="TP's final measurement basis")
    ancilla_dim: int = Field(default=2, ge=1)

    a0: ComplexValue
    a1: ComplexValue
    b0: ComplexValue
    b1: ComplexValue
    c0: ComplexValue
    c1: ComplexValue
    d0: ComplexValue
    d1: ComplexValue
    e0: ComplexValue
    e1: ComplexValue

    f0: List[ComplexValue]
    f1: List[ComplexValue]
    g0: List[ComplexValue]
    g1: List[ComplexValue]
    h0: List[ComplexValue]
    h1: List[ComplexValue]
    i0: List[ComplexValue]
    i1: List[ComplexValue]
    j0: List[ComplexValue]
    j1: List[ComplexValue]

    def coefficient(self, name: str) -> complex:
        return to_complex(getattr(self, name))

    def ket(self, name: str) -> np.ndarray:
        return to_complex_vector(getattr(self, name))

    @classmethod
    def zero_disturbance_shared(cls, ancilla_dim: int = 2) -> "CollectiveCoefficients":
        """
        Shared-ancilla parameters meeting every zero-disturbance condition:
        U1 and U2 leave the qubit alone, U3 maps |+> to |0>|i0> and |-> to |1>|j1>.
        """
        e = basis_ket(ancilla_dim, 0)
        other = basis_ket(ancilla_dim, 1 % ancilla_dim)
        h = float(1.0 / np.sqrt(2.0))
        e_json = complex_to_json(e)
        other_json = complex_to_json(other)
        return cls(
            variant="shared", tp_basis="Z", ancilla_dim=ancilla_dim,
            a0=h, a1=h, b0=h, b1=h, c0=h, c1=-h, d0=1.0, d1=0.0, e0=0.0, e1=1.0,
            f0=e_json, f1=e_json, g0=e_json, g1=e_json, h0=e_json, h1=e_json,
            i0=e_json, i1=other_json, j0=e_json, j1=other_json,
        )


def basis_ket(dim: int, index: int) -> np.ndarray:
    ket = np.zeros(dim, dtype=np.complex128)
    ket[index] = 1.0
    return ket


def complete_unitary(inputs: Sequence[np.ndarray], images: Sequence[np.ndarray]) -> np.ndarray:
    """Unitary mapping each input column to its image, extended orthonormally"""
    x = np.column_stack(inputs).astype(np.complex128)
    y = np.column_stack(images).astype(np.complex128)
    k = x.shape[1]
    if not np.allclose(x.conj().T @ x, np.eye(k), atol=RESIDUAL_TOLERANCE):
        raise InconsistentParams("specified input columns are not orthonormal")
    if not np.allclose(y.conj().T @ y, np.eye(k), atol=RESIDUAL_TOLERANCE):
        raise InconsistentParams("specified images are not orthonormal")
    x_full = np.hstack([x, null_space(x.conj().T)])
    y_full = np.hstack([y, null_space(y.conj().T)])
    return y_full @ x_full.conj().T


def _image(c0: complex, k0: np.ndarray, c1: complex, k1: np.ndarray) -> np.ndarray:
    # c0|0>|k0> + c1|1>|k1>
    return np.concatenate([c0 * k0, c1 * k1])


def _check_params(p: CollectiveCoefficients) -> None:
    for pair in (("a0", "a1"), ("b0", "b1"), ("c0", "c1"), ("d0", "d1"), ("e0", "e1")):
        total = sum(abs(p.coefficient(name)) ** 2 for name in pair)
        if abs(total - 1.0) > RESIDUAL_TOLERANCE:
            raise InconsistentParams(f"|{pair[0]}|^2 + |{pair[1]}|^2 = {total!r}, expected 1")
    for name in ("f0", "f1", "g0", "g1", "h0", "h1", "i0", "i1", "j0", "j1"):
        ket = p.ket(name)
        if ket.size != p.ancilla_dim:
            raise InconsistentParams(f"{name} has dimension {ket.size}, expected {p.ancilla_dim}")
        if abs(np.linalg.norm(ket) - 1.0) > RESIDUAL_TOLERANCE:
            raise InconsistentParams(f"{name} is not a unit vector")


def _unitaries(p: CollectiveCoefficients) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    _check_params(p)
    c = p.coefficient
    k = p.ket
    e = basis_ket(p.ancilla_dim, 0)
    plus = lambda anc: np.kron(KET_PLUS.vector, anc)
    minus = lambda anc: np.kron(KET_MINUS.vector, anc)

    u2_input = e if p.variant == "fresh" else k("f0")
    u3_input = e if p.variant == "fresh" else k("g0")

    u1 = complete_unitary([plus(e)], [_image(c("a0"), k("f0"), c("a1"), k("f1"))])
    u2 = complete_unitary(
        [plus(u2_input), minus(u2_input)],
        [_image(c("b0"), k("g0"), c("b1"), k("g1")), _image(c("c0"), k("h0"), c("c1"), k("h1"))],
    )
    u3 = complete_unitary(
        [plus(u3_input), minus(u3_input)],
        [_image(c("d0"), k("i0"), c("d1"), k("i1")), _image(c("e0"), k("j0"), c("e1"), k("j1"))],
    )
    return u1, u2, u3


def collective_from_coefficients(p: CollectiveCoefficients):
    """Explicit collective strategy for the coefficient description ``p``"""
    u1, u2, u3 = _unitaries(p)
    strategy_class = CollectiveFreshStrategy if p.variant == "fresh" else CollectiveSharedStrategy
    return strategy_class.from_unitaries(u1, u2, u3, tp_basis=BasisDescriptor(name=p.tp_basis))


class CollectiveConstraintReport(BaseModel):
    """Zero-disturbance constraints of a collective attack, checked numerically"""
    variant: str
    tp_basis: str
    residuals: Dict[str, float] = Field(description="Norm of each constraint's left-hand side")
    all_residuals_zero: bool
    unsatisfiable_demands: List[str] = Field(default_factory=list)
    alice_abort_probability: float = Field(description="Probability an HM Alice measures 1")
    detection_probability: float
    detection_channels_1_2: float = Field(description="Detection with U3 replaced by the identity and an X measurement")
    distinguishability: float
    no_go_consistent: bool


def _orthogonal(u: np.ndarray, v: np.ndarray) -> bool:
    return abs(np.vdot(u, v)) <= RESIDUAL_TOLERANCE


def collective_constraint_report(
    p: CollectiveCoefficients,
    variant: Optional[str] = None,
    tp_basis: Optional[str] = None,
    cfg: Optional[ProtocolConfig] = None,
) -> CollectiveConstraintReport:
    overrides = {}
    if variant is not None:
        overrides["variant"] = variant
    if tp_basis is not None:
        overrides["tp_basis"] = tp_basis
    p = p.model_copy(update=overrides)
    strategy = collective_from_coefficients(p)

    c = p.coefficient
    k = p.ket
    residuals = {
        "channel_1: a0 f0 - a1 f1": np.linalg.norm(c("a0") * k("f0") - c("a1") * k("f1")),
        "channel_2: b1 g1 + c1 h1": np.linalg.norm(c("b1") * k("g1") + c("c1") * k("h1")),
        "channel_2: b0 g0 - b1 g1": np.linalg.norm(c("b0") * k("g0") - c("b1") * k("g1")),
        "channel_2: c0 h0 + c1 h1": np.linalg.norm(c("c0") * k("h0") + c("c1") * k("h1")),
    }
    if p.tp_basis == "X":
        residuals["channel_3: d0 i0 - d1 i1"] = np.linalg.norm(c("d0") * k("i0") - c("d1") * k("i1"))
        residuals["channel_3: e0 j0 + e1 j1"] = np.linalg.norm(c("e0") * k("j0") + c("e1") * k("j1"))
    else:
        residuals["channel_3: d1 i1"] = np.linalg.norm(c("d1") * k("i1"))
        residuals["channel_3: e0 j0"] = np.linalg.norm(c("e0") * k("j0"))
    residuals = {name: float(value) for name, value in residuals.items()}
    all_zero = all(value <= RESIDUAL_TOLERANCE for value in residuals.values())

    # With orthonormal fresh ancilla bases the equalities can only hold for
    # vanishing coefficients, which normalization forbids.
    unsatisfiable = []
    if p.variant == "fresh":
        if _orthogonal(k("f0"), k("f1")):
            unsatisfiable.append("channel_1: a0 f0 = a1 f1 with orthonormal f0, f1")
        if _orthogonal(k("g0"), k("g1")) and _orthogonal(k("h0"), k("h1")):
            unsatisfiable.append("channel_2: b0 g0 = b1 g1 = c0 h0 = -c1 h1 with orthonormal g and h")
        if p.tp_basis == "X" and _orthogonal(k("i0"), k("i1")) and _orthogonal(k("j0"), k("j1")):
            unsatisfiable.append("channel_3: d0 i0 = d1 i1 and e0 j0 = -e1 j1 with orthonormal i and j")

    cfg = cfg or ProtocolConfig(rounds=1)
    detection = enumerate_branches(strategy, cfg).flagged_weight
    u1, u2, _ = strategy.unitaries()
    channels_1_2 = type(strategy).from_unitaries(
        u1, u2, np.eye(2 * p.ancilla_dim), tp_basis=BasisDescriptor(name="X")
    )
    detection_1_2 = enumerate_branches(channels_1_2, cfg).flagged_weight
    distinguishability = analytic_distinguishability(strategy, cfg)

    no_go = (not all_zero) or distinguishability <= RESIDUAL_TOLERANCE
    if not no_go:
        logger.error("All zero-disturbance residuals vanish but TP distinguishes the key")

    return CollectiveConstraintReport(
        variant=p.variant,
        tp_basis=p.tp_basis,
        residuals=residuals,
        all_residuals_zero=all_zero,
        unsatisfiable_demands=unsatisfiable,
        alice_abort_probability=residuals["channel_1: a0 f0 - a1 f1"] ** 2 / 2.0,
        detection_probability=detection,
        detection_channels_1_2=detection_1_2,
        distinguishability=distinguishability,
        no_go_consistent=no_go,
    )


def _key_conditioned_distance(weighted_states) -> float:
    """weighted_states: iterable of (key bit, weight, DensityMatrix)"""
    groups = {0: ([], []), 1: ([], [])}
    for bit, weight, rho in weighted_states:
        groups[bit][0].append(weight)
        groups[bit][1].append(rho)
    for bit, (weights, _) in groups.items():
        if not weights or sum(weights) <= 0.0:
            raise InsufficientData(f"no key rounds with key bit {bit}")
    rho_0 = mixture(*groups[0])
    rho_1 = mixture(*groups[1])
    return trace_distance(rho_0, rho_1)


def adversary_distinguishability(records, transcripts: Sequence[RoundTranscript]) -> float:
    """
    Trace distance between TP's average retained state over situation-2 rounds
    with key bit 0 and with key bit 1.

    ``records`` align with ``transcripts``; pass None to use the records the
    transcripts carry.
    """
    if records is None:
        records = [t.adversary_record for t in transcripts]
    states = []
    for record, t in zip(records, transcripts):
        if record is None or classify_round(t).situation != 2:
            continue
        states.append((t.alice_bit, 1.0, record.memory_state))
    return _key_conditioned_distance(states)


def analytic_distinguishability(strategy, cfg: Optional[ProtocolConfig] = None) -> float:
    """Exact key-conditioned trace distance from the branch enumeration"""
    enumeration = enumerate_branches(strategy, cfg)
    states = [
        (b.transcript.alice_bit, b.weight, b.transcript.adversary_record.memory_state)
        for b in enumeration.branches
        if b.situation == 2
    ]
    return _key_conditioned_distance(states)


def random_collective_strategy(
    seed: int,
    variant: str = "fresh",
    tp_basis: str = "X",
    ancilla_dim: int = 2,
):
    """Collective strategy with Haar-random U1, U2, U3"""
    rng = np.random.default_rng(seed)
    size = 2 * ancilla_dim
    u1, u2, u3 = (unitary_group.rvs(size, random_state=rng) for _ in range(3))
    strategy_class = CollectiveFreshStrategy if variant == "fresh" else CollectiveSharedStrategy
    return strategy_class.from_unitaries(u1, u2, u3, tp_basis=BasisDescriptor(name=tp_basis))
