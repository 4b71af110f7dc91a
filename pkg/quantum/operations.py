"""
Quantum Operations

Pure functions over the qubit-core value types: gates, Born-rule measurement,
tensor products, partial traces and trace distance. Measurements draw from an
RngStream and collapse onto the basis vector, discarding global phase.
"""

from typing import Tuple

import numpy as np
from scipy.linalg import block_diag

from quantum.rng import BRANCH_EPSILON, RngStream
from quantum.states import (
    NORM_TOLERANCE,
    UNITARY_TOLERANCE,
    Basis1Q,
    Basis2Q,
    DegenerateBranch,
    DensityMatrix,
    DimensionMismatch,
    EntangledState,
    JointState,
    NonUnitary,
    PureState1Q,
    PureState2Q,
    SQRT_HALF,
    normalize,
)


HADAMARD = np.array([[SQRT_HALF, SQRT_HALF], [SQRT_HALF, -SQRT_HALF]], dtype=np.complex128)
TRIVIAL_ANCILLA = np.ones(1, dtype=np.complex128)


def hadamard(s: PureState1Q) -> PureState1Q:
    return PureState1Q.from_trusted(HADAMARD @ s.vector)


def born_probabilities(s: PureState1Q, b: Basis1Q) -> Tuple[float, float]:
    """p_k = |<b_k|s>|^2"""
    amplitudes = b.bras @ s.vector
    p = np.abs(amplitudes) ** 2
    return float(p[0]), float(p[1])


def born_probabilities_2q(s: PureState2Q, b: Basis2Q) -> Tuple[float, ...]:
    amplitudes = b.vectors.conj() @ s.vector
    return tuple(float(p) for p in np.abs(amplitudes) ** 2)


def measure_1q(s: PureState1Q, b: Basis1Q, rng: RngStream) -> Tuple[int, PureState1Q]:
    probabilities = born_probabilities(s, b)
    outcome = rng.choose(probabilities, f"measure {b.name}")
    if probabilities[outcome] < BRANCH_EPSILON:
        raise DegenerateBranch(f"outcome {outcome} in basis {b.name} is impossible")
    return outcome, b.ket(outcome)


def measure_2q(s: PureState2Q, b: Basis2Q, rng: RngStream) -> Tuple[int, PureState2Q]:
    probabilities = born_probabilities_2q(s, b)
    outcome = rng.choose(probabilities, f"measure {b.name}")
    if probabilities[outcome] < BRANCH_EPSILON:
        raise DegenerateBranch(f"outcome {outcome} in basis {b.name} is impossible")
    return outcome, b.ket(outcome)


def attach_ancilla(q: PureState1Q, anc: np.ndarray) -> JointState:
    if anc is TRIVIAL_ANCILLA:
        return JointState.from_trusted(q.vector, 1)
    ancilla = np.asarray(anc, dtype=np.complex128).reshape(-1)
    if abs(np.vdot(ancilla, ancilla).real - 1.0) > NORM_TOLERANCE:
        raise DimensionMismatch("ancilla must be a unit vector")
    # row-major outer product: amplitude of |q>|a> lands at q * d + a
    return JointState.from_trusted(np.outer(q.vector, ancilla).reshape(-1), ancilla.size)


def is_unitary(u: np.ndarray, tolerance: float = UNITARY_TOLERANCE) -> bool:
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tolerance)


def apply_joint_unitary(s: JointState, u: np.ndarray) -> JointState:
    u = np.asarray(u, dtype=np.complex128)
    size = 2 * s.ancilla_dim
    if u.shape != (size, size):
        raise DimensionMismatch(f"unitary of shape {u.shape} cannot act on a {size}-dim joint state")
    if not is_unitary(u):
        raise NonUnitary("joint operator fails the unitarity check")
    return JointState.from_trusted(normalize(u @ s.vector), s.ancilla_dim)


def apply_qubit_unitary(s: JointState, u: np.ndarray) -> JointState:
    """Apply a 2x2 gate to the qubit factor only"""
    if u is HADAMARD:
        return JointState.from_trusted((HADAMARD @ s.as_matrix()).reshape(-1), s.ancilla_dim)
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2) or not is_unitary(u):
        raise NonUnitary("qubit gate fails the unitarity check")
    return JointState.from_trusted(normalize((u @ s.as_matrix()).reshape(-1)), s.ancilla_dim)


def _project_qubit(s: JointState, b: Basis1Q) -> Tuple[np.ndarray, np.ndarray]:
    # row k holds the unnormalised ancilla residual (<b_k| x I)s
    residuals = b.bras @ s.as_matrix()
    probabilities = (residuals.real ** 2 + residuals.imag ** 2).sum(axis=1)
    return residuals, probabilities


def measure_qubit_residual(s: JointState, b: Basis1Q, rng: RngStream) -> Tuple[int, np.ndarray]:
    """Measure the qubit of ``s``; return the outcome and the normalised ancilla residual"""
    residuals, probabilities = _project_qubit(s, b)
    outcome = rng.choose(probabilities.tolist(), f"measure qubit {b.name}")
    if probabilities[outcome] < BRANCH_EPSILON:
        raise DegenerateBranch(f"qubit outcome {outcome} in basis {b.name} is impossible")
    return outcome, residuals[outcome] / np.sqrt(probabilities[outcome])


def measure_qubit_of_joint(s: JointState, b: Basis1Q, rng: RngStream) -> Tuple[int, JointState]:
    outcome, residual = measure_qubit_residual(s, b, rng)
    return outcome, attach_ancilla(b.ket(outcome), residual)


def reduced_ancilla_state(s: JointState) -> DensityMatrix:
    m = s.as_matrix()
    return DensityMatrix(m.T @ m.conj())


def reduced_qubit_state(s: JointState) -> DensityMatrix:
    m = s.as_matrix()
    return DensityMatrix(m @ m.conj().T)


def split_product(s: JointState, tolerance: float = 1e-9) -> Tuple[PureState1Q, np.ndarray]:
    """Factor a product joint state into its qubit and ancilla kets"""
    left, singular, right = np.linalg.svd(s.as_matrix())
    if len(singular) > 1 and singular[1] > tolerance:
        raise EntangledState(f"joint state has Schmidt coefficient {singular[1]!r}")
    return PureState1Q(normalize(left[:, 0])), normalize(right[0])


def classical_quantum_state(s: JointState, b: Basis1Q) -> DensityMatrix:
    """
    Outcome register tensored with ancilla after measuring the qubit in ``b``,
    averaged over the outcome: sum_k |k><k| x (<b_k| x I) rho (|b_k> x I).
    """
    residuals, _ = _project_qubit(s, b)
    blocks = [np.outer(row, row.conj()) for row in residuals]
    return DensityMatrix(block_diag(*blocks))


def classical_state_2q(s: PureState2Q, b: Basis2Q) -> DensityMatrix:
    """Outcome register left by a full two-qubit measurement"""
    return DensityMatrix(np.diag(born_probabilities_2q(s, b)).astype(np.complex128))


def trace_distance(r1: DensityMatrix, r2: DensityMatrix) -> float:
    if r1.d != r2.d:
        raise DimensionMismatch(f"cannot compare {r1.d}-dim and {r2.d}-dim density matrices")
    eigenvalues = np.linalg.eigvalsh(r1.matrix - r2.matrix)
    return float(min(1.0, max(0.0, 0.5 * np.sum(np.abs(eigenvalues)))))


def mixture(weights, states) -> DensityMatrix:
    """Convex combination of density matrices, renormalised by the total weight"""
    total = float(sum(weights))
    if total <= 0.0:
        raise ValueError("mixture needs positive total weight")
    matrix = sum(w * rho.matrix for w, rho in zip(weights, states)) / total
    return DensityMatrix(matrix)
