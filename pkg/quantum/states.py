"""
Quantum State Types

This module defines the immutable value types of the qubit core: single-qubit,
two-qubit and qubit-ancilla pure states, density matrices, and measurement bases.
All amplitudes are stored as numpy complex128 arrays.
"""

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np


NORM_TOLERANCE = 1e-12
UNITARY_TOLERANCE = 1e-10
DENSITY_TOLERANCE = 1e-10

ArrayLike = Union[Sequence[complex], np.ndarray]


class QuantumStateError(ValueError):
    """Base exception for invalid quantum objects"""
    pass


class NotNormalized(QuantumStateError):
    """Raised when a state vector does not have unit norm"""
    pass


class NonUnitary(QuantumStateError):
    """Raised when a matrix fails the unitarity check"""
    pass


class DegenerateBranch(QuantumStateError):
    """Raised when a measurement branch of (near) zero probability is drawn"""
    pass


class DimensionMismatch(QuantumStateError):
    """Raised when operands have incompatible dimensions"""
    pass


class EntangledState(QuantumStateError):
    """Raised when a product decomposition is requested for an entangled state"""
    pass


def _frozen_vector(values: ArrayLike, length: int, label: str) -> np.ndarray:
    vector = np.array(values, dtype=np.complex128).reshape(-1)
    if vector.shape != (length,):
        raise DimensionMismatch(f"{label} expects {length} amplitudes, got {vector.size}")
    if not np.all(np.isfinite(vector)):
        raise QuantumStateError(f"{label} has non-finite amplitudes")
    norm = float(np.vdot(vector, vector).real)
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise NotNormalized(f"{label} norm is {norm!r}, expected 1")
    vector.flags.writeable = False
    return vector


def _trusted(cls, **fields):
    """Instance of ``cls`` from amplitudes produced by a norm-preserving operation"""
    state = object.__new__(cls)
    for name, value in fields.items():
        if isinstance(value, np.ndarray):
            value.flags.writeable = False
        object.__setattr__(state, name, value)
    return state


def normalize(values: ArrayLike) -> np.ndarray:
    """Return a unit-norm complex copy of ``values``"""
    vector = np.array(values, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise NotNormalized("cannot normalize the zero vector")
    return vector / norm


@dataclass(frozen=True, eq=False)
class PureState1Q:
    """Single-qubit pure state a0|0> + a1|1>"""
    vector: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vector", _frozen_vector(self.vector, 2, "PureState1Q"))

    @classmethod
    def from_amplitudes(cls, a0: complex, a1: complex) -> "PureState1Q":
        return cls(np.array([a0, a1], dtype=np.complex128))

    @classmethod
    def from_trusted(cls, vector: np.ndarray) -> "PureState1Q":
        """Skip validation; ``vector`` must be a unit complex128 array of length 2"""
        return _trusted(cls, vector=vector)

    @property
    def a0(self) -> complex:
        return complex(self.vector[0])

    @property
    def a1(self) -> complex:
        return complex(self.vector[1])

    def isclose(self, other: "PureState1Q", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.vector, other.vector, atol=atol))

    def __mul__(self, phase: complex) -> "PureState1Q":
        return PureState1Q(self.vector * phase)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class PureState2Q:
    """Two-qubit pure state over |00>, |01>, |10>, |11>"""
    vector: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vector", _frozen_vector(self.vector, 4, "PureState2Q"))

    @classmethod
    def product(cls, first: PureState1Q, second: PureState1Q) -> "PureState2Q":
        return cls(np.kron(first.vector, second.vector))

    @property
    def c00(self) -> complex:
        return complex(self.vector[0])

    @property
    def c01(self) -> complex:
        return complex(self.vector[1])

    @property
    def c10(self) -> complex:
        return complex(self.vector[2])

    @property
    def c11(self) -> complex:
        return complex(self.vector[3])

    def isclose(self, other: "PureState2Q", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.vector, other.vector, atol=atol))


@dataclass(frozen=True, eq=False)
class JointState:
    """
    Qubit tensored with a d-dimensional ancilla.

    Amplitude of |q>|a> sits at index q * d + a.
    """
    vector: np.ndarray
    ancilla_dim: int

    def __post_init__(self):
        if self.ancilla_dim < 1:
            raise DimensionMismatch(f"ancilla dimension must be >= 1, got {self.ancilla_dim}")
        object.__setattr__(
            self, "vector", _frozen_vector(self.vector, 2 * self.ancilla_dim, "JointState")
        )

    @classmethod
    def from_trusted(cls, vector: np.ndarray, ancilla_dim: int) -> "JointState":
        """Skip validation; ``vector`` must be a unit complex128 array of length 2d"""
        return _trusted(cls, vector=vector, ancilla_dim=ancilla_dim)

    @property
    def d(self) -> int:
        return self.ancilla_dim

    def as_matrix(self) -> np.ndarray:
        """Amplitudes as a 2 x d matrix indexed [qubit, ancilla]"""
        return self.vector.reshape(2, self.ancilla_dim)

    def as_two_qubit(self) -> PureState2Q:
        if self.ancilla_dim != 2:
            raise DimensionMismatch("only a d=2 joint state is a two-qubit state")
        return PureState2Q(self.vector)

    def isclose(self, other: "JointState", atol: float = 1e-12) -> bool:
        return self.ancilla_dim == other.ancilla_dim and bool(
            np.allclose(self.vector, other.vector, atol=atol)
        )


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Valid density operator: Hermitian, unit trace, positive semidefinite"""
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got shape {matrix.shape}")
        if not np.allclose(matrix, matrix.conj().T, atol=DENSITY_TOLERANCE):
            raise QuantumStateError("density matrix is not Hermitian")
        trace = complex(np.trace(matrix))
        if abs(trace - 1.0) > DENSITY_TOLERANCE:
            raise QuantumStateError(f"density matrix trace is {trace!r}, expected 1")
        if np.min(np.linalg.eigvalsh(matrix)) < -DENSITY_TOLERANCE:
            raise QuantumStateError("density matrix has negative eigenvalues")
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_pure(cls, vector: ArrayLike) -> "DensityMatrix":
        ket = normalize(vector)
        return cls(np.outer(ket, ket.conj()))

    @classmethod
    def trivial(cls) -> "DensityMatrix":
        return cls(np.ones((1, 1), dtype=np.complex128))

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    def kron(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(np.kron(self.matrix, other.matrix))

    def isclose(self, other: "DensityMatrix", atol: float = 1e-10) -> bool:
        return self.d == other.d and bool(np.allclose(self.matrix, other.matrix, atol=atol))


def _check_orthonormal(vectors: np.ndarray, label: str) -> None:
    gram = vectors.conj() @ vectors.T
    if not np.allclose(gram, np.eye(vectors.shape[0]), atol=NORM_TOLERANCE):
        raise QuantumStateError(f"{label} vectors are not orthonormal")


@dataclass(frozen=True, eq=False)
class Basis1Q:
    """Orthonormal single-qubit measurement basis; row k is the ket |b_k>"""
    name: str
    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=np.complex128)
        if vectors.shape != (2, 2):
            raise DimensionMismatch(f"Basis1Q expects a 2x2 array, got {vectors.shape}")
        _check_orthonormal(vectors, f"basis {self.name}")
        vectors.flags.writeable = False
        object.__setattr__(self, "vectors", vectors)
        bras = vectors.conj()
        bras.flags.writeable = False
        object.__setattr__(self, "bras", bras)

    @classmethod
    def custom(cls, first: PureState1Q, second: PureState1Q, name: str = "custom") -> "Basis1Q":
        return cls(name, np.stack([first.vector, second.vector]))

    @classmethod
    def rotated(cls, theta: float, name: str = "") -> "Basis1Q":
        """Basis {cos t|0> + sin t|1>, -sin t|0> + cos t|1>}"""
        c, s = np.cos(theta), np.sin(theta)
        return cls(name or f"rotated({theta!r})", np.array([[c, s], [-s, c]]))

    def ket(self, k: int) -> PureState1Q:
        return PureState1Q.from_trusted(self.vectors[k])


@dataclass(frozen=True, eq=False)
class Basis2Q:
    """Orthonormal two-qubit measurement basis; row k is the ket |b_k>"""
    name: str
    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=np.complex128)
        if vectors.shape != (4, 4):
            raise DimensionMismatch(f"Basis2Q expects a 4x4 array, got {vectors.shape}")
        _check_orthonormal(vectors, f"basis {self.name}")
        vectors.flags.writeable = False
        object.__setattr__(self, "vectors", vectors)

    def ket(self, k: int) -> PureState2Q:
        return PureState2Q(self.vectors[k])


SQRT_HALF = 1.0 / np.sqrt(2.0)

KET_0 = PureState1Q.from_amplitudes(1.0, 0.0)
KET_1 = PureState1Q.from_amplitudes(0.0, 1.0)
KET_PLUS = PureState1Q.from_amplitudes(SQRT_HALF, SQRT_HALF)
KET_MINUS = PureState1Q.from_amplitudes(SQRT_HALF, -SQRT_HALF)

Z_BASIS = Basis1Q("Z", np.array([[1.0, 0.0], [0.0, 1.0]]))
X_BASIS = Basis1Q("X", np.array([[SQRT_HALF, SQRT_HALF], [SQRT_HALF, -SQRT_HALF]]))
BREIDBART_BASIS = Basis1Q.rotated(np.pi / 8, name="Breidbart")

# Bell order: phi+, phi-, psi+, psi-
BELL_BASIS = Basis2Q(
    "Bell",
    np.array([
        [SQRT_HALF, 0.0, 0.0, SQRT_HALF],
        [SQRT_HALF, 0.0, 0.0, -SQRT_HALF],
        [0.0, SQRT_HALF, SQRT_HALF, 0.0],
        [0.0, SQRT_HALF, -SQRT_HALF, 0.0],
    ]),
)
COMPUTATIONAL_2Q = Basis2Q("Computational2Q", np.eye(4))

PHI_PLUS = BELL_BASIS.ket(0)
PHI_MINUS = BELL_BASIS.ket(1)
PSI_PLUS = BELL_BASIS.ket(2)
PSI_MINUS = BELL_BASIS.ket(3)

COMPUTATIONAL_KETS = (KET_0, KET_1)
