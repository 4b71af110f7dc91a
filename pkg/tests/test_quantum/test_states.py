"""
Tests for the quantum state value types
"""

import numpy as np
import pytest

from quantum.operations import born_probabilities
from quantum.states import (
    BELL_BASIS,
    BREIDBART_BASIS,
    KET_0,
    KET_MINUS,
    KET_PLUS,
    X_BASIS,
    Basis1Q,
    DensityMatrix,
    DimensionMismatch,
    JointState,
    NotNormalized,
    PureState1Q,
    PureState2Q,
    QuantumStateError,
    SQRT_HALF,
)


class TestPureStates:
    """Validation of pure state vectors"""

    def test_amplitudes(self):
        """Amplitude accessors return the stored coefficients"""
        assert KET_PLUS.a0 == pytest.approx(1 / np.sqrt(2))
        assert KET_MINUS.a1 == pytest.approx(-1 / np.sqrt(2))

    def test_rejects_unnormalized(self):
        """Norm must be 1 within 1e-12"""
        with pytest.raises(NotNormalized):
            PureState1Q.from_amplitudes(1.0, 1.0)

    def test_rejects_non_finite(self):
        """NaN amplitudes are rejected"""
        with pytest.raises(QuantumStateError):
            PureState1Q(np.array([np.nan, 0.0]))

    def test_rejects_wrong_length(self):
        """A single-qubit state has two amplitudes"""
        with pytest.raises(DimensionMismatch):
            PureState1Q(np.array([1.0, 0.0, 0.0]))

    def test_vector_is_read_only(self):
        """Stored vectors cannot be mutated"""
        with pytest.raises(ValueError):
            KET_0.vector[0] = 0.0

    def test_global_phase(self):
        """Multiplying by a phase keeps the state valid"""
        flipped = KET_MINUS * -1
        assert flipped.a0 == pytest.approx(-1 / np.sqrt(2))
        assert flipped.isclose(PureState1Q.from_amplitudes(-1 / np.sqrt(2), 1 / np.sqrt(2)))

    def test_product_state(self):
        """Product of |0> and |+> puts weight on |00> and |01>"""
        state = PureState2Q.product(KET_0, KET_PLUS)
        assert state.c00 == pytest.approx(1 / np.sqrt(2))
        assert state.c01 == pytest.approx(1 / np.sqrt(2))
        assert state.c10 == 0
        assert state.c11 == 0


class TestJointState:
    """Qubit-ancilla layout"""

    def test_matrix_layout(self):
        """Index q * d + a maps to matrix entry [q, a]"""
        vector = np.zeros(6, dtype=complex)
        vector[1 * 3 + 2] = 1.0
        state = JointState(vector, 3)
        assert state.d == 3
        assert state.as_matrix()[1, 2] == 1.0

    def test_two_qubit_view_requires_qubit_ancilla(self):
        """Only d=2 joint states convert to two-qubit states"""
        state = JointState(np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 3)
        with pytest.raises(DimensionMismatch):
            state.as_two_qubit()

    def test_rejects_zero_dimension(self):
        """Ancilla dimension is at least 1"""
        with pytest.raises(DimensionMismatch):
            JointState(np.array([1.0, 0.0]), 0)

    def test_trusted_construction(self):
        """Trusted states carry the same layout and freeze the passed array"""
        vector = np.array([0.6, 0.0, 0.0, 0.8j])
        trusted = JointState.from_trusted(vector, 2)
        assert trusted.isclose(JointState(vector.copy(), 2))
        assert trusted.as_two_qubit().c11 == pytest.approx(0.8j)
        assert not vector.flags.writeable


class TestDensityMatrix:
    """Density matrix invariants"""

    def test_from_pure(self):
        """|+><+| has all entries 1/2"""
        rho = DensityMatrix.from_pure(KET_PLUS.vector)
        assert np.allclose(rho.matrix, 0.5)

    def test_rejects_non_hermitian(self):
        """Hermiticity is checked"""
        with pytest.raises(QuantumStateError):
            DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))

    def test_rejects_bad_trace(self):
        """Trace must be 1"""
        with pytest.raises(QuantumStateError):
            DensityMatrix(np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        """Positivity is checked"""
        with pytest.raises(QuantumStateError):
            DensityMatrix(np.array([[1.5, 0.0], [0.0, -0.5]]))

    def test_kron_dimension(self):
        """Tensor product multiplies dimensions"""
        rho = DensityMatrix.from_pure(KET_0.vector).kron(DensityMatrix(np.eye(3) / 3))
        assert rho.d == 6


class TestBases:
    """Measurement bases"""

    def test_breidbart_is_rotation_by_pi_over_8(self):
        """First Breidbart vector is cos(pi/8)|0> + sin(pi/8)|1>"""
        first = BREIDBART_BASIS.ket(0)
        assert first.a0 == pytest.approx(np.cos(np.pi / 8))
        assert first.a1 == pytest.approx(np.sin(np.pi / 8))

    def test_rotated_zero_is_z(self):
        """A zero rotation reproduces the computational basis"""
        assert np.allclose(Basis1Q.rotated(0.0).vectors, np.eye(2))

    def test_rotated_quarter_pi_is_x(self):
        """Rotation by pi/4 gives the diagonal basis up to the phase of each ket"""
        rotated = Basis1Q.rotated(np.pi / 4)
        overlaps = np.abs(np.sum(rotated.vectors.conj() * X_BASIS.vectors, axis=1))
        assert np.allclose(overlaps, [1.0, 1.0])
        # second ket is -|->
        assert np.allclose(rotated.vectors[1], -X_BASIS.vectors[1])

    def test_rotated_quarter_pi_measures_like_x(self):
        """Phase of a basis ket does not change Born probabilities"""
        rotated = Basis1Q.rotated(np.pi / 4)
        for state in (KET_0, KET_PLUS, KET_MINUS):
            assert born_probabilities(state, rotated) == pytest.approx(born_probabilities(state, X_BASIS))

    def test_bras_are_conjugated_rows(self):
        basis = Basis1Q.custom(PureState1Q.from_amplitudes(SQRT_HALF, 1j * SQRT_HALF),
                               PureState1Q.from_amplitudes(SQRT_HALF, -1j * SQRT_HALF))
        assert np.allclose(basis.bras, basis.vectors.conj())
        assert not basis.bras.flags.writeable

    def test_rejects_non_orthogonal(self):
        """Custom bases must be orthonormal"""
        with pytest.raises(QuantumStateError):
            Basis1Q.custom(KET_0, KET_PLUS)

    def test_bell_basis_order(self):
        """Bell rows are phi+, phi-, psi+, psi-"""
        assert np.allclose(BELL_BASIS.vectors[0], np.array([1, 0, 0, 1]) / np.sqrt(2))
        assert np.allclose(BELL_BASIS.vectors[3], np.array([0, 1, -1, 0]) / np.sqrt(2))
