"""
Adversary Records

Per-round record of what the third party holds after the round: the raw outcome
of its final measurement, the ancillas set aside on earlier channels, and the
system it measured last. Density matrices are derived on first access.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Optional, Tuple

import numpy as np

from quantum.operations import classical_quantum_state, classical_state_2q, reduced_ancilla_state
from quantum.states import Basis1Q, Basis2Q, DensityMatrix, JointState


@dataclass(frozen=True, eq=False)
class AdversaryRecord:
    """
    tp_outcome: raw outcome index of TP's final measurement.
    stored_ancillas: (channel name, ancilla ket) set aside before the final channel.
    final_system: system TP measured last, before the measurement.
    final_basis / final_pair_basis: basis of that measurement (qubit or pair).
    last_ancilla: name under which the final ancilla is reported, if any.
    """
    tp_outcome: Optional[int] = None
    stored_ancillas: Tuple[Tuple[str, np.ndarray], ...] = ()
    final_system: Optional[JointState] = None
    final_basis: Optional[Basis1Q] = None
    final_pair_basis: Optional[Basis2Q] = None
    last_ancilla: Optional[str] = None

    @cached_property
    def ancilla_states(self) -> Dict[str, DensityMatrix]:
        """Reduced ancilla state per channel, or 'shared' for a persistent ancilla"""
        states = {name: DensityMatrix.from_pure(ket) for name, ket in self.stored_ancillas}
        if self.last_ancilla is not None and self.final_system is not None:
            states[self.last_ancilla] = reduced_ancilla_state(self.final_system)
        return states

    @cached_property
    def memory_state(self) -> DensityMatrix:
        """
        TP's complete side information: stored ancillas tensored with the
        outcome register and ancilla of the final measurement, averaged over
        that measurement's outcome.
        """
        if self.final_system is None:
            return DensityMatrix.trivial()
        if self.final_pair_basis is not None:
            memory = classical_state_2q(self.final_system.as_two_qubit(), self.final_pair_basis)
        else:
            memory = classical_quantum_state(self.final_system, self.final_basis)
        for _, ket in reversed(self.stored_ancillas):
            memory = DensityMatrix.from_pure(ket).kron(memory)
        return memory

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tp_outcome": self.tp_outcome,
            "ancilla_states": {
                name: [[[float(z.real), float(z.imag)] for z in row] for row in rho.matrix]
                for name, rho in sorted(self.ancilla_states.items())
            },
        }
