"""Toffoli-free qubitization: encodings, LCU gadgets, walk compilation and
an exact state-vector harness."""

from .circuit import (Circuit, ControlledPauliRotation, ControlledPauliString, Hadamard,
                      Measure, PauliRotation, PhaseGate, compose, depth,
                      lower_parity_controls, validate_toffoli_free)
from .compile import (CompiledBlock, Hamiltonian, Layout, compile_G, compile_S, compile_V,
                      compile_walk, normalize_hamiltonian)
from .encoding import (Encoding, binary_tree_encoding, make_encoding, unary_encoding,
                       validate_encoding)
from .gadget import (GadgetPlan, PairingSchedule, build_gadget, make_plan,
                     match_angles_antisymmetric, match_angles_symmetric,
                     pairing_schedule_doubling, pairing_schedule_tree, qubitization_betas)
from .harness import (DepthRow, EstimationResult, RecoveryResult, depth_report,
                      estimate_energy, recover_eigenstate)
from .pauli import PauliString, anticommutes, as_matrix, multiply
from .simulate import (StateVector, apply_circuit, circuit_unitary, exact_lcu_oracle,
                       measure_all_zero_probability, measure_qubit)

__version__ = "0.1.0"
