"""Classical-shadow estimation via bit-packed stabilizer simulation.

Acquire compact classical snapshots of simulated n-qubit states by random
Clifford measurements, then predict many linear features (fidelities,
witnesses, observables) by median-of-means estimation, with exact
small-system oracles available for verification.
"""

from .bits import n_words
from .clifford import (CliffordElement, conjugate_pauli, count_stabilizer_states,
                       count_symplectic, sample_clifford)
from .dense import (apply_pauli_to_vector, clifford_compose, clifford_inverse,
                    clifford_to_dense, dense_apply_clifford, direct_witness_measurement,
                    enumerate_clifford_elements, enumerate_stabilizer_states,
                    exact_snapshot_moments, ghz3_dense, haar_unitary_2x2,
                    pauli_to_dense, rotated_basis_state, tableau_to_dense)
from .observables import (DenseHermitian, StabilizerFidelity, Witness, format_observables,
                          max_hs_norm_sq, parse_observables)
from .pauli import PauliString, pauli_commutes, pauli_multiply
from .rng import RandomStream, substream_seed
from .shadow import (ClassicalShadow, DenseStatePrep, PredictionPlan, PureTableau,
                     Snapshot, StateEnsemble, acquire_shadow, median_of_means,
                     median_of_means_predict, plan_samples, snapshot_estimate)
from .shadow_io import (ShadowFormatError, ShadowInvariantError, ShadowTruncatedError,
                        ShadowVersionError, read_shadow, read_shadow_file, write_shadow,
                        write_shadow_file)
from .states import (ToricLattice, WitnessSpec, ghz_tableau, noisy_ghz_ensemble,
                     prep_from_spec, random_rotated_ghz3, random_witness,
                     tableau_from_spec, toric_code_tableau)
from .tableau import (Bitstring, StabilizerTableau, apply_clifford,
                      basis_state_prob_exponent, basis_state_probability,
                      measure_all_z, validate_tableau)

__version__ = "0.1.0"

__all__ = [
    "Bitstring", "ClassicalShadow", "CliffordElement", "DenseHermitian",
    "DenseStatePrep", "PauliString", "PredictionPlan", "PureTableau", "RandomStream",
    "ShadowFormatError", "ShadowInvariantError", "ShadowTruncatedError",
    "ShadowVersionError", "Snapshot", "StabilizerFidelity", "StabilizerTableau",
    "StateEnsemble", "ToricLattice", "Witness", "WitnessSpec", "acquire_shadow",
    "apply_clifford", "apply_pauli_to_vector", "basis_state_prob_exponent",
    "basis_state_probability", "clifford_compose", "clifford_inverse",
    "clifford_to_dense", "conjugate_pauli", "count_stabilizer_states",
    "count_symplectic", "dense_apply_clifford", "direct_witness_measurement",
    "enumerate_clifford_elements", "enumerate_stabilizer_states",
    "exact_snapshot_moments", "format_observables", "ghz3_dense", "ghz_tableau",
    "haar_unitary_2x2", "max_hs_norm_sq", "measure_all_z", "median_of_means",
    "median_of_means_predict", "n_words", "noisy_ghz_ensemble", "parse_observables",
    "pauli_commutes", "pauli_multiply", "pauli_to_dense", "plan_samples",
    "prep_from_spec", "random_rotated_ghz3", "random_witness", "read_shadow",
    "read_shadow_file", "rotated_basis_state", "sample_clifford", "snapshot_estimate",
    "substream_seed", "tableau_from_spec", "tableau_to_dense", "toric_code_tableau",
    "validate_tableau", "write_shadow", "write_shadow_file",
]
