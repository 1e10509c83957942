import numpy as np
import pytest

import stabshadow as ss
from stabshadow import (CliffordElement, PauliString, RandomStream, StabilizerTableau,
                        apply_clifford, clifford_compose, clifford_inverse,
                        clifford_to_dense, conjugate_pauli, count_stabilizer_states,
                        count_symplectic, pauli_to_dense, sample_clifford,
                        tableau_to_dense)


def hadamard_element():
    return CliffordElement.from_dense_bits(
        1, [[0]], [[1]], [[1]], [[0]], [0], [0])


def test_identity_conjugation_fixes_everything():
    c = CliffordElement.identity(3)
    for label in ("+XIZ", "-YYX", "+ZZZ"):
        p = PauliString.from_label(label)
        assert conjugate_pauli(c, p) == p


def test_hadamard_swaps_x_and_z():
    h = hadamard_element()
    assert conjugate_pauli(h, PauliString.from_label("+X")).to_label() == "+Z"
    assert conjugate_pauli(h, PauliString.from_label("+Z")).to_label() == "+X"
    assert conjugate_pauli(h, PauliString.from_label("+Y")).to_label() == "-Y"


def test_conjugate_matches_dense_oracle():
    rng = RandomStream(11)
    nprng = np.random.default_rng(12)
    for _ in range(100):
        c = sample_clifford(2, rng)
        U = clifford_to_dense(c)
        p = PauliString(2)
        p.x[0] = np.uint64(int(nprng.integers(0, 4)))
        p.z[0] = np.uint64(int(nprng.integers(0, 4)))
        p.phase = int(nprng.integers(0, 4))
        got = pauli_to_dense(conjugate_pauli(c, p))
        want = U @ pauli_to_dense(p) @ U.conj().T
        assert np.max(np.abs(got - want)) < 1e-10


def test_conjugate_size_mismatch():
    with pytest.raises(ValueError):
        conjugate_pauli(CliffordElement.identity(2), PauliString.identity(3))


def test_apply_identity_clifford():
    t = ss.ghz_tableau(4)
    assert apply_clifford(t, CliffordElement.identity(4)) == t


def test_apply_hadamard_to_zero_gives_plus():
    t = apply_clifford(StabilizerTableau.zero_state(1), hadamard_element())
    assert t.stabilizer(0).to_label() == "+X"
    assert t.destabilizer(0).to_label() == "+Z"


def test_apply_clifford_matches_dense_oracle():
    rng = RandomStream(13)
    for _ in range(40):
        c = sample_clifford(3, rng)
        t = apply_clifford(StabilizerTableau.zero_state(3), c)
        got = tableau_to_dense(t)
        want = clifford_to_dense(c)[:, 0]
        assert abs(abs(np.vdot(got, want)) - 1) < 1e-10


def test_sampler_determinism():
    a = RandomStream(21)
    b = RandomStream(21)
    for _ in range(5):
        assert sample_clifford(5, a) == sample_clifford(5, b)
    assert a.counter == b.counter


def test_sampler_symplectic_postcondition():
    # spec property: the symplectic invariant holds for consecutive samples
    rng = RandomStream(22)
    for n in (1, 2, 7, 40):
        for _ in range(2500):
            assert sample_clifford(n, rng).is_symplectic()


def test_sample_clifford_rejects_zero_qubits():
    with pytest.raises(ValueError):
        sample_clifford(0, RandomStream(0))


def test_count_stabilizer_states_values():
    assert count_stabilizer_states(1) == 6
    assert count_stabilizer_states(2) == 60
    assert count_stabilizer_states(3) == 1080
    # formula 2^n prod (2^j + 1)
    assert count_stabilizer_states(5) == (2**5) * 3 * 5 * 9 * 17 * 33


def test_count_symplectic_values():
    assert count_symplectic(1) == 6
    assert count_symplectic(2) == 720


def test_inverse_and_compose():
    rng = RandomStream(23)
    for n in (1, 2, 5):
        for _ in range(10):
            c = sample_clifford(n, rng)
            inv = clifford_inverse(c)
            assert clifford_compose(c, inv) == CliffordElement.identity(n)
            assert clifford_compose(inv, c) == CliffordElement.identity(n)


def test_compose_matches_dense_up_to_phase():
    rng = RandomStream(24)
    for _ in range(50):
        c1 = sample_clifford(2, rng)
        c2 = sample_clifford(2, rng)
        U1, U2 = clifford_to_dense(c1), clifford_to_dense(c2)
        U12 = clifford_to_dense(clifford_compose(c2, c1))
        prod = U2 @ U1
        # equal up to a global phase
        k = np.argmax(np.abs(prod))
        ratio = U12.reshape(-1)[k] / prod.reshape(-1)[k]
        assert abs(abs(ratio) - 1) < 1e-10
        assert np.max(np.abs(U12 - ratio * prod)) < 1e-10
