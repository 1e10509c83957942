import numpy as np
import pytest

import stabshadow as ss
from stabshadow import (Bitstring, PauliString, RandomStream, StabilizerTableau,
                        apply_clifford, basis_state_prob_exponent, basis_state_probability,
                        ghz_tableau, measure_all_z, pauli_commutes, sample_clifford,
                        tableau_to_dense, validate_tableau)


def random_rotated_state(n, rng):
    return apply_clifford(StabilizerTableau.zero_state(n), sample_clifford(n, rng))


def test_zero_state_valid():
    for n in (1, 3, 65):
        assert validate_tableau(StabilizerTableau.zero_state(n))


def test_duplicated_stabilizer_row_invalid():
    t = StabilizerTableau.zero_state(3)
    t.xs[4] = t.xs[3]
    t.zs[4] = t.zs[3]
    t.phases[4] = t.phases[3]
    assert not validate_tableau(t)


def test_odd_phase_invalid():
    t = StabilizerTableau.zero_state(2)
    t.phases[2] = 1
    assert not validate_tableau(t)


def test_measure_zero_state_deterministic():
    rng = RandomStream(1)
    t = StabilizerTableau.zero_state(5)
    for _ in range(20):
        b, post = measure_all_z(t, rng)
        assert b.to01() == "00000"
        assert validate_tableau(post)


def test_measure_plus_states_uniform():
    # |+>^n: every outcome with frequency 2^-n
    n = 3
    plus = StabilizerTableau.from_stabilizers(
        [PauliString.single(n, q, "X") for q in range(n)])
    rng = RandomStream(2)
    counts = np.zeros(8, dtype=int)
    reps = 16000
    for _ in range(reps):
        b, _ = measure_all_z(plus, rng)
        counts[b.to_index()] += 1
    assert np.all(np.abs(counts / reps - 1 / 8) < 0.02)


def test_measure_ghz3_born_frequencies_match_dense():
    g = ghz_tableau(3)
    probs = np.abs(tableau_to_dense(g)) ** 2  # dense-oracle Born weights
    rng = RandomStream(3)
    counts = np.zeros(8, dtype=int)
    reps = 20000
    for _ in range(reps):
        b, _ = measure_all_z(g, rng)
        counts[b.to_index()] += 1
    assert counts[1:7].sum() == 0
    assert np.all(np.abs(counts / reps - probs) < 0.02)


def test_post_measurement_tableau_repeats_outcome():
    rng = RandomStream(4)
    t = random_rotated_state(4, rng)
    b, post = measure_all_z(t, rng)
    b2, _ = measure_all_z(post, rng)
    assert b == b2


def test_basis_state_probability_ghz():
    for n in (2, 5, 40):
        g = ghz_tableau(n)
        assert basis_state_probability(g, Bitstring.from01("0" * n)) == 0.5
        assert basis_state_probability(g, Bitstring.from01("0" * (n - 1) + "1")) == 0.0


def test_basis_state_probability_matches_dense():
    rng = RandomStream(5)
    for trial in range(200):
        n = 2 + trial % 5  # n in 2..6
        t = random_rotated_state(n, rng)
        v = tableau_to_dense(t)
        idx = rng.index_below(1 << n)
        b = Bitstring(n)
        b.words[0] = np.uint64(idx)
        assert abs(basis_state_probability(t, b) - abs(v[idx]) ** 2) < 1e-12


def test_basis_state_probability_sums_to_one():
    rng = RandomStream(6)
    for n in (1, 2, 3, 4):
        t = random_rotated_state(n, rng)
        total = sum(
            basis_state_probability(t, Bitstring(n, np.array([m], dtype=np.uint64)))
            for m in range(1 << n))
        assert abs(total - 1.0) < 1e-12


def test_basis_state_probability_dyadic():
    rng = RandomStream(7)
    for _ in range(100):
        t = random_rotated_state(5, rng)
        idx = rng.index_below(32)
        b = Bitstring(5, np.array([idx], dtype=np.uint64))
        k = basis_state_prob_exponent(t, b)
        p = basis_state_probability(t, b)
        if k < 0:
            assert p == 0.0
        else:
            assert 0 <= k <= 5
            assert p == 2.0 ** (-k)  # exact dyadic, no rounding


def test_size_mismatch_errors():
    t = StabilizerTableau.zero_state(3)
    with pytest.raises(ValueError):
        basis_state_probability(t, Bitstring.from01("01"))
    c = ss.CliffordElement.identity(2)
    with pytest.raises(ValueError):
        apply_clifford(t, c)


def test_metamorphic_validity_1000_steps():
    rng = RandomStream(8)
    t = StabilizerTableau.zero_state(4)
    for step in range(1000):
        t = apply_clifford(t, sample_clifford(4, rng))
        _b, t = measure_all_z(t, rng)
        if step % 100 == 0:
            assert validate_tableau(t)
    assert validate_tableau(t)


def test_conjugation_preserves_commutation_and_hermiticity():
    rng = RandomStream(9)
    nprng = np.random.default_rng(10)
    for _ in range(50):
        n = 4
        c = sample_clifford(n, rng)
        def rand_pauli():
            p = PauliString(n)
            p.x[0] = np.uint64(int(nprng.integers(0, 1 << n)))
            p.z[0] = np.uint64(int(nprng.integers(0, 1 << n)))
            p.phase = 2 * int(nprng.integers(0, 2))
            return p
        p, q = rand_pauli(), rand_pauli()
        cp, cq = ss.conjugate_pauli(c, p), ss.conjugate_pauli(c, q)
        assert cp.is_hermitian and cq.is_hermitian
        assert pauli_commutes(p, q) == pauli_commutes(cp, cq)


def test_from_stabilizers_ghz_matches_explicit():
    for n in (2, 4):
        built = StabilizerTableau.from_stabilizers(
            [ghz_tableau(n).stabilizer(i) for i in range(n)])
        assert validate_tableau(built)
        v1 = tableau_to_dense(built)
        v2 = tableau_to_dense(ghz_tableau(n))
        assert abs(abs(np.vdot(v1, v2)) - 1) < 1e-10


def test_from_stabilizers_rejects_bad_rows():
    with pytest.raises(ValueError):
        StabilizerTableau.from_stabilizers(
            [PauliString.from_label("+X"), PauliString.from_label("+Z")][:1] * 2)
    with pytest.raises(ValueError):  # anticommuting pair
        StabilizerTableau.from_stabilizers(
            [PauliString.from_label("+XI"), PauliString.from_label("+ZI")])
    with pytest.raises(ValueError):  # non-Hermitian sign
        p = PauliString.from_label("+iZ")
        StabilizerTableau.from_stabilizers([p])


def test_measurement_seed_replay():
    t0 = ghz_tableau(6)
    b1, _ = measure_all_z(t0, RandomStream(77))
    b2, _ = measure_all_z(t0, RandomStream(77))
    assert b1 == b2
