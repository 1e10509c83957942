import numpy as np
import pytest

import stabshadow as ss
from stabshadow import (Bitstring, PauliString, RandomStream, ToricLattice,
                        basis_state_probability, ghz_tableau, measure_all_z,
                        noisy_ghz_ensemble, pauli_commutes, prep_from_spec,
                        random_rotated_ghz3, random_witness, tableau_from_spec,
                        tableau_to_dense, toric_code_tableau, validate_tableau)
from stabshadow.bits import get_bit, solve_gf2, n_words, set_bit


def test_ghz_single_qubit_is_plus():
    t = ghz_tableau(1, +1)
    assert t.stabilizer(0).to_label() == "+X"
    v = tableau_to_dense(t)
    assert np.allclose(v, np.array([1, 1]) / np.sqrt(2))


def test_ghz3_dense_vector():
    v = tableau_to_dense(ghz_tableau(3, +1))
    want = np.zeros(8)
    want[0] = want[7] = 1 / np.sqrt(2)
    assert np.allclose(v, want)
    vm = tableau_to_dense(ghz_tableau(3, -1))
    wantm = np.zeros(8)
    wantm[0], wantm[7] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    assert np.allclose(vm, wantm)


def test_ghz_plus_minus_orthogonal_via_probability_machinery():
    # |<ghz+|ghz->|^2 = sum_b <ghz+|b><b|ghz-> ... both supported on
    # {0^n, 1^n} with amplitudes fixed by basis_state_probability and the
    # opposite relative sign, so the overlap cancels exactly.
    for n in (2, 4, 9):
        plus, minus = ghz_tableau(n, +1), ghz_tableau(n, -1)
        b0, b1 = Bitstring.from01("0" * n), Bitstring.from01("1" * n)
        for t in (plus, minus):
            assert basis_state_probability(t, b0) == 0.5
            assert basis_state_probability(t, b1) == 0.5
        if n <= 6:
            assert abs(np.vdot(tableau_to_dense(plus), tableau_to_dense(minus))) < 1e-12


def test_ghz_validates():
    for n in (1, 2, 7, 80):
        assert validate_tableau(ghz_tableau(n, +1))
        assert validate_tableau(ghz_tableau(n, -1))
    with pytest.raises(ValueError):
        ghz_tableau(0)
    with pytest.raises(ValueError):
        ghz_tableau(3, 2)


def test_noisy_ghz_ensemble_weights():
    ens = noisy_ghz_ensemble(4, 0.3)
    [(p1, t1), (p2, t2)] = ens.members()
    assert (p1, p2) == (0.7, 0.3)
    # exact fidelity <psi+|rho_p|psi+> = 1 - p by orthogonality
    v1 = tableau_to_dense(t1)
    v2 = tableau_to_dense(t2)
    vp = tableau_to_dense(ghz_tableau(4, +1))
    fid = p1 * abs(np.vdot(vp, v1)) ** 2 + p2 * abs(np.vdot(vp, v2)) ** 2
    assert abs(fid - 0.7) < 1e-12
    with pytest.raises(ValueError):
        noisy_ghz_ensemble(4, 1.2)


def test_toric_lattice_indexing_bijective():
    for L in (2, 3, 5):
        lat = ToricLattice(L)
        seen = set()
        for r in range(L):
            for c in range(L):
                seen.add(lat.h_edge(r, c))
                seen.add(lat.v_edge(r, c))
        assert seen == set(range(2 * L * L))


def test_toric_stars_and_plaquettes_commute():
    lat = ToricLattice(3)
    ops = [lat.star(r, c) for r in range(3) for c in range(3)]
    ops += [lat.plaquette(r, c) for r in range(3) for c in range(3)]
    ops += [lat.z_loop_horizontal(), lat.z_loop_vertical()]
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            assert pauli_commutes(ops[i], ops[j])


def test_toric_l2_dense_uniform_closed_loop_superposition():
    t = toric_code_tableau(2)
    v = tableau_to_dense(t)
    lat = ToricLattice(2)
    # independent oracle: even parity on every plaquette and both loops
    good = []
    loops = [lat.z_loop_horizontal(), lat.z_loop_vertical()]
    for m in range(256):
        ok = True
        for r in range(2):
            for c in range(2):
                par = 0
                for q in lat.plaquette_qubits(r, c):
                    par ^= (m >> q) & 1
                ok = ok and par == 0
        for loop in loops:
            par = 0
            for q in range(8):
                if get_bit(loop.z, q):
                    par ^= (m >> q) & 1
            ok = ok and par == 0
        if ok:
            good.append(m)
    assert len(good) == 8
    support = np.flatnonzero(np.abs(v) > 1e-12)
    assert sorted(support.tolist()) == good
    assert np.allclose(v[support], 1 / np.sqrt(8))


def test_toric_outcomes_have_even_plaquette_parity():
    for L in (2, 3):
        t = toric_code_tableau(L)
        lat = ToricLattice(L)
        rng = RandomStream(L)
        for _ in range(50):
            b, _post = measure_all_z(t, rng)
            for r in range(L):
                for c in range(L):
                    par = 0
                    for q in lat.plaquette_qubits(r, c):
                        par ^= b[q]
                    assert par == 0


def test_toric_l9_builds_and_validates():
    t = toric_code_tableau(9)
    assert t.n == 162
    assert validate_tableau(t)
    with pytest.raises(ValueError):
        toric_code_tableau(1)


def _in_group_with_plus_sign(t, op):
    """op must be a GF(2) combination of stabilizer rows with sign +1."""
    n = t.n
    A = np.zeros((n, n_words(2 * n)), dtype=np.uint64)
    for j in range(n):
        s = t.stabilizer(j)
        for q in range(n):
            if get_bit(s.x, q):
                set_bit(A[j], q, 1)
            if get_bit(s.z, q):
                set_bit(A[j], n + q, 1)
    rhs = np.zeros(2 * n, dtype=np.uint8)
    for q in range(n):
        rhs[q] = get_bit(op.x, q)
        rhs[n + q] = get_bit(op.z, q)
    sol = solve_gf2(_transpose_rows(A, n), n, rhs[:, None])
    if sol is None:
        return False
    prod = PauliString.identity(n)
    for j in range(n):
        if get_bit(sol[0], j):
            prod = ss.pauli_multiply(prod, t.stabilizer(j))
    return prod == op


def _transpose_rows(A, n):
    """(n, 2n) bit matrix -> (2n, n) bit matrix."""
    out = np.zeros((2 * n, n_words(n)), dtype=np.uint64)
    for j in range(n):
        for col in range(2 * n):
            if get_bit(A[j], col):
                set_bit(out[col], j, 1)
    return out


def test_toric_group_contains_all_stars_and_plaquettes_with_plus_sign():
    for L in (2, 3):
        t = toric_code_tableau(L)
        lat = ToricLattice(L)
        for r in range(L):
            for c in range(L):
                assert _in_group_with_plus_sign(t, lat.star(r, c))
                assert _in_group_with_plus_sign(t, lat.plaquette(r, c))


def test_witness_spec_validation():
    eye = np.eye(2, dtype=complex)
    with pytest.raises(ValueError):
        ss.WitnessSpec(alpha=0.6, locals=(eye, eye, eye))
    w = random_witness(RandomStream(1), 0.75)
    assert w.alpha == 0.75
    for v in w.locals:
        assert np.max(np.abs(v @ v.conj().T - np.eye(2))) < 1e-12


def test_random_rotated_ghz3_is_normalized_and_entangled():
    prep = random_rotated_ghz3(RandomStream(7))
    v = prep.vector
    assert abs(np.linalg.norm(v) - 1) < 1e-10
    # reduced state of qubit 0 is maximally mixed for any local rotation
    rho = np.outer(v, v.conj()).reshape(2, 4, 2, 4)
    red = np.trace(rho, axis1=1, axis2=3)
    assert np.max(np.abs(red - np.eye(2) / 2)) < 1e-10


def test_state_spec_parsing():
    assert tableau_from_spec("ghz:4") == ghz_tableau(4, +1)
    assert tableau_from_spec("ghz-:4") == ghz_tableau(4, -1)
    assert tableau_from_spec("toric:2") == toric_code_tableau(2)
    ens = prep_from_spec("noisy-ghz:5:0.25")
    assert [p for p, _t in ens.members()] == [0.75, 0.25]
    prep = prep_from_spec("rotated-ghz3:99")
    prep2 = prep_from_spec("rotated-ghz3:99")
    assert np.array_equal(prep.vector, prep2.vector)
    with pytest.raises(ValueError):
        prep_from_spec("bogus:1")
