import numpy as np
import pytest

import stabshadow as ss
from stabshadow import (DenseHermitian, RandomStream, StabilizerFidelity, Witness,
                        format_observables, ghz3_dense, max_hs_norm_sq, parse_observables)


def test_fidelity_norm_and_trace():
    obs = StabilizerFidelity(ss.ghz_tableau(4))
    assert obs.hs_norm_sq() == 1.0
    assert obs.trace() == 1.0
    assert obs.n == 4


def test_dense_requires_hermitian():
    with pytest.raises(ValueError):
        DenseHermitian(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(ValueError):
        DenseHermitian(np.zeros((3, 3), dtype=complex))


def test_dense_norm_matches_trace_of_square():
    nprng = np.random.default_rng(0)
    A = nprng.normal(size=(8, 8)) + 1j * nprng.normal(size=(8, 8))
    H = (A + A.conj().T) / 2
    obs = DenseHermitian(H)
    assert abs(obs.hs_norm_sq() - np.trace(H @ H).real) < 1e-9
    assert abs(obs.trace() - np.trace(H).real) < 1e-12


def test_witness_values_computed_numerically():
    eye = np.eye(2, dtype=complex)
    for alpha in (0.5, 0.75):
        w = Witness(alpha, (eye, eye, eye))
        # trace is 8 alpha - 1; tr(O^2) = 8 alpha^2 - 2 alpha + 1 for a
        # rank-1 projector subtracted from alpha * I
        assert abs(w.trace() - (8 * alpha - 1)) < 1e-12
        assert abs(w.hs_norm_sq() - (8 * alpha**2 - 2 * alpha + 1)) < 1e-12
        M = w.to_matrix()
        assert np.max(np.abs(M - M.conj().T)) < 1e-12
        v = ghz3_dense()
        assert abs(np.vdot(v, M @ v).real - (alpha - 1.0)) < 1e-12


def test_witness_identity_values_on_basis_state():
    eye = np.eye(2, dtype=complex)
    w = Witness(0.5, (eye, eye, eye))
    e000 = np.zeros(8, dtype=complex)
    e000[0] = 1.0
    val = np.vdot(e000, w.to_matrix() @ e000).real
    assert abs(val - 0.0) < 1e-12  # 0.5 - |<000|GHZ>|^2 = 0.5 - 0.5


def test_witness_rejects_nonunitary():
    eye = np.eye(2, dtype=complex)
    with pytest.raises(ValueError):
        Witness(0.5, (eye, eye, 2 * eye))


def test_max_hs_norm_sq():
    eye = np.eye(2, dtype=complex)
    obs = [Witness(0.5, (eye, eye, eye)), Witness(0.75, (eye, eye, eye))]
    assert abs(max_hs_norm_sq(obs) - 4.0) < 1e-12


def test_parse_and_format_roundtrip():
    rng = RandomStream(3)
    spec = ss.random_witness(rng, 0.75)
    named = [
        ("g4", StabilizerFidelity(ss.ghz_tableau(4))),
        ("oz", DenseHermitian(np.diag([1.0, -1.0]).astype(complex))),
        ("w0", Witness(spec.alpha, spec.locals)),
    ]
    text = format_observables(named)
    back = parse_observables(text)
    assert [oid for oid, _ in back] == ["g4", "oz", "w0"]
    g = back[0][1]
    assert isinstance(g, StabilizerFidelity)
    v1 = ss.tableau_to_dense(g.target)
    v2 = ss.tableau_to_dense(ss.ghz_tableau(4))
    assert abs(abs(np.vdot(v1, v2)) - 1) < 1e-10
    assert np.allclose(back[1][1].matrix, named[1][1].matrix)
    assert np.allclose(back[2][1].to_matrix(), named[2][1].to_matrix())


def test_parse_state_reference_and_rows():
    text = """
    # comment
    fidelity a state=ghz:3
    fidelity b rows=+XX,+ZZ
    dense    c n=1 1 0 0 0 0 0 -1 0
    """
    named = parse_observables(text)
    assert len(named) == 3
    assert named[0][1].n == 3
    assert named[1][1].n == 2
    assert np.allclose(named[2][1].matrix, np.diag([1.0, -1.0]))


def test_parse_errors():
    with pytest.raises(ValueError):
        parse_observables("fidelity onlytwo")
    with pytest.raises(ValueError):
        parse_observables("mystery x state=ghz:2")
    with pytest.raises(ValueError):
        parse_observables("dense d n=1 1 0 0 0")  # wrong count
