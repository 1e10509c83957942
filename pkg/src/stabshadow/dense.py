"""Exact small-system reference computations.

Dense state vectors and operators up to 12 qubits, exhaustive enumeration of
Clifford elements (n <= 2) and stabilizer states (n <= 3), exact moments of
the single-snapshot estimator, and a shot-by-shot simulator for direct
witness measurement.  Everything here is deliberately simple and serves as
the independent oracle against which the bit-packed engine is verified.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from . import bits
from .clifford import CliffordElement, conjugate_pauli, count_stabilizer_states
from .pauli import PauliString
from .rng import RandomStream
from .tableau import Bitstring, StabilizerTableau, any_support_bitstring

_I_POW = np.array([1 + 0j, 1j, -1 + 0j, -1j])

DENSE_MAX_QUBITS = 12
CLIFFORD_DENSE_MAX_QUBITS = 6


def _check_dense_n(n: int, cap: int = DENSE_MAX_QUBITS):
    if n > cap:
        raise ValueError(f"dense path supports at most {cap} qubits, got {n}")


def _pauli_ints(p: PauliString) -> tuple[int, int, int]:
    """(x bits, z bits, X-before-Z phase) as plain integers (n <= 12)."""
    x = int(p.x[0])
    z = int(p.z[0])
    return x, z, p.x_before_z_phase()


def apply_pauli_to_vector(p: PauliString, vec: np.ndarray) -> np.ndarray:
    """p |vec> for a dense amplitude vector (qubit j on bit j of the index)."""
    n = p.n
    _check_dense_n(n)
    D = 1 << n
    if vec.shape != (D,):
        raise ValueError("vector dimension mismatch")
    x, z, ph = _pauli_ints(p)
    ms = np.arange(D)
    signs = 1.0 - 2.0 * (np.bitwise_count(ms & z) & 1)
    out = np.empty(D, dtype=complex)
    out[ms ^ x] = _I_POW[ph] * signs * vec
    return out


def pauli_to_dense(p: PauliString) -> np.ndarray:
    """Dense 2^n x 2^n matrix of the Pauli string."""
    n = p.n
    _check_dense_n(n)
    D = 1 << n
    x, z, ph = _pauli_ints(p)
    ms = np.arange(D)
    signs = 1.0 - 2.0 * (np.bitwise_count(ms & z) & 1)
    M = np.zeros((D, D), dtype=complex)
    M[ms ^ x, ms] = _I_POW[ph] * signs
    return M


def _fix_global_phase(vec: np.ndarray) -> np.ndarray:
    idx = np.flatnonzero(np.abs(vec) > 1e-9)
    if idx.size:
        a = vec[idx[0]]
        vec = vec * (np.conj(a) / abs(a))
    return vec


def tableau_to_dense(t: StabilizerTableau) -> np.ndarray:
    """The unit vector stabilized by all stabilizer rows, phase-fixed."""
    _check_dense_n(t.n)
    bstar = any_support_bitstring(t)
    D = 1 << t.n
    v = np.zeros(D, dtype=complex)
    v[bstar.to_index()] = 1.0
    for i in range(t.n):
        v = 0.5 * (v + apply_pauli_to_vector(t.stabilizer(i), v))
    nrm = np.linalg.norm(v)
    if nrm < 1e-12:
        raise ValueError("tableau does not stabilize any state (invalid rows)")
    return _fix_global_phase(v / nrm)


def stabilizers_to_dense(rows: list[PauliString]) -> np.ndarray:
    """Dense state fixed by an explicit list of n commuting signed Paulis."""
    n = rows[0].n
    _check_dense_n(n)
    D = 1 << n
    for t0 in range(D):
        v = np.zeros(D, dtype=complex)
        v[t0] = 1.0
        for s in rows:
            v = 0.5 * (v + apply_pauli_to_vector(s, v))
        nrm = np.linalg.norm(v)
        if nrm > 1e-9:
            return _fix_global_phase(v / nrm)
    raise ValueError("rows stabilize no state")


def clifford_to_dense(c: CliffordElement) -> np.ndarray:
    """A unitary realizing the element's generator images (up to phase).

    The column U|0...0> is the state stabilized by the Z images; column b is
    obtained by applying X images selected by b.  The conjugation residual is
    verified and an inconsistent element raises ValueError.
    """
    n = c.n
    _check_dense_n(n, CLIFFORD_DENSE_MAX_QUBITS)
    D = 1 << n
    u0 = stabilizers_to_dense([c.z_image(j) for j in range(n)])
    U = np.zeros((D, D), dtype=complex)
    U[:, 0] = u0
    for b in range(1, D):
        v = u0
        for j in range(n):
            if (b >> j) & 1:
                v = apply_pauli_to_vector(c.x_image(j), v)
        U[:, b] = v
    Ud = U.conj().T
    for j in range(n):
        Xj = pauli_to_dense(PauliString.single(n, j, "X"))
        Zj = pauli_to_dense(PauliString.single(n, j, "Z"))
        if np.max(np.abs(U @ Xj @ Ud - pauli_to_dense(c.x_image(j)))) > 1e-10:
            raise ValueError("inconsistent Clifford element (X image residual)")
        if np.max(np.abs(U @ Zj @ Ud - pauli_to_dense(c.z_image(j)))) > 1e-10:
            raise ValueError("inconsistent Clifford element (Z image residual)")
    return U


def clifford_inverse(c: CliffordElement) -> CliffordElement:
    """Element of U^dagger: symplectic part J Gamma^T J, signs by re-conjugation."""
    n = c.n
    W = c.W

    def _transpose(m: np.ndarray) -> np.ndarray:
        out = np.zeros((n, W), dtype=np.uint64)
        for j in range(n):
            for i in range(n):
                if bits.get_bit(m[j], i):
                    bits.set_bit(out[i], j, 1)
        return out

    alpha = _transpose(c.delta)
    beta = _transpose(c.beta)
    gamma = _transpose(c.gamma)
    delta = _transpose(c.alpha)
    r = np.zeros(W, dtype=np.uint64)
    s = np.zeros(W, dtype=np.uint64)
    inv = CliffordElement(n, alpha, beta, gamma, delta, r, s)
    for j in range(n):
        back = conjugate_pauli(c, inv.x_image(j))
        if back.phase == 2:
            bits.set_bit(inv.r, j, 1)
        back = conjugate_pauli(c, inv.z_image(j))
        if back.phase == 2:
            bits.set_bit(inv.s, j, 1)
    return inv


def clifford_compose(c2: CliffordElement, c1: CliffordElement) -> CliffordElement:
    """Element of U2 U1 (apply c1 first)."""
    if c1.n != c2.n:
        raise ValueError("size mismatch")
    n, W = c1.n, c1.W
    alpha = np.zeros((n, W), dtype=np.uint64)
    beta = np.zeros((n, W), dtype=np.uint64)
    gamma = np.zeros((n, W), dtype=np.uint64)
    delta = np.zeros((n, W), dtype=np.uint64)
    r = np.zeros(W, dtype=np.uint64)
    s = np.zeros(W, dtype=np.uint64)
    for j in range(n):
        img = conjugate_pauli(c2, c1.x_image(j))
        alpha[j] = img.x
        beta[j] = img.z
        if img.phase == 2:
            bits.set_bit(r, j, 1)
        img = conjugate_pauli(c2, c1.z_image(j))
        gamma[j] = img.x
        delta[j] = img.z
        if img.phase == 2:
            bits.set_bit(s, j, 1)
    return CliffordElement(n, alpha, beta, gamma, delta, r, s)


def rotated_basis_state(c: CliffordElement, b: Bitstring) -> np.ndarray:
    """U^dagger |b> as a dense vector (n <= 12, no 2^n x 2^n matrix built)."""
    n = c.n
    _check_dense_n(n)
    inv = clifford_inverse(c)
    stabs = []
    dests = []
    for a in range(n):
        s = inv.z_image(a)
        if bits.get_bit(b.words, a):
            s = s.copy()
            s.phase = (s.phase + 2) & 3
        stabs.append(s)
        dests.append(inv.x_image(a))
    t = StabilizerTableau.from_rows(dests, stabs)
    return tableau_to_dense(t)


def dense_apply_clifford(c: CliffordElement, vec: np.ndarray) -> np.ndarray:
    """U |vec> without materializing U beyond its action on basis states."""
    n = c.n
    _check_dense_n(n)
    D = 1 << n
    u0 = stabilizers_to_dense([c.z_image(j) for j in range(n)])
    out = np.zeros(D, dtype=complex)
    for b in range(D):
        amp = vec[b]
        if abs(amp) < 1e-16:
            continue
        v = u0
        for j in range(n):
            if (b >> j) & 1:
                v = apply_pauli_to_vector(c.x_image(j), v)
        out += amp * v
    return out


# ---------------------------------------------------------------------------
# Exhaustive enumerations.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def enumerate_symplectic(n: int) -> tuple:
    """All Gamma = [[alpha, beta], [gamma, delta]] over GF(2) (n <= 2)."""
    if n > 2:
        raise ValueError("symplectic enumeration supported for n <= 2 only")
    m = 2 * n
    count = 1 << (m * m)
    mats = np.unpackbits(
        np.arange(count, dtype=np.uint32).view(np.uint8).reshape(count, 4),
        axis=1, bitorder="little",
    )[:, : m * m].reshape(count, m, m)
    J = np.zeros((m, m), dtype=np.uint8)
    J[:n, n:] = np.eye(n, dtype=np.uint8)
    J[n:, :n] = np.eye(n, dtype=np.uint8)
    prod = np.einsum("kij,jl,kml->kim", mats, J, mats) & 1
    mask = np.all(prod == J, axis=(1, 2))
    return tuple(map(np.asarray, mats[mask]))


@lru_cache(maxsize=None)
def enumerate_clifford_elements(n: int) -> tuple:
    """All CliffordElements (Gamma, r, s) for n <= 2 (24 and 11520)."""
    if n > 2:
        raise ValueError("Clifford enumeration supported for n <= 2 only")
    els = []
    for g in enumerate_symplectic(n):
        alpha = g[:n, :n]
        beta = g[:n, n:]
        gamma = g[n:, :n]
        delta = g[n:, n:]
        for rbits in product((0, 1), repeat=n):
            for sbits in product((0, 1), repeat=n):
                els.append(CliffordElement.from_dense_bits(
                    n, alpha, beta, gamma, delta, np.array(rbits), np.array(sbits)))
    return tuple(els)


@lru_cache(maxsize=None)
def enumerate_clifford_unitaries(n: int) -> np.ndarray:
    """Dense unitaries of all enumerated elements, shape (G, 2^n, 2^n)."""
    els = enumerate_clifford_elements(n)
    D = 1 << n
    out = np.empty((len(els), D, D), dtype=complex)
    for k, c in enumerate(els):
        out[k] = clifford_to_dense(c)
    return out


def _symp_commutes_int(v: int, w: int, n: int) -> bool:
    vx, vz = v & ((1 << n) - 1), v >> n
    wx, wz = w & ((1 << n) - 1), w >> n
    return (bin(vx & wz).count("1") + bin(vz & wx).count("1")) % 2 == 0


def _span(basis: tuple[int, ...]) -> frozenset:
    out = {0}
    for b in basis:
        out |= {x ^ b for x in out}
    return frozenset(out)


def _rref_basis(vectors: frozenset) -> tuple[int, ...]:
    rows = sorted(v for v in vectors if v)
    basis = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    # reduce upward for a canonical set
    basis.sort(reverse=True)
    for i in range(len(basis)):
        for j in range(i):
            if basis[j] ^ basis[i] < basis[j]:
                basis[j] ^= basis[i]
    return tuple(sorted(basis))


@lru_cache(maxsize=None)
def _isotropic_subspaces(n: int) -> tuple:
    dim = 2 * n
    vec_count = 1 << dim
    found = set()
    nonzero = range(1, vec_count)

    def extend(basis: tuple[int, ...], start: int):
        if len(basis) == n:
            found.add(_rref_basis(_span(basis)))
            return
        span = _span(basis)
        for v in range(start, vec_count):
            if v in span:
                continue
            if all(_symp_commutes_int(v, b, n) for b in basis):
                extend(basis + (v,), v + 1)

    extend((), 1)
    return tuple(sorted(found))


@lru_cache(maxsize=None)
def enumerate_stabilizer_states(n: int) -> np.ndarray:
    """All distinct stabilizer states as dense rows, shape (|STAB|, 2^n)."""
    if n > 3:
        raise ValueError("stabilizer-state enumeration supported for n <= 3 only")
    D = 1 << n
    states = []
    for basis in _isotropic_subspaces(n):
        for signs in product((0, 2), repeat=n):
            rows = []
            for v, ph in zip(basis, signs):
                x = v & (D - 1)
                z = v >> n
                p = PauliString(n)
                for q in range(n):
                    if (x >> q) & 1:
                        bits.set_bit(p.x, q, 1)
                    if (z >> q) & 1:
                        bits.set_bit(p.z, q, 1)
                p.phase = ph
                rows.append(p)
            states.append(stabilizers_to_dense(rows))
    out = np.array(states)
    expected = count_stabilizer_states(n)
    if out.shape[0] != expected:
        raise AssertionError(f"enumerated {out.shape[0]} states, expected {expected}")
    return out


# ---------------------------------------------------------------------------
# Exact estimator moments and the direct-measurement baseline.
# ---------------------------------------------------------------------------


def exact_snapshot_moments(rho: np.ndarray, obs: np.ndarray) -> tuple[float, float]:
    """Exact (mean, variance) of the single-snapshot estimate of tr(obs rho).

    Enumerates every Clifford element and outcome with Born weights; n <= 2.
    """
    D = rho.shape[0]
    n = D.bit_length() - 1
    if 1 << n != D or rho.shape != (D, D) or obs.shape != (D, D):
        raise ValueError("rho/obs must be square with power-of-two dimension")
    if n > 2:
        raise ValueError("exact moments supported for n <= 2 only")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10 or np.max(np.abs(obs - obs.conj().T)) > 1e-10:
        raise ValueError("rho and obs must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-10 or np.min(np.linalg.eigvalsh(rho)) < -1e-10:
        raise ValueError("rho must be a density matrix")
    Us = enumerate_clifford_unitaries(n)
    # probs[g, b] = <b| U rho U+ |b>,  ovals[g, b] = <b| U obs U+ |b>
    Ur = np.einsum("gij,jk->gik", Us, rho)
    probs = np.einsum("gbj,gbj->gb", Ur, Us.conj()).real
    Uo = np.einsum("gij,jk->gik", Us, obs)
    ovals = np.einsum("gbj,gbj->gb", Uo, Us.conj()).real
    vals = (D + 1) * ovals - np.trace(obs).real
    weights = probs / Us.shape[0]
    mean = float(np.sum(weights * vals))
    second = float(np.sum(weights * vals**2))
    return mean, second - mean**2


def ghz3_dense() -> np.ndarray:
    v = np.zeros(8, dtype=complex)
    v[0] = v[7] = 1 / np.sqrt(2)
    return v


def witness_projector_state(locals_: tuple[np.ndarray, np.ndarray, np.ndarray]) -> np.ndarray:
    """(V_A x V_B x V_C)|GHZ3> with V_A on qubit 0 (index bit 0)."""
    VA, VB, VC = locals_
    op = np.kron(VC, np.kron(VB, VA))
    return op @ ghz3_dense()


def witness_to_dense(alpha: float, locals_) -> np.ndarray:
    w = witness_projector_state(locals_)
    return alpha * np.eye(8) - np.outer(w, w.conj())


def haar_unitary_2x2(rng: RandomStream) -> np.ndarray:
    """Haar-random 2x2 unitary: QR of a complex Gaussian with phase fixing."""
    u = rng.uniform(8)
    r1 = np.sqrt(-2.0 * np.log(1.0 - u[:4]))
    g = r1 * np.exp(2j * np.pi * u[4:])
    z = g.reshape(2, 2) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def direct_witness_measurement(state: np.ndarray, w, epsilon: float, rng: RandomStream,
                               min_shots: int = 8) -> tuple[float, int]:
    """Shot-based estimate of one witness value by measuring its projector.

    Simulates Bernoulli draws with success probability <psi|P|psi> and stops
    once the binomial standard-error estimate drops below `epsilon` (never
    before `min_shots`; sample size doubles between checks).  Returns
    (alpha - p_hat, shots used).
    """
    if state.shape != (8,):
        raise ValueError("direct witness measurement is defined for 3 qubits")
    wvec = witness_projector_state(w.locals)
    p = float(np.abs(np.vdot(wvec, state)) ** 2)
    p = min(max(p, 0.0), 1.0)
    m = 0
    ones = 0
    chunk = min_shots
    while True:
        draws = rng.uniform(chunk)
        ones += int(np.count_nonzero(draws < p))
        m += chunk
        phat = ones / m
        se = np.sqrt(phat * (1.0 - phat) / m)
        if m >= min_shots and se < epsilon:
            break
        chunk = m
    return w.alpha - phat, m
