"""Stabilizer tableaus: 2n generator rows with signs, bit-packed.

Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers (one sign bit each,
phase in {0, 2}).  Clifford application conjugates every row; Z-basis
measurement follows the standard tableau algorithm with the lowest-index
anticommuting stabilizer as pivot and a fair coin per random branch, so a
run is exactly reproducible from its seed.

Note on costs: the basis-state overlap here runs the forced measurement
walk, which is O(n^3 / 64) words in the worst case; the often-quoted
O(n^2)-flops figure for stabilizer overlaps refers to an amortised inner
product representation this module does not use.
"""

from __future__ import annotations

import numpy as np

from . import bits
from ._kernels import _conjugate_rows, _measure_walk
from .bits import n_words
from .pauli import PauliString, pauli_commutes, pauli_multiply
from .rng import RandomStream


class Bitstring:
    """A computational-basis outcome b in {0,1}^n (bit-packed)."""

    __slots__ = ("n", "words")

    def __init__(self, n: int, words: np.ndarray | None = None):
        if n < 1:
            raise ValueError("qubit count must be positive")
        self.n = n
        W = n_words(n)
        self.words = np.zeros(W, dtype=np.uint64) if words is None else np.asarray(words, dtype=np.uint64).copy()
        if self.words.shape != (W,):
            raise ValueError("word array has the wrong length")

    @classmethod
    def from01(cls, s: str) -> "Bitstring":
        b = cls(len(s))
        for i, c in enumerate(s):
            if c not in "01":
                raise ValueError(f"bad bitstring {s!r}")
            if c == "1":
                bits.set_bit(b.words, i, 1)
        return b

    @classmethod
    def zeros(cls, n: int) -> "Bitstring":
        return cls(n)

    def to01(self) -> str:
        return "".join("1" if bits.get_bit(self.words, i) else "0" for i in range(self.n))

    def __getitem__(self, i: int) -> int:
        return bits.get_bit(self.words, i)

    def __eq__(self, other):
        return isinstance(other, Bitstring) and self.n == other.n and np.array_equal(self.words, other.words)

    def __hash__(self):
        return hash((self.n, self.words.tobytes()))

    def __repr__(self):
        return f"Bitstring('{self.to01()}')"

    def to_index(self) -> int:
        """Integer with qubit j on bit j (usable as a dense amplitude index)."""
        v = 0
        for w in range(len(self.words) - 1, -1, -1):
            v = (v << 64) | int(self.words[w])
        return v


class StabilizerTableau:
    """Pure stabilizer state on n qubits."""

    __slots__ = ("n", "W", "xs", "zs", "phases")

    def __init__(self, n: int, xs: np.ndarray, zs: np.ndarray, phases: np.ndarray):
        self.n = n
        self.W = n_words(n)
        self.xs = np.ascontiguousarray(xs, dtype=np.uint64)
        self.zs = np.ascontiguousarray(zs, dtype=np.uint64)
        self.phases = np.ascontiguousarray(phases, dtype=np.uint8)
        if self.xs.shape != (2 * n, self.W) or self.zs.shape != (2 * n, self.W) or self.phases.shape != (2 * n,):
            raise ValueError("tableau arrays have the wrong shape")

    @classmethod
    def zero_state(cls, n: int) -> "StabilizerTableau":
        """|0...0>: destabilizers X_i, stabilizers Z_i."""
        if n < 1:
            raise ValueError("qubit count must be positive")
        W = n_words(n)
        xs = np.zeros((2 * n, W), dtype=np.uint64)
        zs = np.zeros((2 * n, W), dtype=np.uint64)
        for i in range(n):
            bits.set_bit(xs[i], i, 1)
            bits.set_bit(zs[n + i], i, 1)
        return cls(n, xs, zs, np.zeros(2 * n, dtype=np.uint8))

    @classmethod
    def from_rows(cls, destabilizers, stabilizers) -> "StabilizerTableau":
        n = len(stabilizers)
        if len(destabilizers) != n:
            raise ValueError("need n destabilizers and n stabilizers")
        W = n_words(n)
        xs = np.zeros((2 * n, W), dtype=np.uint64)
        zs = np.zeros((2 * n, W), dtype=np.uint64)
        ph = np.zeros(2 * n, dtype=np.uint8)
        for i, row in enumerate(list(destabilizers) + list(stabilizers)):
            if row.n != n:
                raise ValueError("row size mismatch")
            xs[i] = row.x
            zs[i] = row.z
            ph[i] = row.phase
        return cls(n, xs, zs, ph)

    @classmethod
    def from_stabilizers(cls, stabilizers) -> "StabilizerTableau":
        """Build a full tableau from n commuting independent stabilizer rows.

        Destabilizers are completed over GF(2): first solve for rows with the
        required pairings against the stabilizers, then symplectically
        orthogonalise them against each other.  Any valid completion fixes
        the same state.
        """
        stabs = [s.copy() for s in stabilizers]
        n = stabs[0].n
        if len(stabs) != n:
            raise ValueError(f"need exactly {n} stabilizer rows, got {len(stabs)}")
        for s in stabs:
            if s.n != n:
                raise ValueError("row size mismatch")
            if not s.is_hermitian:
                raise ValueError("stabilizer rows must be Hermitian (even phase)")
        for i in range(n):
            for j in range(i + 1, n):
                if not pauli_commutes(stabs[i], stabs[j]):
                    raise ValueError("stabilizer rows must pairwise commute")
        W = n_words(n)
        # functional row: <S_j, v> = S_j.z . v.x + S_j.x . v.z, columns (x | z)
        A = np.zeros((n, n_words(2 * n)), dtype=np.uint64)
        for j, s in enumerate(stabs):
            for i in range(n):
                if bits.get_bit(s.z, i):
                    bits.set_bit(A[j], i, 1)
                if bits.get_bit(s.x, i):
                    bits.set_bit(A[j], n + i, 1)
        if bits.rank_gf2(A, 2 * n) != n:
            raise ValueError("stabilizer rows are not independent")
        sol = bits.solve_gf2(A, 2 * n, np.eye(n, dtype=np.uint8))
        dest: list[PauliString] = []
        for i in range(n):
            c = PauliString(n)
            for q in range(n):
                if bits.get_bit(sol[i], q):
                    bits.set_bit(c.x, q, 1)
                if bits.get_bit(sol[i], n + q):
                    bits.set_bit(c.z, q, 1)
            c.phase = 0
            # restore mutual commutation with already-built destabilizers
            for j in range(i):
                if not pauli_commutes(c, dest[j]):
                    c = pauli_multiply(c, stabs[j])
            dest.append(c)
        t = cls.from_rows(dest, stabs)
        if not validate_tableau(t):
            raise ValueError("destabilizer completion failed")
        return t

    # -- views ---------------------------------------------------------------

    def row(self, i: int) -> PauliString:
        return PauliString(self.n, self.xs[i], self.zs[i], int(self.phases[i]))

    def destabilizer(self, i: int) -> PauliString:
        return self.row(i)

    def stabilizer(self, i: int) -> PauliString:
        return self.row(self.n + i)

    def stabilizers(self):
        return [self.row(self.n + i) for i in range(self.n)]

    def copy(self) -> "StabilizerTableau":
        return StabilizerTableau(self.n, self.xs.copy(), self.zs.copy(), self.phases.copy())

    def __eq__(self, other):
        return (
            isinstance(other, StabilizerTableau)
            and self.n == other.n
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.zs, other.zs)
            and np.array_equal(self.phases, other.phases)
        )

    def __repr__(self):
        rows = ", ".join(self.stabilizer(i).to_label() for i in range(min(self.n, 6)))
        more = ", ..." if self.n > 6 else ""
        return f"StabilizerTableau(n={self.n}, stabilizers=[{rows}{more}])"


def validate_tableau(t: StabilizerTableau) -> bool:
    """Check signs, commutation pairings and GF(2) full rank."""
    n, W = t.n, t.W
    if np.any(t.phases & 1):
        return False
    # pairwise symplectic products: rows (dest | stab) must reproduce the
    # standard form (dest_i anticommutes only with stab_i).
    cx = np.bitwise_count(t.xs[:, None, :] & t.zs[None, :, :]).sum(axis=2)
    cz = np.bitwise_count(t.zs[:, None, :] & t.xs[None, :, :]).sum(axis=2)
    prod = (cx + cz) & 1
    expected = np.zeros((2 * n, 2 * n), dtype=np.uint64)
    expected[:n, n:] = np.eye(n, dtype=np.uint64)
    expected[n:, :n] = np.eye(n, dtype=np.uint64)
    if not np.array_equal(prod, expected):
        return False
    rows = np.concatenate([t.xs, t.zs], axis=1)
    return bits.rank_gf2(rows, 2 * 64 * W) == 2 * n


def apply_clifford(t: StabilizerTableau, c) -> StabilizerTableau:
    """Conjugate every tableau row by the Clifford element."""
    if t.n != c.n:
        raise ValueError(f"size mismatch: tableau n={t.n}, clifford n={c.n}")
    oxs = np.empty_like(t.xs)
    ozs = np.empty_like(t.zs)
    oph = np.empty_like(t.phases)
    _conjugate_rows(t.xs, t.zs, t.phases, t.n, t.W,
                    c.alpha, c.beta, c.gamma, c.delta, c.r, c.s, oxs, ozs, oph)
    return StabilizerTableau(t.n, oxs, ozs, oph)


def measure_all_z(t: StabilizerTableau, rng: RandomStream) -> tuple[Bitstring, StabilizerTableau]:
    """Measure qubits 0..n-1 in the Z basis (Born sampling).

    Returns the outcome and the post-measurement tableau; `t` is not
    modified.  One fair coin is consumed per random branch.
    """
    post = t.copy()
    b = Bitstring.zeros(t.n)
    ctr, _nrand = _measure_walk(post.xs, post.zs, post.phases, t.n, t.W, 0,
                                b.words, np.uint64(rng.seed), rng.counter)
    rng.counter = int(ctr)
    return b, post


def basis_state_probability(t: StabilizerTableau, b: Bitstring) -> float:
    """|<b|psi>|**2, always exactly 0 or a power of 1/2."""
    k = basis_state_prob_exponent(t, b)
    return 0.0 if k < 0 else 2.0 ** (-k)


def basis_state_prob_exponent(t: StabilizerTableau, b: Bitstring) -> int:
    """Exponent k with |<b|psi>|**2 = 2**-k, or -1 when the overlap is 0."""
    if t.n != b.n:
        raise ValueError(f"size mismatch: tableau n={t.n}, bitstring n={b.n}")
    work = t.copy()
    _ctr, nrand = _measure_walk(work.xs, work.zs, work.phases, t.n, t.W, 1,
                                b.words, np.uint64(0), 0)
    return int(nrand)


def any_support_bitstring(t: StabilizerTableau) -> Bitstring:
    """Some b with <b|psi> != 0 (deterministic walk, 0 on random branches)."""
    work = t.copy()
    b = Bitstring.zeros(t.n)
    _measure_walk(work.xs, work.zs, work.phases, t.n, t.W, 2, b.words, np.uint64(0), 0)
    return b
