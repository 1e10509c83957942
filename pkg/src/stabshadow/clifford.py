"""Clifford group elements and uniform sampling.

An element is stored by its action on the Pauli generators,

    U X_j U+ = (-1)^{r_j} prod_i X_i^{alpha_ji} Z_i^{beta_ji}
    U Z_j U+ = (-1)^{s_j} prod_i X_i^{gamma_ji} Z_i^{delta_ji},

with the four n x n binary matrices bit-packed row-wise and the sign
vectors packed into words.  Uniform sampling follows Koenig & Smolin's
transvection construction for the symplectic part (O(n^2) random bits,
O(n^3/64) words of work) followed by independent uniform signs; uniformity
is over the Clifford group modulo global phase.
"""

from __future__ import annotations

import numpy as np

from . import bits
from ._kernels import _conjugate_rows, _sample_clifford_fill
from .bits import n_words
from .pauli import PauliString
from .rng import RandomStream


class CliffordElement:
    """Action of a Clifford unitary on the Pauli generators (mod phase)."""

    __slots__ = ("n", "W", "alpha", "beta", "gamma", "delta", "r", "s")

    def __init__(self, n, alpha, beta, gamma, delta, r, s):
        self.n = n
        self.W = n_words(n)
        self.alpha = np.ascontiguousarray(alpha, dtype=np.uint64)
        self.beta = np.ascontiguousarray(beta, dtype=np.uint64)
        self.gamma = np.ascontiguousarray(gamma, dtype=np.uint64)
        self.delta = np.ascontiguousarray(delta, dtype=np.uint64)
        self.r = np.ascontiguousarray(r, dtype=np.uint64)
        self.s = np.ascontiguousarray(s, dtype=np.uint64)
        shape = (n, self.W)
        if any(m.shape != shape for m in (self.alpha, self.beta, self.gamma, self.delta)):
            raise ValueError("generator image matrices have the wrong shape")
        if self.r.shape != (self.W,) or self.s.shape != (self.W,):
            raise ValueError("sign vectors have the wrong shape")

    @classmethod
    def identity(cls, n: int) -> "CliffordElement":
        W = n_words(n)
        alpha = np.zeros((n, W), dtype=np.uint64)
        delta = np.zeros((n, W), dtype=np.uint64)
        for j in range(n):
            bits.set_bit(alpha[j], j, 1)
            bits.set_bit(delta[j], j, 1)
        zero_m = np.zeros((n, W), dtype=np.uint64)
        zero_v = np.zeros(W, dtype=np.uint64)
        return cls(n, alpha, zero_m, zero_m.copy(), delta, zero_v, zero_v.copy())

    @classmethod
    def from_dense_bits(cls, n, alpha, beta, gamma, delta, r, s) -> "CliffordElement":
        """Build from 0/1 matrices and vectors (row j, column i indexing)."""
        W = n_words(n)
        packed = []
        for m in (alpha, beta, gamma, delta):
            m = np.asarray(m)
            out = np.zeros((n, W), dtype=np.uint64)
            for j in range(n):
                for i in range(n):
                    if m[j, i]:
                        bits.set_bit(out[j], i, 1)
            packed.append(out)
        rv = bits.from_bools(np.asarray(r).tolist() if not isinstance(r, np.ndarray) else r)
        sv = bits.from_bools(np.asarray(s).tolist() if not isinstance(s, np.ndarray) else s)
        rv = np.resize(rv, W) if rv.shape != (W,) else rv
        sv = np.resize(sv, W) if sv.shape != (W,) else sv
        return cls(n, *packed, rv, sv)

    def x_image(self, j: int) -> PauliString:
        """U X_j U+: the Hermitian string on support (alpha_j, beta_j), sign (-1)^r_j."""
        return PauliString(self.n, self.alpha[j], self.beta[j], 2 * bits.get_bit(self.r, j))

    def z_image(self, j: int) -> PauliString:
        """U Z_j U+: the Hermitian string on support (gamma_j, delta_j), sign (-1)^s_j."""
        return PauliString(self.n, self.gamma[j], self.delta[j], 2 * bits.get_bit(self.s, j))

    def is_symplectic(self) -> bool:
        """Commutation relations of the generator images match the originals."""
        n = self.n
        rows_x = np.concatenate([self.alpha, self.gamma], axis=0)
        rows_z = np.concatenate([self.beta, self.delta], axis=0)
        cx = np.bitwise_count(rows_x[:, None, :] & rows_z[None, :, :]).sum(axis=2)
        prod = (cx + cx.T) & 1
        expected = np.zeros((2 * n, 2 * n), dtype=np.int64)
        expected[:n, n:] = np.eye(n, dtype=np.int64)
        expected[n:, :n] = np.eye(n, dtype=np.int64)
        return np.array_equal(prod, expected)

    def copy(self) -> "CliffordElement":
        return CliffordElement(self.n, self.alpha.copy(), self.beta.copy(),
                               self.gamma.copy(), self.delta.copy(), self.r.copy(), self.s.copy())

    def __eq__(self, other):
        return (
            isinstance(other, CliffordElement)
            and self.n == other.n
            and np.array_equal(self.alpha, other.alpha)
            and np.array_equal(self.beta, other.beta)
            and np.array_equal(self.gamma, other.gamma)
            and np.array_equal(self.delta, other.delta)
            and np.array_equal(self.r, other.r)
            and np.array_equal(self.s, other.s)
        )

    def __repr__(self):
        return f"CliffordElement(n={self.n})"


def conjugate_pauli(c: CliffordElement, p: PauliString) -> PauliString:
    """U p U+ composed from the generator images with full phase tracking."""
    if c.n != p.n:
        raise ValueError(f"size mismatch: clifford n={c.n}, pauli n={p.n}")
    xs = p.x.reshape(1, -1)
    zs = p.z.reshape(1, -1)
    ph = np.array([p.phase], dtype=np.uint8)
    oxs = np.empty_like(xs)
    ozs = np.empty_like(zs)
    oph = np.empty_like(ph)
    _conjugate_rows(xs, zs, ph, c.n, c.W, c.alpha, c.beta, c.gamma, c.delta, c.r, c.s, oxs, ozs, oph)
    return PauliString(p.n, oxs[0], ozs[0], int(oph[0]))


def sample_clifford(n: int, rng: RandomStream) -> CliffordElement:
    """Uniformly random CliffordElement (modulo global phase)."""
    if n < 1:
        raise ValueError("qubit count must be positive")
    W = n_words(n)
    alpha = np.empty((n, W), dtype=np.uint64)
    beta = np.empty((n, W), dtype=np.uint64)
    gamma = np.empty((n, W), dtype=np.uint64)
    delta = np.empty((n, W), dtype=np.uint64)
    r = np.empty(W, dtype=np.uint64)
    s = np.empty(W, dtype=np.uint64)
    ctr = _sample_clifford_fill(alpha, beta, gamma, delta, r, s, n, W,
                                np.uint64(rng.seed), rng.counter)
    rng.counter = int(ctr)
    return CliffordElement(n, alpha, beta, gamma, delta, r, s)


def count_stabilizer_states(n: int) -> int:
    """|STAB(n)| = 2^n * prod_{j=1..n} (2^j + 1)."""
    if n < 1:
        raise ValueError("qubit count must be positive")
    out = 1 << n
    for j in range(1, n + 1):
        out *= (1 << j) + 1
    return out


def count_symplectic(n: int) -> int:
    """|Sp(2n, 2)| = prod_{j=1..n} 2^(2j-1) (2^(2j) - 1)."""
    out = 1
    for j in range(1, n + 1):
        out *= (1 << (2 * j - 1)) * ((1 << (2 * j)) - 1)
    return out
