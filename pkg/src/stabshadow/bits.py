"""Bit-packed GF(2) vectors: n bits stored LSB-first in uint64 words.

Bit ``i`` of a vector lives in word ``i >> 6`` at position ``i & 63``.
All row operations used by the simulator are word-wise XOR/AND plus
popcounts, which keeps tableau updates at O(n^2/64) words.
"""

from __future__ import annotations

import numpy as np

U64 = np.uint64
_ONE = np.uint64(1)


def n_words(nbits: int) -> int:
    return (nbits + 63) // 64


def zeros(nbits: int) -> np.ndarray:
    return np.zeros(n_words(nbits), dtype=np.uint64)


def get_bit(words: np.ndarray, i: int) -> int:
    return int((words[i >> 6] >> np.uint64(i & 63)) & _ONE)


def set_bit(words: np.ndarray, i: int, value: int) -> None:
    m = _ONE << np.uint64(i & 63)
    if value:
        words[i >> 6] |= m
    else:
        words[i >> 6] &= ~m


def flip_bit(words: np.ndarray, i: int) -> None:
    words[i >> 6] ^= _ONE << np.uint64(i & 63)


def from_bools(bools) -> np.ndarray:
    bools = np.asarray(bools, dtype=np.uint8)
    out = zeros(len(bools))
    for i, b in enumerate(bools):
        if b:
            set_bit(out, i, 1)
    return out


def to_bools(words: np.ndarray, nbits: int) -> np.ndarray:
    """Unpack the first `nbits` bits to a uint8 array."""
    as_bytes = words.view(np.uint8)
    bits = np.unpackbits(as_bytes, bitorder="little")
    return bits[:nbits]


def popcount(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum())


def parity_and(a: np.ndarray, b: np.ndarray) -> int:
    """Parity of the AND of two packed vectors: <a, b> over GF(2)."""
    return int(np.bitwise_count(a & b).sum()) & 1


def symplectic_parity(ax, az, bx, bz) -> int:
    """Symplectic inner product of packed Pauli supports (1 = anticommute)."""
    t = np.bitwise_count(ax & bz).sum() + np.bitwise_count(az & bx).sum()
    return int(t) & 1


def pack_rows_to_bitfield(rows: np.ndarray, nbits: int) -> bytes:
    """Concatenate rows of packed words into one dense little-endian bitfield.

    `rows` has shape (R, W); the result holds R*nbits bits, zero-padded to a
    byte boundary (used by the shadow file format).
    """
    as_bytes = np.ascontiguousarray(rows).view(np.uint8)
    bits = np.unpackbits(as_bytes.reshape(rows.shape[0], -1), axis=1, bitorder="little")
    bits = bits[:, :nbits].reshape(-1)
    return np.packbits(bits, bitorder="little").tobytes()


def unpack_bitfield_to_rows(buf: bytes, nrows: int, nbits: int) -> np.ndarray:
    """Inverse of :func:`pack_rows_to_bitfield`; returns shape (nrows, W)."""
    total = nrows * nbits
    bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8), bitorder="little")
    if bits.size < total:
        raise ValueError("bitfield shorter than expected")
    bits = bits[:total].reshape(nrows, nbits)
    W = n_words(nbits)
    padded = np.zeros((nrows, W * 64), dtype=np.uint8)
    padded[:, :nbits] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(np.uint64).reshape(nrows, W)


def rank_gf2(rows: np.ndarray, nbits: int) -> int:
    """Rank over GF(2) of packed rows (Gaussian elimination on words)."""
    work = rows.copy()
    R = work.shape[0]
    rank = 0
    for col in range(nbits):
        w, m = col >> 6, _ONE << np.uint64(col & 63)
        pivot = -1
        for r in range(rank, R):
            if work[r, w] & m:
                pivot = r
                break
        if pivot < 0:
            continue
        work[[rank, pivot]] = work[[pivot, rank]]
        hits = (work[:, w] & m).astype(bool)
        hits[rank] = False
        work[hits] ^= work[rank]
        rank += 1
        if rank == R:
            break
    return rank


def solve_gf2(rows: np.ndarray, nbits: int, rhs: np.ndarray) -> np.ndarray | None:
    """Solve A x = b over GF(2) for packed rows A (R x nbits) and bit rows rhs.

    `rhs` has shape (R, Q); returns packed solutions of shape (Q, W) with free
    variables set to zero, or None if inconsistent.
    """
    A = rows.copy()
    b = rhs.astype(np.uint8).copy()
    R, Q = b.shape
    pivots = []
    rank = 0
    for col in range(nbits):
        w, m = col >> 6, _ONE << np.uint64(col & 63)
        pivot = -1
        for r in range(rank, R):
            if A[r, w] & m:
                pivot = r
                break
        if pivot < 0:
            continue
        A[[rank, pivot]] = A[[pivot, rank]]
        b[[rank, pivot]] = b[[pivot, rank]]
        hits = (A[:, w] & m).astype(bool)
        hits[rank] = False
        A[hits] ^= A[rank]
        b[hits] ^= b[rank]
        pivots.append(col)
        rank += 1
        if rank == R:
            break
    if np.any(b[rank:]):
        return None
    W = n_words(nbits)
    out = np.zeros((Q, W), dtype=np.uint64)
    for q in range(Q):
        for r, col in enumerate(pivots):
            if b[r, q]:
                set_bit(out[q], col, 1)
    return out
