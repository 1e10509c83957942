"""Shadow file format: dense bit-packed records behind a fixed header.

Layout (all integers little-endian)::

    magic   4 bytes  "CSHD"
    version u32
    n       u32
    N       u64
    seed    u64
    N records, each:
        alpha, beta, gamma, delta   n*n bits each, row-major, LSB-first,
                                    zero-padded to a byte boundary
        r, s, b                     n bits each, zero-padded to a byte boundary

Per record that is 4*ceil(n^2/8) + 3*ceil(n/8) bytes, i.e. the O(n^2) bits a
stabilizer snapshot needs.  Reads distinguish a bad magic/version, a
truncated stream, and structurally invalid contents by exception type.
"""

from __future__ import annotations

import struct

import numpy as np

from .bits import n_words
from .shadow import FORMAT_VERSION, ClassicalShadow

MAGIC = b"CSHD"
_HEADER = struct.Struct("<4sIIQQ")
_CHUNK = 1024


class ShadowFormatError(Exception):
    """Base class for shadow (de)serialization failures."""


class ShadowVersionError(ShadowFormatError):
    """Magic bytes or format version do not match."""


class ShadowTruncatedError(ShadowFormatError):
    """The stream ended before the declared record count."""


class ShadowInvariantError(ShadowFormatError):
    """Structurally invalid contents (bad sizes, trailing data, bad fields)."""


def record_size(n: int) -> int:
    return 4 * ((n * n + 7) // 8) + 3 * ((n + 7) // 8)


def _pack_field(chunk: np.ndarray, nbits: int) -> np.ndarray:
    """(C, R, W) uint64 -> (C, ceil(R*nbits/8)) uint8, rows bit-concatenated."""
    C, R, _W = chunk.shape
    u8 = np.ascontiguousarray(chunk).view(np.uint8).reshape(C, R, -1)
    unpacked = np.unpackbits(u8, axis=2, bitorder="little")[:, :, :nbits]
    return np.packbits(unpacked.reshape(C, R * nbits), axis=1, bitorder="little")


def _unpack_field(buf: np.ndarray, R: int, nbits: int) -> np.ndarray:
    """(C, B) uint8 -> (C, R, W) uint64 (inverse of _pack_field)."""
    C = buf.shape[0]
    W = n_words(nbits)
    unpacked = np.unpackbits(buf, axis=1, bitorder="little")[:, : R * nbits]
    bits_ = unpacked.reshape(C, R, nbits)
    padded = np.zeros((C, R, W * 64), dtype=np.uint8)
    padded[:, :, :nbits] = bits_
    packed = np.packbits(padded.reshape(C, R * W * 64), axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(np.uint64).reshape(C, R, W)


def write_shadow(shadow: ClassicalShadow, sink) -> None:
    """Serialize to a binary file-like object."""
    n = shadow.n
    N = len(shadow)
    sink.write(_HEADER.pack(MAGIC, shadow.format_version, n, N, shadow.seed & (2**64 - 1)))
    for lo in range(0, N, _CHUNK):
        hi = min(lo + _CHUNK, N)
        parts = [
            _pack_field(shadow.alphas[lo:hi], n),
            _pack_field(shadow.betas[lo:hi], n),
            _pack_field(shadow.gammas[lo:hi], n),
            _pack_field(shadow.deltas[lo:hi], n),
            _pack_field(shadow.rs[lo:hi, None, :], n),
            _pack_field(shadow.ss[lo:hi, None, :], n),
            _pack_field(shadow.bs[lo:hi, None, :], n),
        ]
        sink.write(np.concatenate(parts, axis=1).tobytes())


def read_shadow(source) -> ClassicalShadow:
    """Deserialize from a binary file-like object; inverse of write_shadow."""
    head = source.read(_HEADER.size)
    if len(head) < _HEADER.size:
        raise ShadowTruncatedError("stream shorter than the fixed header")
    magic, version, n, N, seed = _HEADER.unpack(head)
    if magic != MAGIC or version != FORMAT_VERSION:
        raise ShadowVersionError(
            f"bad magic/version: magic={magic!r}, version={version} (expected {MAGIC!r} v{FORMAT_VERSION})")
    if n < 1:
        raise ShadowInvariantError(f"invalid qubit count {n}")
    rec = record_size(n)
    payload = source.read()
    if len(payload) < N * rec:
        raise ShadowTruncatedError(f"expected {N * rec} record bytes, got {len(payload)}")
    if len(payload) > N * rec:
        raise ShadowInvariantError(f"{len(payload) - N * rec} trailing bytes after {N} records")
    W = n_words(n)
    al = np.empty((N, n, W), dtype=np.uint64)
    be = np.empty((N, n, W), dtype=np.uint64)
    ga = np.empty((N, n, W), dtype=np.uint64)
    de = np.empty((N, n, W), dtype=np.uint64)
    rv = np.empty((N, W), dtype=np.uint64)
    sv = np.empty((N, W), dtype=np.uint64)
    bs = np.empty((N, W), dtype=np.uint64)
    if N:
        raw = np.frombuffer(payload, dtype=np.uint8).reshape(N, rec)
        bm = (n * n + 7) // 8
        bv = (n + 7) // 8
        offs = [0, bm, 2 * bm, 3 * bm, 4 * bm, 4 * bm + bv, 4 * bm + 2 * bv, rec]
        for lo in range(0, N, _CHUNK):
            hi = min(lo + _CHUNK, N)
            sl = raw[lo:hi]
            al[lo:hi] = _unpack_field(sl[:, offs[0]:offs[1]], n, n)
            be[lo:hi] = _unpack_field(sl[:, offs[1]:offs[2]], n, n)
            ga[lo:hi] = _unpack_field(sl[:, offs[2]:offs[3]], n, n)
            de[lo:hi] = _unpack_field(sl[:, offs[3]:offs[4]], n, n)
            rv[lo:hi] = _unpack_field(sl[:, offs[4]:offs[5]], 1, n)[:, 0, :]
            sv[lo:hi] = _unpack_field(sl[:, offs[5]:offs[6]], 1, n)[:, 0, :]
            bs[lo:hi] = _unpack_field(sl[:, offs[6]:offs[7]], 1, n)[:, 0, :]
    try:
        return ClassicalShadow(n, al, be, ga, de, rv, sv, bs, seed=seed, format_version=version)
    except ValueError as exc:
        raise ShadowInvariantError(str(exc)) from exc


def write_shadow_file(shadow: ClassicalShadow, path) -> None:
    with open(path, "wb") as fh:
        write_shadow(shadow, fh)


def read_shadow_file(path) -> ClassicalShadow:
    with open(path, "rb") as fh:
        return read_shadow(fh)
