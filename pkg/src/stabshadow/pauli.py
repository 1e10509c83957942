"""n-qubit Pauli strings as bit-packed (x, z, phase) triples.

A ``PauliString`` represents ``i**phase * P_0 P_1 ... P_{n-1}`` where
``P_j`` is the Hermitian single-qubit Pauli selected by the bit pair
``(x_j, z_j)``: I=(0,0), X=(1,0), Z=(0,1), Y=(1,1).  With this convention a
string is Hermitian exactly when its phase is even.  Writing each factor in
X-before-Z operator order costs one power of i per Y, i.e.
``i**phase * prod_j X^{x_j} Z^{z_j}`` carries phase ``phase + |x & z|``;
under that reading ``X . Z = i**3 * (x=1, z=1)`` because XZ = -iY.
"""

from __future__ import annotations

import numpy as np

from . import bits
from .bits import n_words

_PHASE_LABEL = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_CHAR_XZ = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_XZ_CHAR = {v: k for k, v in _CHAR_XZ.items()}


class PauliString:
    """Bit-packed Pauli operator with phase tracked mod 4."""

    __slots__ = ("n", "x", "z", "phase")

    def __init__(self, n: int, x: np.ndarray | None = None, z: np.ndarray | None = None, phase: int = 0):
        if n < 1:
            raise ValueError("qubit count must be positive")
        self.n = n
        W = n_words(n)
        self.x = np.zeros(W, dtype=np.uint64) if x is None else np.asarray(x, dtype=np.uint64).copy()
        self.z = np.zeros(W, dtype=np.uint64) if z is None else np.asarray(z, dtype=np.uint64).copy()
        if self.x.shape != (W,) or self.z.shape != (W,):
            raise ValueError("x/z word arrays have the wrong length")
        self.phase = int(phase) & 3

    # -- construction ------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str, phase: int = 0) -> "PauliString":
        """Pauli `kind` in {X, Y, Z} acting on one qubit."""
        p = cls(n, phase=phase)
        xb, zb = _CHAR_XZ[kind]
        if xb:
            bits.set_bit(p.x, qubit, 1)
        if zb:
            bits.set_bit(p.z, qubit, 1)
        return p

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse labels like "+XIZ", "-YY", "+iXZ"; qubit 0 is the first letter."""
        s = label.strip()
        phase = 0
        for prefix, ph in (("+i", 1), ("-i", 3), ("+", 0), ("-", 2)):
            if s.startswith(prefix):
                phase = ph
                s = s[len(prefix):]
                break
        if not s or any(c not in _CHAR_XZ for c in s):
            raise ValueError(f"bad Pauli label: {label!r}")
        p = cls(len(s), phase=phase)
        for i, c in enumerate(s):
            xb, zb = _CHAR_XZ[c]
            if xb:
                bits.set_bit(p.x, i, 1)
            if zb:
                bits.set_bit(p.z, i, 1)
        return p

    # -- views -------------------------------------------------------------

    def to_label(self) -> str:
        chars = []
        for i in range(self.n):
            chars.append(_XZ_CHAR[(bits.get_bit(self.x, i), bits.get_bit(self.z, i))])
        return _PHASE_LABEL[self.phase] + "".join(chars)

    def __repr__(self):
        return f"PauliString({self.to_label()!r})"

    def copy(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, self.phase)

    def __eq__(self, other):
        return (
            isinstance(other, PauliString)
            and self.n == other.n
            and self.phase == other.phase
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self):
        return hash((self.n, self.phase, self.x.tobytes(), self.z.tobytes()))

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian strings."""
        if not self.is_hermitian:
            raise ValueError("sign undefined for non-Hermitian phase")
        return 1 if self.phase == 0 else -1

    def weight(self) -> int:
        return bits.popcount(self.x | self.z)

    def x_before_z_phase(self) -> int:
        """Phase when written as i**k * prod X^x Z^z (X before Z per qubit)."""
        return (self.phase + bits.popcount(self.x & self.z)) & 3


def pauli_multiply(p: PauliString, q: PauliString) -> PauliString:
    """Operator product p * q with the phase tracked mod 4."""
    if p.n != q.n:
        raise ValueError(f"size mismatch: {p.n} vs {q.n}")
    sa = bits.popcount(p.x & p.z)
    sf = bits.popcount(q.x & q.z)
    cz = bits.popcount(p.z & q.x)
    nx = p.x ^ q.x
    nz = p.z ^ q.z
    spq = bits.popcount(nx & nz)
    phase = (p.phase + q.phase + sa + sf + 2 * cz - spq) & 3
    out = PauliString(p.n, nx, nz, phase)
    return out


def pauli_commutes(p: PauliString, q: PauliString) -> bool:
    """True iff the symplectic inner product <p.x, q.z> + <p.z, q.x> vanishes."""
    if p.n != q.n:
        raise ValueError(f"size mismatch: {p.n} vs {q.n}")
    return bits.symplectic_parity(p.x, p.z, q.x, q.z) == 0
