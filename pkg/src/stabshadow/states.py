"""Benchmark state constructors.

GHZ states with either sign, the phase-noise GHZ ensemble, toric-code ground
states on an L x L periodic lattice (2L^2 qubits), and randomly rotated
3-qubit GHZ states with matching witness candidates.

Toric lattice indexing: horizontal edge (r, c) runs from vertex (r, c) to
(r, c+1 mod L) and has index r*L + c; vertical edge (r, c) runs from (r, c)
to (r+1 mod L, c) and has index L^2 + r*L + c.  Star operators act with X on
the four edges at a vertex, plaquettes with Z on the four edges of a face.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bits
from .dense import ghz3_dense, haar_unitary_2x2
from .pauli import PauliString
from .rng import RandomStream
from .shadow import DenseStatePrep, PureTableau, StateEnsemble
from .tableau import StabilizerTableau, validate_tableau


def ghz_tableau(n: int, sign: int = +1) -> StabilizerTableau:
    """(|0...0> + sign |1...1>)/sqrt(2): stabilizers sign*X^n, Z_k Z_{k+1}."""
    if n < 1:
        raise ValueError("qubit count must be positive")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    stabs = []
    xall = PauliString(n)
    for q in range(n):
        bits.set_bit(xall.x, q, 1)
    xall.phase = 0 if sign > 0 else 2
    stabs.append(xall)
    for k in range(1, n):
        p = PauliString(n)
        bits.set_bit(p.z, k - 1, 1)
        bits.set_bit(p.z, k, 1)
        stabs.append(p)
    dests = [PauliString.single(n, 0, "Z")]
    for k in range(1, n):
        p = PauliString(n)
        for q in range(k, n):
            bits.set_bit(p.x, q, 1)
        dests.append(p)
    return StabilizerTableau.from_rows(dests, stabs)


def noisy_ghz_ensemble(n: int, p: float) -> StateEnsemble:
    """rho_p = (1-p)|GHZ+><GHZ+| + p|GHZ-><GHZ-| (phase error with prob p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("error probability must be in [0, 1]")
    return StateEnsemble([(1.0 - p, ghz_tableau(n, +1)), (p, ghz_tableau(n, -1))])


@dataclass(frozen=True)
class ToricLattice:
    """Edge-qubit bookkeeping for the L x L periodic square lattice."""

    L: int

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("lattice size must be at least 2")

    @property
    def n(self) -> int:
        return 2 * self.L * self.L

    def h_edge(self, r: int, c: int) -> int:
        return (r % self.L) * self.L + (c % self.L)

    def v_edge(self, r: int, c: int) -> int:
        return self.L * self.L + (r % self.L) * self.L + (c % self.L)

    def star_qubits(self, r: int, c: int) -> list[int]:
        return [self.h_edge(r, c), self.h_edge(r, c - 1), self.v_edge(r, c), self.v_edge(r - 1, c)]

    def plaquette_qubits(self, r: int, c: int) -> list[int]:
        return [self.h_edge(r, c), self.h_edge(r + 1, c), self.v_edge(r, c), self.v_edge(r, c + 1)]

    def star(self, r: int, c: int) -> PauliString:
        p = PauliString(self.n)
        for q in self.star_qubits(r, c):
            bits.set_bit(p.x, q, 1)
        return p

    def plaquette(self, r: int, c: int) -> PauliString:
        p = PauliString(self.n)
        for q in self.plaquette_qubits(r, c):
            bits.set_bit(p.z, q, 1)
        return p

    def z_loop_horizontal(self) -> PauliString:
        """Z on every horizontal edge of row 0 (one logical-Z string)."""
        p = PauliString(self.n)
        for c in range(self.L):
            bits.set_bit(p.z, self.h_edge(0, c), 1)
        return p

    def z_loop_vertical(self) -> PauliString:
        """Z on every vertical edge of column 0 (the other logical-Z string)."""
        p = PauliString(self.n)
        for r in range(self.L):
            bits.set_bit(p.z, self.v_edge(r, 0), 1)
        return p


def toric_code_tableau(L: int) -> StabilizerTableau:
    """Toric-code ground state fixing the logical |00> sector.

    Stabilizer generators: all stars and plaquettes but one of each (their
    products over the lattice are identities) plus the two logical-Z loop
    strings.  Destabilizers are completed algebraically; any valid
    completion yields the same state.
    """
    lat = ToricLattice(L)
    stabs = []
    for r in range(L):
        for c in range(L):
            if (r, c) != (L - 1, L - 1):
                stabs.append(lat.star(r, c))
    for r in range(L):
        for c in range(L):
            if (r, c) != (L - 1, L - 1):
                stabs.append(lat.plaquette(r, c))
    stabs.append(lat.z_loop_horizontal())
    stabs.append(lat.z_loop_vertical())
    t = StabilizerTableau.from_stabilizers(stabs)
    if not validate_tableau(t):
        raise AssertionError("toric tableau failed validation")
    return t


@dataclass(frozen=True)
class WitnessSpec:
    """Witness parameters: threshold alpha and three 2x2 locals."""

    alpha: float
    locals: tuple

    def __post_init__(self):
        if self.alpha not in (0.5, 0.75):
            raise ValueError("alpha must be 0.5 (tripartite) or 0.75 (GHZ-type)")
        for v in self.locals:
            if v.shape != (2, 2) or np.max(np.abs(v @ v.conj().T - np.eye(2))) > 1e-12:
                raise ValueError("witness locals must be unitary to 1e-12")


def random_rotated_ghz3(rng: RandomStream) -> DenseStatePrep:
    """Haar-random local rotations applied to the 3-qubit GHZ state."""
    ua = haar_unitary_2x2(rng)
    ub = haar_unitary_2x2(rng)
    uc = haar_unitary_2x2(rng)
    op = np.kron(uc, np.kron(ub, ua))
    return DenseStatePrep(op @ ghz3_dense())


def random_witness(rng: RandomStream, alpha: float) -> WitnessSpec:
    """Random witness candidate alpha*I - V|GHZ><GHZ|V^dagger, V = VA x VB x VC."""
    va = haar_unitary_2x2(rng)
    vb = haar_unitary_2x2(rng)
    vc = haar_unitary_2x2(rng)
    return WitnessSpec(alpha=alpha, locals=(va, vb, vc))


# ---------------------------------------------------------------------------
# State-spec strings used by the CLI and the observable files.
# ---------------------------------------------------------------------------


def tableau_from_spec(spec: str) -> StabilizerTableau:
    """Resolve specs naming a pure stabilizer state: ghz:<n>, ghz-:<n>, toric:<L>."""
    kind, _, rest = spec.partition(":")
    if kind == "ghz":
        return ghz_tableau(int(rest), +1)
    if kind == "ghz-":
        return ghz_tableau(int(rest), -1)
    if kind == "toric":
        return toric_code_tableau(int(rest))
    raise ValueError(f"unknown stabilizer state spec {spec!r}")


def prep_from_spec(spec: str):
    """Resolve any state-preparation spec string.

    Supported: ghz:<n>, ghz-:<n>, noisy-ghz:<n>:<p>, toric:<L>,
    rotated-ghz3:<seed>.
    """
    kind, _, rest = spec.partition(":")
    if kind in ("ghz", "ghz-", "toric"):
        return PureTableau(tableau_from_spec(spec))
    if kind == "noisy-ghz":
        n_str, _, p_str = rest.partition(":")
        return noisy_ghz_ensemble(int(n_str), float(p_str))
    if kind == "rotated-ghz3":
        return random_rotated_ghz3(RandomStream(int(rest)))
    raise ValueError(f"unknown state spec {spec!r}")
