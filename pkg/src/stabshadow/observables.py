"""Linear features to predict from a shadow, plus their text-file format.

Three kinds are supported:

* ``StabilizerFidelity`` -- overlap with a pure stabilizer target; evaluated
  entirely inside the stabilizer formalism at any n.
* ``DenseHermitian`` -- an explicit Hermitian matrix, n <= 12.
* ``Witness`` -- alpha * I minus a locally rotated GHZ projector on 3 qubits.

The observable file is line oriented: blank lines and ``#`` comments are
ignored, every other line is ``<kind> <id> <fields...>``::

    fidelity  g4    state=ghz:4
    fidelity  bell  rows=+XX,+ZZ
    dense     oz    n=1 1 0 0 0 0 0 -1 0
    witness   w0    alpha=0.5 va=... vb=... vc=...

Dense matrices are row-major ``re im`` pairs; witness locals are the eight
``re im`` numbers of a 2x2 unitary in row-major order.
"""

from __future__ import annotations

import numpy as np

from . import dense as _dense
from .pauli import PauliString
from .tableau import StabilizerTableau


class StabilizerFidelity:
    """Fidelity with a pure stabilizer target |psi><psi|."""

    kind = "fidelity"

    def __init__(self, target: StabilizerTableau):
        self.target = target
        self.n = target.n

    def hs_norm_sq(self) -> float:
        return 1.0

    def trace(self) -> float:
        return 1.0


class DenseHermitian:
    """An arbitrary Hermitian observable given as a dense matrix (n <= 12)."""

    kind = "dense"

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=complex)
        D = matrix.shape[0]
        n = D.bit_length() - 1
        if matrix.ndim != 2 or matrix.shape != (D, D) or (1 << n) != D:
            raise ValueError("matrix must be square with power-of-two dimension")
        if n > _dense.DENSE_MAX_QUBITS:
            raise ValueError(f"dense observables support at most {_dense.DENSE_MAX_QUBITS} qubits")
        if np.max(np.abs(matrix - matrix.conj().T)) > 1e-12:
            raise ValueError("matrix is not Hermitian to 1e-12")
        self.matrix = matrix
        self.n = n

    def hs_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.matrix) ** 2))

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


class Witness:
    """alpha * I - V_A x V_B x V_C |GHZ><GHZ| V^dagger on 3 qubits."""

    kind = "witness"

    def __init__(self, alpha: float, locals_):
        self.alpha = float(alpha)
        locals_ = tuple(np.asarray(v, dtype=complex) for v in locals_)
        if len(locals_) != 3:
            raise ValueError("witness needs exactly three 2x2 locals")
        for v in locals_:
            if v.shape != (2, 2) or np.max(np.abs(v @ v.conj().T - np.eye(2))) > 1e-12:
                raise ValueError("witness locals must be 2x2 unitaries (to 1e-12)")
        self.locals = locals_
        self.n = 3

    def projector_state(self) -> np.ndarray:
        return _dense.witness_projector_state(self.locals)

    def to_matrix(self) -> np.ndarray:
        return _dense.witness_to_dense(self.alpha, self.locals)

    def hs_norm_sq(self) -> float:
        # tr((alpha I - P)^2) for a rank-1 projector P; kept numeric on purpose
        return float(np.sum(np.abs(self.to_matrix()) ** 2))

    def trace(self) -> float:
        return 8.0 * self.alpha - 1.0


Observable = StabilizerFidelity | DenseHermitian | Witness


def max_hs_norm_sq(observables) -> float:
    return max(o.hs_norm_sq() for o in observables)


# ---------------------------------------------------------------------------
# Text format.
# ---------------------------------------------------------------------------


def _parse_complex_list(tokens, count):
    vals = [float(t) for t in tokens]
    if len(vals) != 2 * count:
        raise ValueError(f"expected {2 * count} numbers, got {len(vals)}")
    arr = np.array(vals).reshape(count, 2)
    return arr[:, 0] + 1j * arr[:, 1]


def _parse_unitary(spec: str) -> np.ndarray:
    return _parse_complex_list(spec.split(","), 4).reshape(2, 2)


def parse_observables(text: str, state_resolver=None):
    """Parse the observable file format; returns a list of (id, Observable).

    `state_resolver` maps a state-library name like "ghz:4" to a
    StabilizerTableau (defaults to the state library).
    """
    if state_resolver is None:
        from .states import tableau_from_spec
        state_resolver = tableau_from_spec
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) < 3:
            raise ValueError(f"line {lineno}: expected '<kind> <id> <spec...>'")
        kind, oid = tokens[0], tokens[1]
        rest = tokens[2:]
        if kind == "fidelity":
            spec = rest[0]
            if spec.startswith("state="):
                target = state_resolver(spec[len("state="):])
            elif spec.startswith("rows="):
                rows = [PauliString.from_label(lbl) for lbl in spec[len("rows="):].split(",")]
                target = StabilizerTableau.from_stabilizers(rows)
            else:
                raise ValueError(f"line {lineno}: fidelity needs state= or rows=")
            out.append((oid, StabilizerFidelity(target)))
        elif kind == "dense":
            if not rest[0].startswith("n="):
                raise ValueError(f"line {lineno}: dense needs n=<qubits> first")
            n = int(rest[0][2:])
            D = 1 << n
            mat = _parse_complex_list(rest[1:], D * D).reshape(D, D)
            out.append((oid, DenseHermitian(mat)))
        elif kind == "witness":
            fields = dict(t.split("=", 1) for t in rest)
            alpha = float(fields["alpha"])
            locals_ = tuple(_parse_unitary(fields[k]) for k in ("va", "vb", "vc"))
            out.append((oid, Witness(alpha, locals_)))
        else:
            raise ValueError(f"line {lineno}: unknown observable kind {kind!r}")
    return out


def format_observables(named) -> str:
    """Inverse of :func:`parse_observables` (fidelities emitted as rows=...)."""
    lines = []
    for oid, obs in named:
        if isinstance(obs, StabilizerFidelity):
            rows = ",".join(obs.target.stabilizer(i).to_label() for i in range(obs.n))
            lines.append(f"fidelity {oid} rows={rows}")
        elif isinstance(obs, DenseHermitian):
            nums = []
            for v in obs.matrix.reshape(-1):
                nums.append(f"{v.real:.17g}")
                nums.append(f"{v.imag:.17g}")
            lines.append(f"dense {oid} n={obs.n} " + " ".join(nums))
        elif isinstance(obs, Witness):
            parts = [f"witness {oid} alpha={obs.alpha:.17g}"]
            for key, v in zip(("va", "vb", "vc"), obs.locals):
                nums = ",".join(f"{c.real:.17g},{c.imag:.17g}" for c in v.reshape(-1))
                parts.append(f"{key}={nums}")
            lines.append(" ".join(parts))
        else:
            raise TypeError(f"unknown observable type {type(obs)!r}")
    return "\n".join(lines) + "\n"
