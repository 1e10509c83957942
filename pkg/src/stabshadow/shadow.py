"""Shadow acquisition and median-of-means feature prediction.

A classical shadow is the stored list of (Clifford element, outcome) pairs
from repeated randomly rotated computational-basis measurements.  Snapshot
``i`` of a run with seed ``s`` always consumes random sub-stream ``(s, i)``:
results do not depend on execution order, and re-running with the same seed
reproduces the shadow bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log

import numpy as np

from ._kernels import _batch_acquire, _batch_estimate_fidelity
from .bits import n_words
from .clifford import CliffordElement, sample_clifford
from .dense import DENSE_MAX_QUBITS, dense_apply_clifford, rotated_basis_state
from .observables import DenseHermitian, StabilizerFidelity, Witness
from .rng import RandomStream
from .tableau import Bitstring, StabilizerTableau, apply_clifford, basis_state_probability
from . import dense as _dense

FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# State preparations.
# ---------------------------------------------------------------------------


class PureTableau:
    """Preparation that always emits one pure stabilizer state."""

    def __init__(self, tableau: StabilizerTableau):
        self.tableau = tableau
        self.n = tableau.n

    def members(self):
        return [(1.0, self.tableau)]


class StateEnsemble:
    """Mixture of pure stabilizer states: rho = sum_i p_i |psi_i><psi_i|."""

    def __init__(self, weighted_tableaus):
        items = [(float(p), t) for p, t in weighted_tableaus]
        if not items:
            raise ValueError("ensemble must not be empty")
        if any(p < 0 for p, _ in items):
            raise ValueError("ensemble probabilities must be nonnegative")
        total = sum(p for p, _ in items)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"ensemble probabilities sum to {total}, not 1")
        self.n = items[0][1].n
        if any(t.n != self.n for _, t in items):
            raise ValueError("ensemble members must share the qubit count")
        self.items = items

    def members(self):
        return self.items


class DenseStatePrep:
    """Preparation of an arbitrary pure state given as dense amplitudes."""

    def __init__(self, amplitudes: np.ndarray):
        v = np.asarray(amplitudes, dtype=complex)
        D = v.shape[0]
        n = D.bit_length() - 1
        if v.ndim != 1 or (1 << n) != D:
            raise ValueError("amplitude vector length must be a power of two")
        if n > DENSE_MAX_QUBITS:
            raise ValueError(f"dense preparations support at most {DENSE_MAX_QUBITS} qubits")
        if abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise ValueError("state vector must be normalized")
        self.vector = v
        self.n = n


StatePreparation = PureTableau | StateEnsemble | DenseStatePrep


# ---------------------------------------------------------------------------
# Shadows.
# ---------------------------------------------------------------------------


class Snapshot:
    """One (Clifford, outcome) pair; embodies the rotated basis state U+|b>."""

    __slots__ = ("clifford", "outcome")

    def __init__(self, clifford: CliffordElement, outcome: Bitstring):
        if clifford.n != outcome.n:
            raise ValueError("snapshot size mismatch")
        self.clifford = clifford
        self.outcome = outcome

    @property
    def n(self):
        return self.clifford.n


class ClassicalShadow:
    """Stacked storage of N snapshots plus the acquisition header."""

    def __init__(self, n, alphas, betas, gammas, deltas, rs, ss, bs,
                 seed: int, format_version: int = FORMAT_VERSION):
        W = n_words(n)
        self.n = n
        self.W = W
        N = alphas.shape[0]
        self.alphas = np.ascontiguousarray(alphas, dtype=np.uint64)
        self.betas = np.ascontiguousarray(betas, dtype=np.uint64)
        self.gammas = np.ascontiguousarray(gammas, dtype=np.uint64)
        self.deltas = np.ascontiguousarray(deltas, dtype=np.uint64)
        self.rs = np.ascontiguousarray(rs, dtype=np.uint64)
        self.ss = np.ascontiguousarray(ss, dtype=np.uint64)
        self.bs = np.ascontiguousarray(bs, dtype=np.uint64)
        for m in (self.alphas, self.betas, self.gammas, self.deltas):
            if m.shape != (N, n, W):
                raise ValueError("snapshot matrix arrays have the wrong shape")
        for v in (self.rs, self.ss, self.bs):
            if v.shape != (N, W):
                raise ValueError("snapshot vector arrays have the wrong shape")
        self.seed = int(seed)
        self.format_version = int(format_version)

    @classmethod
    def empty(cls, n: int, seed: int = 0) -> "ClassicalShadow":
        W = n_words(n)
        z3 = np.zeros((0, n, W), dtype=np.uint64)
        z2 = np.zeros((0, W), dtype=np.uint64)
        return cls(n, z3, z3.copy(), z3.copy(), z3.copy(), z2, z2.copy(), z2.copy(), seed)

    @classmethod
    def from_snapshots(cls, snapshots, seed: int = 0) -> "ClassicalShadow":
        snaps = list(snapshots)
        if not snaps:
            raise ValueError("use ClassicalShadow.empty for zero snapshots")
        n = snaps[0].n
        W = n_words(n)
        N = len(snaps)
        out = cls(n, *(np.zeros((N, n, W), dtype=np.uint64) for _ in range(4)),
                  *(np.zeros((N, W), dtype=np.uint64) for _ in range(3)), seed)
        for i, s in enumerate(snaps):
            if s.n != n:
                raise ValueError("snapshots must share the qubit count")
            out.alphas[i] = s.clifford.alpha
            out.betas[i] = s.clifford.beta
            out.gammas[i] = s.clifford.gamma
            out.deltas[i] = s.clifford.delta
            out.rs[i] = s.clifford.r
            out.ss[i] = s.clifford.s
            out.bs[i] = s.outcome.words
        return out

    def __len__(self):
        return self.alphas.shape[0]

    def snapshot(self, i: int) -> Snapshot:
        c = CliffordElement(self.n, self.alphas[i], self.betas[i], self.gammas[i],
                            self.deltas[i], self.rs[i], self.ss[i])
        return Snapshot(c, Bitstring(self.n, self.bs[i]))

    def __iter__(self):
        return (self.snapshot(i) for i in range(len(self)))

    def __eq__(self, other):
        return (
            isinstance(other, ClassicalShadow)
            and self.n == other.n
            and self.seed == other.seed
            and self.format_version == other.format_version
            and all(np.array_equal(getattr(self, f), getattr(other, f))
                    for f in ("alphas", "betas", "gammas", "deltas", "rs", "ss", "bs"))
        )


def _ensemble_arrays(prep):
    members = prep.members()
    S = len(members)
    n = prep.n
    W = n_words(n)
    xs = np.empty((S, 2 * n, W), dtype=np.uint64)
    zs = np.empty((S, 2 * n, W), dtype=np.uint64)
    ph = np.empty((S, 2 * n), dtype=np.uint8)
    probs = np.array([p for p, _ in members], dtype=np.float64)
    for k, (_p, t) in enumerate(members):
        xs[k] = t.xs
        zs[k] = t.zs
        ph[k] = t.phases
    return xs, zs, ph, np.cumsum(probs)


def acquire_shadow(prep, N: int, rng: RandomStream) -> ClassicalShadow:
    """Acquire N snapshots: per repetition draw a fresh state, sample a
    uniform Clifford, rotate, and measure in the computational basis.

    Snapshot i uses random sub-stream (rng.seed, i); within a snapshot the
    draw order is: ensemble index (ensembles only), Clifford sample, one
    coin per random measurement branch (dense path: one outcome draw).
    """
    if N < 0:
        raise ValueError("snapshot count must be nonnegative")
    n = prep.n
    W = n_words(n)
    if N == 0:
        return ClassicalShadow.empty(n, seed=rng.seed)
    al = np.empty((N, n, W), dtype=np.uint64)
    be = np.empty((N, n, W), dtype=np.uint64)
    ga = np.empty((N, n, W), dtype=np.uint64)
    de = np.empty((N, n, W), dtype=np.uint64)
    rv = np.empty((N, W), dtype=np.uint64)
    sv = np.empty((N, W), dtype=np.uint64)
    bs = np.zeros((N, W), dtype=np.uint64)
    if isinstance(prep, DenseStatePrep):
        for i in range(N):
            sub = rng.substream(i)
            c = sample_clifford(n, sub)
            w = dense_apply_clifford(c, prep.vector)
            probs = np.abs(w) ** 2
            u = sub.uniform() * probs.sum()
            b_idx = int(np.searchsorted(np.cumsum(probs), u, side="right"))
            b_idx = min(b_idx, (1 << n) - 1)
            al[i], be[i], ga[i], de[i] = c.alpha, c.beta, c.gamma, c.delta
            rv[i], sv[i] = c.r, c.s
            for q in range(n):
                if (b_idx >> q) & 1:
                    bs[i, q >> 6] |= np.uint64(1) << np.uint64(q & 63)
    else:
        xs, zs, ph, cum = _ensemble_arrays(prep)
        _batch_acquire(xs, zs, ph, cum, n, W, N, np.uint64(rng.seed), 0,
                       al, be, ga, de, rv, sv, bs)
    return ClassicalShadow(n, al, be, ga, de, rv, sv, bs, seed=rng.seed)


# ---------------------------------------------------------------------------
# Estimation.
# ---------------------------------------------------------------------------


def snapshot_estimate(snapshot: Snapshot, obs) -> float:
    """tr(O rho_hat) for the linear-inversion single-snapshot estimate
    rho_hat = (2^n + 1) U+|b><b|U - I."""
    n = snapshot.n
    if obs.n != n:
        raise ValueError(f"dimension mismatch: snapshot n={n}, observable n={obs.n}")
    dim1 = 2.0**n + 1.0
    if isinstance(obs, StabilizerFidelity):
        rotated = apply_clifford(obs.target, snapshot.clifford)
        p = basis_state_probability(rotated, snapshot.outcome)
        return dim1 * p - 1.0
    phi = rotated_basis_state(snapshot.clifford, snapshot.outcome)
    if isinstance(obs, Witness):
        overlap = abs(np.vdot(obs.projector_state(), phi)) ** 2
        return obs.alpha + 1.0 - dim1 * overlap
    if isinstance(obs, DenseHermitian):
        val = np.vdot(phi, obs.matrix @ phi).real
        return dim1 * val - obs.trace()
    raise TypeError(f"unsupported observable {type(obs)!r}")


def _estimates_array(shadow: ClassicalShadow, obs, limit: int) -> np.ndarray:
    """Per-snapshot estimates for the first `limit` snapshots (vectorised)."""
    n = shadow.n
    dim1 = 2.0**n + 1.0
    if isinstance(obs, StabilizerFidelity):
        out = np.empty(limit, dtype=np.float64)
        t = obs.target
        _batch_estimate_fidelity(shadow.alphas[:limit], shadow.betas[:limit],
                                 shadow.gammas[:limit], shadow.deltas[:limit],
                                 shadow.rs[:limit], shadow.ss[:limit], shadow.bs[:limit],
                                 t.xs, t.zs, t.phases, n, shadow.W, out)
        return out
    out = np.empty(limit, dtype=np.float64)
    if isinstance(obs, Witness):
        wvec = obs.projector_state()
        for i in range(limit):
            s = shadow.snapshot(i)
            phi = rotated_basis_state(s.clifford, s.outcome)
            out[i] = obs.alpha + 1.0 - dim1 * abs(np.vdot(wvec, phi)) ** 2
        return out
    tr = obs.trace()
    for i in range(limit):
        s = shadow.snapshot(i)
        phi = rotated_basis_state(s.clifford, s.outcome)
        out[i] = dim1 * np.vdot(phi, obs.matrix @ phi).real - tr
    return out


def median_of_means(estimates: np.ndarray, K: int) -> float:
    """Median of K batch means over the leading K*floor(N/K) entries."""
    N = estimates.shape[0]
    if not 1 <= K <= N:
        raise ValueError(f"batch count K={K} must satisfy 1 <= K <= N={N}")
    m = N // K
    means = estimates[: K * m].reshape(K, m).mean(axis=1)
    return float(np.median(means))


def median_of_means_predict(shadow: ClassicalShadow, observables, K: int) -> list[float]:
    """Algorithm: split into K parts of floor(N/K) snapshots, average the
    snapshot estimates within each part, report the median across parts.

    Trailing snapshots beyond K*floor(N/K) are ignored; an even K takes the
    midpoint of the two central batch means.
    """
    observables = list(observables)
    if not observables:
        return []
    N = len(shadow)
    if not 1 <= K <= N:
        raise ValueError(f"batch count K={K} must satisfy 1 <= K <= N={N}")
    for obs in observables:
        if obs.n != shadow.n:
            raise ValueError("observable dimension does not match the shadow")
    m = N // K
    limit = K * m
    return [median_of_means(_estimates_array(shadow, obs, limit), K) for obs in observables]


@dataclass(frozen=True)
class PredictionPlan:
    """Sample-size plan: N snapshots in K batches for M features."""

    N: int
    K: int
    epsilon: float
    delta: float
    B: float
    M: int

    def __post_init__(self):
        if not self.N >= self.K >= 1:
            raise ValueError("plan must satisfy N >= K >= 1")


def plan_samples(M: int, B: float, epsilon: float, delta: float) -> PredictionPlan:
    """N = ceil(204 ln(2M/delta) B / eps^2) rounded up to a multiple of
    K = ceil(2 ln(2M/delta)); natural logarithms throughout."""
    if M < 1:
        raise ValueError("feature count M must be at least 1")
    if B <= 0:
        raise ValueError("Hilbert-Schmidt bound B must be positive")
    if not 0 < epsilon <= 1:
        raise ValueError("accuracy epsilon must be in (0, 1]")
    if not 0 < delta < 1:
        raise ValueError("failure probability delta must be in (0, 1)")
    L = log(2.0 * M / delta)
    K = max(1, ceil(2.0 * L))
    N0 = max(K, ceil(204.0 * L * B / epsilon**2))
    N = ((N0 + K - 1) // K) * K
    return PredictionPlan(N=N, K=K, epsilon=epsilon, delta=delta, B=B, M=M)
