"""Seeded experiment drivers emitting CSV.

Four experiments mirror the paper-style benchmarks at desk scale:

* ``ghz-scaling``  -- snapshots needed to certify a GHZ state at 0.99
  estimated fidelity, as a function of qubit count.
* ``ghz-noise``    -- estimated GHZ fidelity of the phase-noisy source
  against the true value 1 - p.
* ``toric``        -- toric-code ground-state fidelity at planned sample
  size, for lattices from 8 to 162 qubits.
* ``witness``      -- shadow sample cost (logarithmic in the number of
  witnesses) against the direct-measurement baseline (linear), plus
  detection flags for tripartite / GHZ-type entanglement.

Every run is reproducible: each (grid point, repetition, snapshot) consumes
a random sub-stream derived from the config seed, and CSV floats are
printed with 12 significant digits, so a rerun writes an identical file.
Trial streams in ``ghz-scaling`` are persistent: the search evaluates the
leading N snapshots of each trial's stream, so probing many N values never
re-acquires data.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import __version__
from ._kernels import (_batch_dense_ghz3, _batch_fidelity_ensemble, _batch_measure_z,
                       _batch_selftarget)
from .dense import direct_witness_measurement, witness_projector_state
from .observables import Witness
from .rng import RandomStream, substream_seed
from .shadow import plan_samples
from .states import ToricLattice, ghz_tableau, random_rotated_ghz3, random_witness, toric_code_tableau


@dataclass
class ExperimentConfig:
    """Flat, file-serializable experiment configuration."""

    experiment: str = ""
    seed: int = 0
    out: str = ""
    n_snapshots: int = 0          # 0 = experiment default
    k_batches: int = 0            # 0 = experiment default
    epsilon: float = 0.1
    delta: float = 0.05
    repetitions: int = 10
    n_qubits: int = 20            # ghz-noise system size
    n_values: tuple = (10, 20, 40, 80, 120, 162)
    p_values: tuple = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
    l_values: tuple = (2, 4, 6, 9)
    m_max: int = 1024
    target_fidelity: float = 0.99
    search_start: int = 1024
    success_fraction: float = 0.9
    n_direct_samples: int = 1000
    workers: int = 0

    def items(self):
        for f in fields(self):
            yield f.name, getattr(self, f.name)


_INT_KEYS = {"seed", "n_snapshots", "k_batches", "repetitions", "n_qubits", "m_max",
             "search_start", "n_direct_samples", "workers"}
_FLOAT_KEYS = {"epsilon", "delta", "target_fidelity", "success_fraction"}
_INT_TUPLE_KEYS = {"n_values", "l_values"}
_FLOAT_TUPLE_KEYS = {"p_values"}


def parse_config_text(text: str) -> dict:
    """Parse the flat key=value config format (# comments, blank lines ok)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        val = val.strip()
        if key in _INT_KEYS:
            out[key] = int(val)
        elif key in _FLOAT_KEYS:
            out[key] = float(val)
        elif key in _INT_TUPLE_KEYS:
            out[key] = tuple(int(v) for v in val.split(",") if v.strip())
        elif key in _FLOAT_TUPLE_KEYS:
            out[key] = tuple(float(v) for v in val.split(",") if v.strip())
        else:
            out[key] = val
    return out


def config_from_mapping(mapping: dict) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(mapping) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return replace(ExperimentConfig(), **mapping)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, tuple):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def config_header(cfg: ExperimentConfig) -> str:
    # full config except the output path, so identical runs diff clean
    parts = [f"version={__version__}"]
    parts += [f"{k}={_fmt(v)}" for k, v in cfg.items() if k != "out"]
    return "# " + " ".join(parts)


def write_csv(path_or_buf, cfg: ExperimentConfig, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(config_header(cfg) + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    text = buf.getvalue()
    if path_or_buf:
        with open(path_or_buf, "w") as fh:
            fh.write(text)
    return text


def _subseed(seed: int, *indices: int) -> int:
    s = seed
    for ix in indices:
        s = substream_seed(s, ix)
    return s


def _set_workers(cfg: ExperimentConfig):
    if cfg.workers > 0:
        import numba

        numba.set_num_threads(cfg.workers)


def _default_k(cfg: ExperimentConfig, M: int = 1) -> int:
    if cfg.k_batches > 0:
        return cfg.k_batches
    return plan_samples(M, 1.0, cfg.epsilon, cfg.delta).K


# ---------------------------------------------------------------------------
# ghz-scaling
# ---------------------------------------------------------------------------


def _mom_prefix(est: np.ndarray, N: int, K: int) -> float:
    m = N // K
    return float(np.median(est[: K * m].reshape(K, m).mean(axis=1)))


def run_ghz_scaling(cfg: ExperimentConfig):
    """Smallest N (multiple of K) whose median-of-means self-fidelity
    estimate reaches the target in >= success_fraction of the trials.

    The search doubles N and then bisects; trial t evaluates prefixes of one
    persistent snapshot stream.  Reported per n: the minimum N, and the
    standard deviation over trials of each trial's own smallest probed N.
    """
    _set_workers(cfg)
    K = _default_k(cfg)
    n_cap = 1 << 22
    rows = []
    for n_idx, n in enumerate(cfg.n_values):
        tab = ghz_tableau(n, +1)
        streams = [np.empty(0, np.float64) for _ in range(cfg.repetitions)]

        def extend(upto: int, n=n, tab=tab, n_idx=n_idx, streams=streams):
            for t in range(cfg.repetitions):
                have = streams[t].shape[0]
                if have >= upto:
                    continue
                more = upto - have
                est = np.empty(more, np.float64)
                outb = np.empty((more, tab.W), np.uint64)
                run_seed = _subseed(cfg.seed, n_idx, t)
                _batch_selftarget(tab.xs, tab.zs, tab.phases, n, tab.W, more,
                                  np.uint64(run_seed), have, est, outb)
                streams[t] = np.concatenate([streams[t], est])

        def succ_count(N: int) -> int:
            return sum(_mom_prefix(streams[t], N, K) >= cfg.target_fidelity
                       for t in range(cfg.repetitions))

        need = int(np.ceil(cfg.success_fraction * cfg.repetitions))
        probes = []
        N = max(K, ((cfg.search_start + K - 1) // K) * K)
        while True:
            extend(N)
            probes.append(N)
            if succ_count(N) >= need:
                break
            N *= 2
            if N > n_cap:
                raise RuntimeError(f"ghz-scaling search exceeded {n_cap} snapshots at n={n}")
        lo, hi = (probes[-2] if len(probes) > 1 else 0), N
        while hi - lo > K:
            mid = ((lo + hi) // 2 // K) * K
            if mid <= lo:
                break
            probes.append(mid)
            if succ_count(mid) >= need:
                hi = mid
            else:
                lo = mid
        n_star = hi
        per_trial = []
        for t in range(cfg.repetitions):
            hits = [p for p in sorted(set(probes))
                    if _mom_prefix(streams[t], p, K) >= cfg.target_fidelity]
            per_trial.append(hits[0] if hits else n_star)
        rows.append((n, n_star, float(np.std(per_trial)), K, cfg.repetitions))
    columns = ("n_qubits", "n_snapshots", "trial_std", "k_batches", "repetitions")
    return columns, rows


# ---------------------------------------------------------------------------
# ghz-noise
# ---------------------------------------------------------------------------


def run_ghz_noise(cfg: ExperimentConfig):
    """Median-of-means GHZ+ fidelity of rho_p at fixed N, per p and repetition."""
    _set_workers(cfg)
    n = cfg.n_qubits
    N = cfg.n_snapshots or 60000
    K = _default_k(cfg)
    plus = ghz_tableau(n, +1)
    minus = ghz_tableau(n, -1)
    n2, W = 2 * n, plus.W
    mem_xs = np.stack([plus.xs, minus.xs])
    mem_zs = np.stack([plus.zs, minus.zs])
    mem_ph = np.stack([plus.phases, minus.phases])
    rows = []
    est = np.empty(N, np.float64)
    for p_idx, p in enumerate(cfg.p_values):
        cum = np.array([1.0 - p, 1.0], dtype=np.float64)
        for rep in range(cfg.repetitions):
            run_seed = _subseed(cfg.seed, p_idx, rep)
            _batch_fidelity_ensemble(mem_xs, mem_zs, mem_ph, cum,
                                     plus.xs, plus.zs, plus.phases,
                                     n, W, N, np.uint64(run_seed), 0, est)
            rows.append((p, rep, _mom_prefix(est, N, K), 1.0 - p))
    columns = ("p", "repetition", "estimate", "true_fidelity")
    return columns, rows


# ---------------------------------------------------------------------------
# toric
# ---------------------------------------------------------------------------


def _plaquette_violations(lat: ToricLattice, outcomes: np.ndarray) -> int:
    """Number of (outcome, plaquette) pairs with odd Z-parity."""
    W = outcomes.shape[1]
    masks = np.zeros((lat.L * lat.L, W), dtype=np.uint64)
    for r in range(lat.L):
        for c in range(lat.L):
            for q in lat.plaquette_qubits(r, c):
                masks[r * lat.L + c, q >> 6] |= np.uint64(1) << np.uint64(q & 63)
    total = 0
    chunk = 4096
    for lo in range(0, outcomes.shape[0], chunk):
        sl = outcomes[lo:lo + chunk]
        par = np.bitwise_count(sl[:, None, :] & masks[None, :, :]).sum(axis=2) & 1
        total += int(par.sum())
    return total


def run_toric(cfg: ExperimentConfig):
    """Self-fidelity of toric-code ground states at planned sample size.

    Alongside the shadow estimates, each repetition draws `n_direct_samples`
    plain Z-basis measurements of the (unrotated) ground state; each such
    outcome must be a closed-loop configuration, so the emitted plaquette
    violation count should be zero.  (Shadow acquisition itself measures the
    randomly rotated state, whose outcomes carry no parity constraint.)
    """
    _set_workers(cfg)
    plan = plan_samples(1, 1.0, cfg.epsilon, cfg.delta)
    N = cfg.n_snapshots or plan.N
    K = cfg.k_batches or plan.K
    rows = []
    for l_idx, L in enumerate(cfg.l_values):
        tab = toric_code_tableau(L)
        lat = ToricLattice(L)
        n = tab.n
        ests = []
        violations = 0
        est = np.empty(N, np.float64)
        outb = np.empty((N, tab.W), np.uint64)
        direct = np.empty((cfg.n_direct_samples, tab.W), np.uint64)
        for rep in range(cfg.repetitions):
            run_seed = _subseed(cfg.seed, l_idx, rep)
            _batch_selftarget(tab.xs, tab.zs, tab.phases, n, tab.W, N,
                              np.uint64(run_seed), 0, est, outb)
            ests.append(_mom_prefix(est, N, K))
            if cfg.n_direct_samples:
                _batch_measure_z(tab.xs, tab.zs, tab.phases, n, tab.W,
                                 cfg.n_direct_samples,
                                 np.uint64(_subseed(cfg.seed, l_idx, rep, 1)), 0, direct)
                violations += _plaquette_violations(lat, direct)
        ests = np.array(ests)
        rows.append((n, L, float(ests.mean()), float(ests.std()),
                     float(ests.min()), float(ests.max()), violations,
                     cfg.repetitions, N, K, cfg.n_direct_samples))
    columns = ("n_qubits", "L", "estimate", "stddev", "est_min", "est_max",
               "plaquette_violations", "repetitions", "n_snapshots", "k_batches",
               "n_direct_samples")
    return columns, rows


# ---------------------------------------------------------------------------
# witness
# ---------------------------------------------------------------------------


def _witness_hs_bound() -> float:
    """max tr(O^2) over the witness family, computed numerically."""
    eye = np.eye(2, dtype=complex)
    return max(Witness(a, (eye, eye, eye)).hs_norm_sq() for a in (0.5, 0.75))


def run_witness(cfg: ExperimentConfig):
    """Shadow cost versus direct measurement for up to m_max witnesses.

    Per repetition: draw one locally rotated GHZ state and a stream of
    witness candidates; acquire one shadow sized by plan_samples(m_max);
    median-of-means estimate every witness projector overlap; record, for
    each M, the planned shadow cost, the accumulated direct-measurement
    cost, and whether any of the first M witnesses fires at alpha 0.5 / 0.75.
    The same overlap estimates serve both alpha thresholds.
    """
    _set_workers(cfg)
    B = _witness_hs_bound()
    M_max = cfg.m_max
    plan = plan_samples(M_max, B, cfg.epsilon, cfg.delta)
    N = cfg.n_snapshots or plan.N
    K = cfg.k_batches or plan.K
    shadow_cost = [plan_samples(M, B, cfg.epsilon, cfg.delta).N for M in range(1, M_max + 1)]
    rows = []
    for rep in range(cfg.repetitions):
        state = random_rotated_ghz3(RandomStream(_subseed(cfg.seed, rep, 0)))
        wrng = RandomStream(_subseed(cfg.seed, rep, 1))
        specs = [random_witness(wrng, 0.5) for _ in range(M_max)]
        wmat = np.stack([witness_projector_state(s.locals) for s in specs])
        phi = np.empty((N, 8), np.complex128)
        _batch_dense_ghz3(state.vector, N, np.uint64(_subseed(cfg.seed, rep, 2)), 0, phi)
        m_batch = N // K
        batch_means = np.empty((K, M_max))
        for k in range(K):
            sl = phi[k * m_batch:(k + 1) * m_batch]
            # single-snapshot estimate of <w|rho|w> is 9|<w|phi>|^2 - 1
            ov = 9.0 * np.abs(sl @ wmat.conj().T) ** 2 - 1.0
            batch_means[k] = ov.mean(axis=0)
        f_mom = np.median(batch_means, axis=0)
        drng = RandomStream(_subseed(cfg.seed, rep, 3))
        direct_costs = np.empty(M_max, dtype=np.int64)
        for m, spec in enumerate(specs):
            _est, used = direct_witness_measurement(state.vector, spec, cfg.epsilon,
                                                    drng.substream(m))
            direct_costs[m] = used
        cum_direct = np.cumsum(direct_costs)
        fired05 = f_mom > 0.5
        fired075 = f_mom > 0.75
        seen05 = np.cumsum(fired05) > 0
        seen075 = np.cumsum(fired075) > 0
        for M in range(1, M_max + 1):
            rows.append((rep, M, shadow_cost[M - 1], int(cum_direct[M - 1]),
                         int(seen05[M - 1]), int(seen075[M - 1])))
    columns = ("repetition", "n_witnesses", "shadow_cost", "direct_cost",
               "detected_tripartite", "detected_ghz_type")
    return columns, rows


_EXPERIMENTS = {
    "ghz-scaling": run_ghz_scaling,
    "ghz-noise": run_ghz_noise,
    "toric": run_toric,
    "witness": run_witness,
}


def run_experiment(name: str, cfg: ExperimentConfig, out_path=None) -> str:
    if name not in _EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(_EXPERIMENTS)}")
    cfg = replace(cfg, experiment=name)
    columns, rows = _EXPERIMENTS[name](cfg)
    return write_csv(out_path or cfg.out or None, cfg, columns, rows)
