import numpy as np
import pytest

from stabshadow.experiments import (ExperimentConfig, config_from_mapping, config_header,
                                    parse_config_text, run_experiment, run_ghz_noise,
                                    run_ghz_scaling, run_toric, run_witness)


def test_parse_config_text():
    text = """
    # a comment
    seed = 7
    epsilon = 0.2
    n_values = 4, 8
    p_values = 0.0,0.5
    experiment = toric
    """
    m = parse_config_text(text)
    assert m["seed"] == 7
    assert m["epsilon"] == 0.2
    assert m["n_values"] == (4, 8)
    assert m["p_values"] == (0.0, 0.5)
    cfg = config_from_mapping(m)
    assert cfg.seed == 7
    with pytest.raises(ValueError):
        parse_config_text("nonsense line")
    with pytest.raises(ValueError):
        config_from_mapping({"seed": 1, "bogus_key": 2})


def test_header_records_seed_and_config():
    cfg = ExperimentConfig(seed=11, experiment="toric")
    h = config_header(cfg)
    assert h.startswith("# version=")
    assert "seed=11" in h and "experiment=toric" in h


def test_ghz_noise_small_tracks_truth():
    cfg = ExperimentConfig(seed=1, n_qubits=6, n_snapshots=6000, repetitions=2,
                           p_values=(0.0, 0.4, 1.0))
    cols, rows = run_ghz_noise(cfg)
    assert cols[0] == "p"
    for p, _rep, est, true in rows:
        assert true == 1.0 - p
        assert abs(est - true) < 0.12


def test_toric_small():
    cfg = ExperimentConfig(seed=2, l_values=(2,), n_snapshots=4000, repetitions=2,
                           n_direct_samples=200)
    cols, rows = run_toric(cfg)
    row = dict(zip(cols, rows[0]))
    assert row["n_qubits"] == 8
    assert abs(row["estimate"] - 1.0) < 0.1
    assert row["plaquette_violations"] == 0


def test_ghz_scaling_small():
    cfg = ExperimentConfig(seed=3, n_values=(4,), k_batches=2, repetitions=10,
                           search_start=64)
    cols, rows = run_ghz_scaling(cfg)
    n, n_star, std, K, reps = rows[0]
    assert n == 4 and K == 2 and reps == 10
    assert n_star % K == 0 and n_star > 0
    # reported N actually satisfies the criterion while N - K does not
    # (by construction of the bisect); just sanity-check the magnitude here
    assert 2 <= n_star <= 1 << 22


def test_witness_small_detection_and_costs():
    cfg = ExperimentConfig(seed=4, m_max=96, repetitions=2)
    cols, rows = run_witness(cfg)
    assert cols == ("repetition", "n_witnesses", "shadow_cost", "direct_cost",
                    "detected_tripartite", "detected_ghz_type")
    by_rep = {}
    for rep, M, sc, dc, d05, d075 in rows:
        by_rep.setdefault(rep, []).append((M, sc, dc, d05, d075))
    for rep, entries in by_rep.items():
        entries.sort()
        Ms = np.array([e[0] for e in entries])
        sc = np.array([e[1] for e in entries], dtype=float)
        dc = np.array([e[2] for e in entries], dtype=float)
        d05 = np.array([e[3] for e in entries])
        d075 = np.array([e[4] for e in entries])
        assert np.all(np.diff(sc) >= 0) and np.all(np.diff(dc) > 0)
        assert np.all(np.diff(d05) >= 0) and np.all(np.diff(d075) >= 0)  # flags latch
        # ghz-type detection implies tripartite detection at the same M
        assert np.all(d05 >= d075)


def test_run_experiment_writes_deterministic_csv(tmp_path):
    cfg = ExperimentConfig(seed=5, n_qubits=4, n_snapshots=2000, repetitions=1,
                           p_values=(0.5,), out=str(tmp_path / "a.csv"))
    t1 = run_experiment("ghz-noise", cfg)
    cfg2 = ExperimentConfig(seed=5, n_qubits=4, n_snapshots=2000, repetitions=1,
                            p_values=(0.5,), out=str(tmp_path / "b.csv"))
    t2 = run_experiment("ghz-noise", cfg2)
    assert t1 == t2
    assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()
    with pytest.raises(ValueError):
        run_experiment("nope", cfg)
