import json
import os

import numpy as np
import pytest

from acs.cli import main
from acs.io import read_csv, read_matrix


def _write(path, cfg):
    with open(path, "w") as fh:
        json.dump(cfg, fh)
    return str(path)


def _tune_cfg(tmp_path):
    return _write(tmp_path / "tune.json", {
        "target": {"family": "rbm_synthetic", "n_visible": 12, "n_hidden": 6,
                   "seed": 7, "weight_scale": 1.0},
        "tuner": {"budget": 30, "burnin_nomh": 10, "burnin_mh": 10, "steps_per_cycle": 6},
        "seed": 3,
    })


def _sample_cfg(tmp_path, **over):
    cfg = {
        "target": {"family": "synthetic_grid", "num_modes": 4, "spacing": 5, "sigma_sq": 2.0},
        "samplers": [
            {"name": "acs", "schedule": {"s": 5, "alpha_max": 10, "alpha_min": 0.5,
                                         "beta_max": 0.9, "beta_min": 0.5}},
            {"name": "dmala", "alpha": 3.0},
        ],
        "seeds": [0, 1, 2],
        "n_steps": 200,
        "ground_truth": {"kind": "exact", "n": 300, "seed": 99},
        "eval": {"checkpoints": [100, 200], "kl": True, "mmd": True},
    }
    cfg.update(over)
    return _write(tmp_path / "sample.json", cfg)


def test_tune_outputs_and_reproducibility(tmp_path):
    cfg = _tune_cfg(tmp_path)
    out1, out2 = str(tmp_path / "o1"), str(tmp_path / "o2")
    assert main(["tune", "--config", cfg, "--out", out1]) == 0
    assert main(["tune", "--config", cfg, "--out", out2]) == 0
    with open(os.path.join(out1, "schedule.json")) as fh:
        doc = json.load(fh)
    assert doc["seed"] == 3
    assert len(doc["config_sha256"]) == 64
    alphas = doc["schedule"]["alphas"]
    assert len(alphas) == 6 and alphas[0] >= alphas[-1]
    meta, header, rows = read_csv(os.path.join(out1, "tuning_log.csv"), "acs.tune")
    assert header == ["phase", "round", "alpha", "beta", "accept"]
    assert {r[0] for r in rows} == {"alpha_min", "alpha_max", "bal"}
    assert os.path.exists(os.path.join(out1, "schedule.png"))
    # same config + seed -> byte-identical artifacts
    for name in ("schedule.json", "tuning_log.csv"):
        b1 = open(os.path.join(out1, name), "rb").read()
        b2 = open(os.path.join(out2, name), "rb").read()
        assert b1 == b2


def test_tune_seed_override(tmp_path):
    cfg = _tune_cfg(tmp_path)
    out = str(tmp_path / "o")
    assert main(["tune", "--config", cfg, "--out", out, "--seed", "11"]) == 0
    with open(os.path.join(out, "schedule.json")) as fh:
        assert json.load(fh)["seed"] == 11


def test_sample_outputs(tmp_path):
    cfg = _sample_cfg(tmp_path)
    out = str(tmp_path / "o")
    assert main(["sample", "--config", cfg, "--out", out]) == 0
    for label in ("acs", "dmala"):
        for seed in (0, 1, 2):
            tr = read_matrix(os.path.join(out, "trace_%s_seed%d.acs1" % (label, seed)))
            assert tr.shape == (200, 2) and tr.dtype == np.uint8
    meta, header, rows = read_csv(os.path.join(out, "metrics.csv"), "acs.sample")
    assert meta["seeds"] == "0,1,2"
    assert header[:3] == ["sampler", "seed", "step"]
    assert len(rows) == 2 * 3 * 200
    with open(os.path.join(out, "summary.json")) as fh:
        summary = json.load(fh)
    assert summary["n_seeds"] == 3
    for label in ("acs", "dmala"):
        agg = summary["samplers"][label]
        assert agg["kl"]["n"] == 3
        assert agg["log10_mmd"]["n"] == 3
        assert agg["kl"]["stderr"] >= 0.0
    assert read_matrix(os.path.join(out, "ground_truth.acs1")).shape == (300, 2)
    assert os.path.exists(os.path.join(out, "energy.png"))


def test_sample_threaded_matches_serial(tmp_path, monkeypatch):
    cfg = _sample_cfg(tmp_path, seeds=[0, 1])
    out1, out2 = str(tmp_path / "serial"), str(tmp_path / "threaded")
    assert main(["sample", "--config", cfg, "--out", out1]) == 0
    monkeypatch.setenv("ACS_THREADS", "4")
    assert main(["sample", "--config", cfg, "--out", out2]) == 0
    b1 = open(os.path.join(out1, "metrics.csv"), "rb").read()
    b2 = open(os.path.join(out2, "metrics.csv"), "rb").read()
    assert b1 == b2


def test_sample_seed_override_single_trace(tmp_path):
    cfg = _sample_cfg(tmp_path)
    out = str(tmp_path / "o")
    assert main(["sample", "--config", cfg, "--out", out, "--seed", "5"]) == 0
    names = sorted(f for f in os.listdir(out) if f.startswith("trace_"))
    assert names == ["trace_acs_seed5.acs1", "trace_dmala_seed5.acs1"]


def test_sample_config_errors(tmp_path):
    empty = _write(tmp_path / "empty.json", json.load(open(_sample_cfg(tmp_path))) | {"samplers": []})
    assert main(["sample", "--config", empty, "--out", str(tmp_path / "o1")]) == 1
    missing_gt = _sample_cfg(tmp_path, ground_truth={"kind": "file", "path": "nope.acs1"})
    assert main(["sample", "--config", missing_gt, "--out", str(tmp_path / "o2")]) == 1
    bad_sampler = _sample_cfg(tmp_path, samplers=[{"name": "nope"}])
    assert main(["sample", "--config", bad_sampler, "--out", str(tmp_path / "o3")]) == 1


def test_learn_outputs(tmp_path):
    cfg = _write(tmp_path / "learn.json", {
        "data": {"kind": "two_cluster", "n": 30, "dims": 6, "noise": 0.1, "seed": 1},
        "model": {"n_hidden": 4, "init_scale": 0.01},
        "method": "acs_pcd",
        "pcd": {"buffer_size": 10, "n_iters": 6, "cycle_length": 3, "tune_interval": 2,
                "big_steps": 2, "small_steps": 2, "checkpoint_interval": 3,
                "tuner": {"budget": 10, "t_alpha": 5}},
        "eval": {"exact_ll": True, "ais": {"n_temps": 5, "steps_per_temp": 1, "n_particles": 10}},
        "seed": 5,
    })
    out = str(tmp_path / "o")
    assert main(["learn", "--config", cfg, "--out", out]) == 0
    meta, header, rows = read_csv(os.path.join(out, "learn_trace.csv"), "acs.learn")
    assert len(rows) == 6
    assert header[0] == "iter"
    from acs.io import load_model

    final = load_model(os.path.join(out, "model_final.json"))
    assert final.W.shape == (4, 6)
    assert os.path.exists(os.path.join(out, "model_ckpt_000003.json"))
    with open(os.path.join(out, "summary.json")) as fh:
        summary = json.load(fh)
    ev = summary["evaluation"]
    assert "exact_log_likelihood" in ev and "ais_log_z" in ev
    assert abs(ev["ais_log_z"] - ev["exact_log_z"]) < 1.0
    assert os.path.exists(os.path.join(out, "learn_trace.png"))


def test_learn_pcd_with_gibbs(tmp_path):
    cfg = _write(tmp_path / "learn.json", {
        "data": {"kind": "two_cluster", "n": 20, "dims": 4, "noise": 0.1},
        "model": {"n_hidden": 3},
        "method": "pcd",
        "sampler": {"kind": "gibbs"},
        "pcd": {"buffer_size": 10, "n_iters": 4},
        "eval": {"exact_ll": True},
    })
    assert main(["learn", "--config", cfg, "--out", str(tmp_path / "o")]) == 0


def test_theory_pass_and_negative_control(tmp_path):
    base = {
        "target": {"family": "quadratic", "center": [2.0], "hessian": [[0.35]], "max_value": 4},
        "pairs": {"betas": [0.5, 0.9], "alpha_fracs": [0.5, 0.99]},
        "tv_steps": 25,
        "cycle": {"s": 4, "alpha_max": 2.0, "alpha_min": 0.2, "beta_max": 0.9, "beta_min": 0.5},
    }
    cfg = _write(tmp_path / "theory.json", base)
    out = str(tmp_path / "o")
    assert main(["theory", "--config", cfg, "--out", out]) == 0
    with open(os.path.join(out, "theory_report.json")) as fh:
        rep = json.load(fh)
    assert rep["all_passed"] is True
    assert len(rep["pairs"]) == 4
    for entry in rep["pairs"]:
        assert entry["ok"] and entry["margin"] >= 0.0 and entry["tv_bound_ok"]
    assert rep["cycle"]["stationarity_error"] < 1e-10
    assert os.path.exists(os.path.join(out, "tv_convergence.png"))

    bad = _write(tmp_path / "bad.json", base | {"negative_control": True})
    out_bad = str(tmp_path / "ob")
    assert main(["theory", "--config", bad, "--out", out_bad]) == 2
    with open(os.path.join(out_bad, "theory_report.json")) as fh:
        rep = json.load(fh)
    assert rep["all_passed"] is False


def test_eval_recomputes_metrics(tmp_path):
    sample_cfg = _sample_cfg(tmp_path, seeds=[0])
    sample_out = str(tmp_path / "s")
    assert main(["sample", "--config", sample_cfg, "--out", sample_out]) == 0
    cfg = _write(tmp_path / "eval.json", {
        "traces": [{"label": "acs", "path": os.path.join(sample_out, "trace_acs_seed0.acs1")}],
        "ground_truth": os.path.join(sample_out, "ground_truth.acs1"),
        "target": {"family": "synthetic_grid", "num_modes": 4, "spacing": 5, "sigma_sq": 2.0},
    })
    out = str(tmp_path / "o")
    assert main(["eval", "--config", cfg, "--out", out]) == 0
    with open(os.path.join(out, "eval_summary.json")) as fh:
        summary = json.load(fh)
    metrics = summary["traces"]["acs"]
    assert metrics["self_log10_mmd"] == -12.0
    assert "log10_mmd" in metrics and "kl" in metrics and "modes_visited" in metrics
    assert 0 <= metrics["modes_visited"] <= 4
    read_csv(os.path.join(out, "eval_metrics.csv"), "acs.eval")
    # rerun is byte-identical
    out2 = str(tmp_path / "o2")
    assert main(["eval", "--config", cfg, "--out", out2]) == 0
    assert (open(os.path.join(out, "eval_summary.json"), "rb").read()
            == open(os.path.join(out2, "eval_summary.json"), "rb").read())


def test_eval_missing_trace(tmp_path):
    cfg = _write(tmp_path / "eval.json", {"traces": [{"label": "x", "path": "nope.acs1"}]})
    assert main(["eval", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


def test_broken_config_and_unknown_family(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"nope": 1')
    assert main(["tune", "--config", str(broken), "--out", str(tmp_path / "o")]) == 1
    unknown = _write(tmp_path / "u.json", {"target": {"family": "nope"}, "tuner": {}})
    assert main(["tune", "--config", unknown, "--out", str(tmp_path / "o")]) == 1
    badkey = _write(tmp_path / "k.json", {
        "target": {"family": "quadratic", "center": [1.0], "hessian": [[0.5]], "max_value": 2},
        "tuner": {"nope": 1},
    })
    assert main(["tune", "--config", badkey, "--out", str(tmp_path / "o")]) == 1
