"""Experiment runner.

Subcommands (each takes ``--config <json> [--seed N] [--out DIR]``):

* ``tune``    fit a cyclical schedule and persist it with telemetry
* ``sample``  run samplers across seeds, emit traces + metric CSV
* ``learn``   train an RBM by (cyclical) PCD, checkpoint and evaluate
* ``theory``  build exact kernels and verify the convergence bounds
* ``eval``    recompute metrics from persisted traces

Config keys are documented per subcommand in the handlers below.  Every
output embeds the config hash and seed.  ``ACS_THREADS`` caps the
seed fan-out in ``sample``.  Exit codes: 0 success, 1 config error,
2 verification failure, 3 runtime error.
"""

import argparse
import concurrent.futures
import os
import sys
import traceback

import numpy as np
from scipy.special import ndtri

from acs import eval as ev
from acs import io, report
from acs.core import (
    DEFAULT_ENUM_CAP,
    DiscreteSpace,
    RngStream,
    exact_sample,
)
from acs.io import ConfigError, VerificationError
from acs.learning import (
    PcdConfig,
    acs_pcd_train,
    ais_log_z,
    exact_log_likelihood,
    make_two_cluster_dataset,
    pcd_train,
)
from acs.samplers import (
    RecordConfig,
    acs_run,
    block_gibbs_run,
    dmala_run,
    random_walk_run,
    single_flip_informed_run,
)
from acs.schedule import Schedule, build_alpha_schedule, naive_beta_schedule
from acs.targets import (
    QuadraticTarget,
    RbmModel,
    SyntheticMultimodal,
    build_grid_modes,
    sample_rbm_synthetic,
)
from acs.theory import (
    check_detailed_balance,
    check_stationarity,
    composite_cycle_kernel,
    exact_kernel,
    minorization_epsilon,
    second_eigenvalue_modulus,
    tv_convergence_curve,
    verify_minorization,
)
from acs.tuner import TunerConfig, auto_tune

__all__ = ["main"]


def _require(cfg, key, path=""):
    if key not in cfg:
        raise ConfigError("missing config key %s%s" % (path, key))
    return cfg[key]


def _tuner_config(d):
    known = set(TunerConfig.__dataclass_fields__)
    bad = set(d) - known
    if bad:
        raise ConfigError("unknown tuner keys: %s" % (", ".join(sorted(bad)),))
    try:
        return TunerConfig(**d)
    except (TypeError, ValueError) as exc:
        raise ConfigError("tuner: %s" % (exc,)) from exc


def build_target(spec):
    """Construct a target model from its config spec.

    Families: ``synthetic_grid`` (num_modes, spacing, sigma_sq,
    [weights]), ``synthetic_modes`` (modes, max_value, sigma_sq,
    [weights]), ``rbm_synthetic`` (n_visible, n_hidden, [seed],
    [weight_scale], [bias_scale]), ``rbm_file`` (path to a model
    sidecar), ``quadratic`` (center, hessian, max_value).
    """
    family = _require(spec, "family", "target.")
    try:
        if family == "synthetic_grid":
            modes, n_max = build_grid_modes(spec["num_modes"], spec["spacing"])
            return SyntheticMultimodal(modes, spec["sigma_sq"], n_max, spec.get("weights"))
        if family == "synthetic_modes":
            return SyntheticMultimodal(
                np.asarray(spec["modes"], dtype=float),
                spec["sigma_sq"],
                spec["max_value"],
                spec.get("weights"),
            )
        if family == "rbm_synthetic":
            space = DiscreteSpace.binary(spec["n_visible"])
            rng = RngStream(spec.get("seed", 0))
            return sample_rbm_synthetic(
                space,
                spec["n_hidden"],
                rng,
                weight_scale=spec.get("weight_scale", 0.2),
                bias_scale=spec.get("bias_scale", 0.1),
            )
        if family == "rbm_file":
            return io.load_model(spec["path"])
        if family == "quadratic":
            return QuadraticTarget(spec["center"], spec["hessian"], spec["max_value"])
    except KeyError as exc:
        raise ConfigError("target.%s: missing key %s" % (family, exc)) from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError("target.%s: %s" % (family, exc)) from exc
    raise ConfigError("unknown target family %r" % (family,))


def _init_state(spec, space, rng):
    if spec is None or spec == "uniform":
        return np.floor(rng.uniform(space.dims) * space.n_values).astype(float)
    if spec == "zeros":
        return np.zeros(space.dims)
    state = np.asarray(spec, dtype=float)
    if state.shape != (space.dims,):
        raise ConfigError("init state has wrong dimension")
    return state


def _schedule_from_spec(spec, target, rng, telemetry=None):
    if "file" in spec:
        d = io.load_config(spec["file"])
        return Schedule.from_dict(_require(d, "schedule"))
    if "alphas" in spec:
        return Schedule.from_dict(spec)
    if spec.get("auto_tune"):
        cfg = _tuner_config(spec.get("tuner", {}))
        theta = _init_state(spec.get("init"), target.space, rng)
        sched, _ = auto_tune(cfg, target, theta, rng, telemetry=telemetry)
        return sched
    try:
        s = spec["s"]
        alphas = build_alpha_schedule(s, spec["alpha_max"], spec["alpha_min"])
        betas = naive_beta_schedule(s, spec.get("beta_max", 0.5), spec.get("beta_min", 0.5))
        return Schedule(alphas, betas)
    except KeyError as exc:
        raise ConfigError("schedule: missing key %s" % (exc,)) from exc


def _out_dir(args, cfg):
    out = args.out or cfg.get("out", "out")
    os.makedirs(out, exist_ok=True)
    return out


def _meta(cfg, seed):
    return {"config_sha256": io.config_hash(cfg), "seed": seed}


# ---------------------------------------------------------------- tune


def cmd_tune(cfg, args):
    """Keys: target, tuner, seed, init, out."""
    out = _out_dir(args, cfg)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    target = build_target(_require(cfg, "target"))
    tc = _tuner_config(cfg.get("tuner", {}))
    rng = RngStream(seed)
    theta = _init_state(cfg.get("init"), target.space, rng)
    telemetry = []
    sched, theta_final = auto_tune(tc, target, theta, rng, telemetry=telemetry)
    payload = dict(_meta(cfg, seed), schedule=sched.to_dict(), final_state=theta_final.tolist())
    io.write_json(os.path.join(out, "schedule.json"), payload)
    io.write_csv(
        os.path.join(out, "tuning_log.csv"),
        "acs.tune.v1",
        _meta(cfg, seed),
        ["phase", "round", "alpha", "beta", "accept"],
        [[r["phase"], r["round"], r["alpha"], r["beta"], r["accept"]] for r in telemetry],
    )
    report.plot_schedule(sched, os.path.join(out, "schedule.png"))
    print("schedule: s=%d alpha [%g, %g] beta [%g, %g]" % (
        sched.steps_per_cycle, sched.alphas[0], sched.alphas[-1], sched.betas[0], sched.betas[-1],
    ))
    return 0


# -------------------------------------------------------------- sample


def _run_sampler(spec, target, n_steps, theta0, rng, record_cfg):
    name = _require(spec, "name", "sampler.")
    if name == "acs":
        sched = _schedule_from_spec(spec.get("schedule", {"auto_tune": True, "tuner": spec.get("tuner", {})}), target, rng)
        n_cycles = max(1, n_steps // sched.steps_per_cycle)
        return acs_run(target, sched, n_cycles, theta0, rng, record_cfg)
    if name == "dmala":
        return dmala_run(target, spec.get("alpha", 0.2), n_steps, theta0, rng, record_cfg, beta=spec.get("beta", 0.5))
    if name == "random_walk":
        return random_walk_run(target, n_steps, theta0, rng, record_cfg)
    if name == "single_flip":
        return single_flip_informed_run(target, n_steps, theta0, rng, record_cfg, temp=spec.get("temp", 1.0))
    if name == "gibbs":
        if not isinstance(target, RbmModel):
            raise ConfigError("gibbs sampler requires an RBM target")
        return block_gibbs_run(target, n_steps, theta0, rng, record_cfg)
    raise ConfigError("unknown sampler %r" % (name,))


def _ground_truth(cfg, target, n_steps):
    spec = cfg.get("ground_truth")
    if spec is None:
        return None
    kind = spec.get("kind", "exact")
    rng = RngStream(spec.get("seed", 99991))
    if kind == "exact":
        return exact_sample(target, spec.get("n", 2000), rng)
    if kind == "gibbs":
        if not isinstance(target, RbmModel):
            raise ConfigError("gibbs ground truth requires an RBM target")
        x = _init_state(spec.get("init"), target.space, rng)
        for _ in range(spec.get("burn", 100)):
            x = target.block_gibbs_step(x, rng)
        trace = block_gibbs_run(target, spec.get("n", 5000) * spec.get("thin", 10), x, rng,
                                RecordConfig(record_states=True, thin=spec.get("thin", 10)))
        return trace.states
    if kind == "file":
        path = spec.get("path", "")
        if not os.path.exists(path):
            raise ConfigError("ground truth file not found: %s" % (path,))
        return io.read_matrix(path).astype(float)
    raise ConfigError("unknown ground truth kind %r" % (kind,))


def _trace_rows(label, seed, trace, target, ev_cfg, gt, thin):
    """Per-step metric rows plus the final-checkpoint summary entry."""
    n_steps = trace.energies.size
    checkpoints = set(ev_cfg.get("checkpoints") or [n_steps])
    burn_rows = int(ev_cfg.get("burn_in", 0)) // thin
    max_points = int(ev_cfg.get("max_points", 2000))
    want_kl = ev_cfg.get("kl", False) and target.space.size() <= DEFAULT_ENUM_CAP
    want_mmd = ev_cfg.get("mmd", gt is not None) and gt is not None and trace.states is not None
    modes = getattr(target, "modes", None)
    visits = None
    if modes is not None and trace.states is not None:
        _, first = ev.mode_coverage(trace.states, modes, ev_cfg.get("mode_radius", 5.0))
        visit_steps = np.sort(first[first >= 0] * thin)
        visits = np.searchsorted(visit_steps, np.arange(n_steps), side="right")
    rows, summary = [], {}
    for step in range(n_steps):
        mmd_v, kl_v = "", ""
        if (step + 1) in checkpoints and trace.states is not None:
            upto = trace.states[burn_rows : (step + 1 + thin - 1) // thin]
            if upto.shape[0] > max_points:
                upto = upto[:: int(np.ceil(upto.shape[0] / max_points))]
            if want_mmd and upto.shape[0] > 0:
                mmd_v = ev.log10_mmd(upto, gt)
            if want_kl and upto.shape[0] > 0:
                kl_v = ev.empirical_kl(upto, target)
            if step + 1 == n_steps:
                summary = {
                    "log10_mmd": mmd_v if mmd_v != "" else None,
                    "kl": kl_v if kl_v != "" else None,
                    "modes_visited": int(visits[step]) if visits is not None else None,
                    "mean_accept": float(trace.accept_probs.mean()),
                    "final_energy": float(trace.energies[-1]),
                }
        rows.append([
            label, seed, step + 1,
            float(trace.energies[step]), float(trace.accept_probs[step]),
            mmd_v, kl_v, int(visits[step]) if visits is not None else "",
        ])
    return rows, summary


def _state_kind(space):
    return "u8" if np.all(space.n_values <= 256) else "f64"


def cmd_sample(cfg, args):
    """Keys: target, samplers, seeds, n_steps, init, record
    (record_states, thin), ground_truth, eval (checkpoints, burn_in,
    kl, mmd, mode_radius, max_points), out.
    """
    out = _out_dir(args, cfg)
    target = build_target(_require(cfg, "target"))
    samplers = _require(cfg, "samplers")
    if not samplers:
        raise ConfigError("samplers list is empty")
    seeds = [args.seed] if args.seed is not None else cfg.get("seeds", [cfg.get("seed", 0)])
    n_steps = _require(cfg, "n_steps")
    rc = cfg.get("record", {})
    record_cfg = RecordConfig(record_states=rc.get("record_states"), thin=rc.get("thin", 1))
    ev_cfg = cfg.get("eval", {})
    gt = _ground_truth(cfg, target, n_steps)
    kind = _state_kind(target.space)

    def one(spec, seed):
        rng = RngStream(seed)
        theta0 = _init_state(cfg.get("init"), target.space, rng)
        trace = _run_sampler(spec, target, n_steps, theta0, rng, record_cfg)
        return spec, seed, trace

    jobs = [(spec, seed) for spec in samplers for seed in seeds]
    threads = int(os.environ.get("ACS_THREADS", "1"))
    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda j: one(*j), jobs))
    else:
        results = [one(*j) for j in jobs]

    all_rows, per_sampler = [], {}
    for spec, seed, trace in results:
        label = spec.get("label", spec["name"])
        if trace.states is not None:
            io.write_matrix(
                os.path.join(out, "trace_%s_seed%d.acs1" % (label, seed)),
                trace.states.astype(np.uint8) if kind == "u8" else trace.states,
                kind=kind,
            )
        rows, summary = _trace_rows(label, seed, trace, target, ev_cfg, gt, record_cfg.thin)
        all_rows.extend(rows)
        per_sampler.setdefault(label, []).append(summary)
    io.write_csv(
        os.path.join(out, "metrics.csv"),
        "acs.sample.v1",
        dict(_meta(cfg, seeds[0]), seeds=",".join(map(str, seeds))),
        ["sampler", "seed", "step", "energy", "accept_prob", "log10_mmd", "kl", "modes_visited"],
        all_rows,
    )
    if gt is not None:
        io.write_matrix(os.path.join(out, "ground_truth.acs1"),
                        gt.astype(np.uint8) if kind == "u8" else gt, kind=kind)

    summary = {"samplers": {}, "n_seeds": len(seeds), **_meta(cfg, seeds[0])}
    for label, entries in per_sampler.items():
        agg = {}
        for key in ("log10_mmd", "kl", "modes_visited", "mean_accept", "final_energy"):
            vals = [e[key] for e in entries if e.get(key) is not None]
            if vals:
                vals = np.asarray(vals, dtype=float)
                stderr = float(vals.std(ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else 0.0
                agg[key] = {"mean": float(vals.mean()), "stderr": stderr, "n": int(vals.size)}
        summary["samplers"][label] = agg
    io.write_json(os.path.join(out, "summary.json"), summary)

    energy_curves = {}
    for spec, seed, trace in results:
        label = spec.get("label", spec["name"])
        if label not in energy_curves:
            cum, _ = ev.avg_energy_curve(trace.energies)
            energy_curves[label] = (np.arange(1, trace.energies.size + 1), cum)
    report.plot_metric_curves(energy_curves, "running mean energy", os.path.join(out, "energy.png"))
    for label, agg in summary["samplers"].items():
        line = ", ".join("%s=%.4g" % (k, v["mean"]) for k, v in agg.items())
        print("%s: %s" % (label, line))
    return 0


# --------------------------------------------------------------- learn


def _load_dataset(spec):
    kind = spec.get("kind", "two_cluster")
    if kind == "two_cluster":
        rng = RngStream(spec.get("seed", 1))
        return make_two_cluster_dataset(
            rng, n=spec.get("n", 250), dims=spec.get("dims", 10), noise=spec.get("noise", 0.1)
        )
    if kind == "file":
        path = _require(spec, "path", "data.")
        if not os.path.exists(path):
            raise ConfigError("dataset file not found: %s" % (path,))
        return io.read_matrix(path).astype(float)
    raise ConfigError("unknown dataset kind %r" % (kind,))


def _init_model(spec, n_visible, rng):
    n_hidden = _require(spec, "n_hidden", "model.")
    scale = spec.get("init_scale", 0.01)
    W = scale * ndtri(rng.uniform((n_hidden, n_visible)))
    return RbmModel(W, np.zeros(n_hidden), np.zeros(n_visible))


def cmd_learn(cfg, args):
    """Keys: data, model (n_hidden, init_scale), method (pcd|cd|acs_pcd),
    sampler (for pcd/cd), pcd (PcdConfig fields incl. tuner), eval
    (exact_ll, ais {n_temps, steps_per_temp, n_particles}), seed, out.
    """
    out = _out_dir(args, cfg)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    data = _load_dataset(cfg.get("data", {}))
    rng = RngStream(seed)
    model0 = _init_model(_require(cfg, "model"), data.shape[1], rng)
    pcd_spec = dict(cfg.get("pcd", {}))
    tuner_spec = pcd_spec.pop("tuner", {})
    method = cfg.get("method", "acs_pcd")
    known = set(PcdConfig.__dataclass_fields__) - {"tuner", "cd"}
    bad = set(pcd_spec) - known
    if bad:
        raise ConfigError("unknown pcd keys: %s" % (", ".join(sorted(bad)),))
    try:
        pcd_cfg = PcdConfig(tuner=_tuner_config(tuner_spec), cd=(method == "cd"), **pcd_spec)
    except (TypeError, ValueError) as exc:
        raise ConfigError("pcd: %s" % (exc,)) from exc

    if method in ("pcd", "cd"):
        sampler_spec = cfg.get("sampler", {"kind": "dmala", "alpha": 0.2, "beta": 0.5})
        model, trace = pcd_train(model0, data, sampler_spec, pcd_cfg, rng)
    elif method == "acs_pcd":
        model, trace = acs_pcd_train(model0, data, pcd_cfg, rng)
    else:
        raise ConfigError("unknown method %r" % (method,))

    rows = []
    for i in range(len(trace.data_energy)):
        pair = trace.alpha_pair[i] or ("", "")
        rows.append([i + 1, trace.data_energy[i], trace.buffer_energy[i],
                     trace.grad_norm[i], pair[0], pair[1]])
    io.write_csv(
        os.path.join(out, "learn_trace.csv"),
        "acs.learn.v1",
        _meta(cfg, seed),
        ["iter", "data_energy", "buffer_energy", "grad_norm", "alpha_max", "alpha_min"],
        rows,
    )
    for it, ckpt in trace.checkpoints:
        io.save_model(os.path.join(out, "model_ckpt_%06d" % (it,)), ckpt, _meta(cfg, seed))
    io.save_model(os.path.join(out, "model_final"), model, _meta(cfg, seed))

    evaluation = {}
    ev_spec = cfg.get("eval", {})
    if ev_spec.get("exact_ll", True):
        try:
            evaluation["exact_log_likelihood"] = exact_log_likelihood(model, data)
            evaluation["exact_log_likelihood_init"] = exact_log_likelihood(model0, data)
        except ValueError as exc:
            evaluation["exact_log_likelihood_error"] = str(exc)
    if "ais" in ev_spec:
        a = ev_spec["ais"]
        log_z, var = ais_log_z(
            model, a.get("n_temps", 100), a.get("steps_per_temp", 1),
            a.get("n_particles", 100), rng,
        )
        evaluation["ais_log_z"] = log_z
        evaluation["ais_log_weight_var"] = var
        try:
            evaluation["exact_log_z"] = model.exact_log_partition()
        except ValueError:
            pass
    summary = dict(_meta(cfg, seed), method=method, n_iters=pcd_cfg.n_iters, evaluation=evaluation)
    io.write_json(os.path.join(out, "summary.json"), summary)
    report.plot_learn_trace(trace, os.path.join(out, "learn_trace.png"))
    for key, value in evaluation.items():
        print("%s: %s" % (key, value))
    return 0


# -------------------------------------------------------------- theory


def cmd_theory(cfg, args):
    """Keys: target (quadratic), pairs ([[alpha, beta], ...] or
    {betas, alpha_fracs}), variant, tv_steps, cycle (s, alpha_max,
    alpha_min, beta_max, beta_min), negative_control, out.
    """
    out = _out_dir(args, cfg)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    target = build_target(_require(cfg, "target"))
    variant = cfg.get("variant", "proof")
    tv_steps = int(cfg.get("tv_steps", 0))

    pairs_spec = _require(cfg, "pairs")
    if isinstance(pairs_spec, dict):
        from acs.theory import concavity_constants

        c = concavity_constants(target)
        pairs = [
            (frac / (beta * c.lipschitz_m), beta)
            for beta in pairs_spec["betas"]
            for frac in pairs_spec["alpha_fracs"]
        ]
    else:
        pairs = [(float(a), float(b)) for a, b in pairs_spec]

    checks, entries, curves, bounds = [], [], {}, {}
    for alpha, beta in pairs:
        rep = verify_minorization(target, alpha, beta, variant=variant)
        P = rep.kernel
        if cfg.get("negative_control"):
            Q = P.P.copy()
            i, j = 0, 1
            delta = 0.5 * Q[i, j]
            Q[i, j] -= delta
            Q[i, i] += delta
            P = type(P)(Q, P.states)
        stat_err = check_stationarity(P, rep.pi)
        db_err = check_detailed_balance(P, rep.pi)
        lam2 = second_eigenvalue_modulus(P)
        entry = {
            "alpha": alpha,
            "beta": beta,
            "epsilon": rep.epsilon,
            "min_ratio": rep.min_ratio,
            "margin": rep.margin,
            "hypothesis_ok": rep.hypothesis_ok,
            "stationarity_error": stat_err,
            "detailed_balance_error": db_err,
            "lambda2": lam2,
            "spectral_gap_dominates": bool(rep.epsilon <= 1.0 - lam2 + 1e-9),
        }
        ok = (
            rep.margin >= 0.0
            and stat_err < 1e-10
            and db_err < 1e-10
            and entry["spectral_gap_dominates"]
        )
        label = "alpha=%.4g beta=%.2g" % (alpha, beta)
        if tv_steps > 0:
            tv = tv_convergence_curve(P, rep.pi, tv_steps)
            geo = (1.0 - rep.epsilon) ** np.arange(1, tv_steps + 1)
            entry["tv_bound_ok"] = bool(np.all(tv <= geo + 1e-12))
            ok = ok and entry["tv_bound_ok"]
            curves[label] = tv
            bounds[label] = (rep.epsilon, tv_steps)
        entry["ok"] = ok
        entries.append(entry)
        checks.append(ok)

    cycle_entry = None
    if "cycle" in cfg:
        sched = _schedule_from_spec(cfg["cycle"], target, RngStream(seed))
        cyc = composite_cycle_kernel(target, sched)
        from acs.core import exact_probabilities

        pi = exact_probabilities(target)
        eps_prod = float(np.prod([
            minorization_epsilon_for(target, a, b, variant)
            for a, b in zip(sched.alphas, sched.betas)
        ]))
        cycle_entry = {
            "s": sched.steps_per_cycle,
            "stationarity_error": check_stationarity(cyc, pi),
            "lambda2": second_eigenvalue_modulus(cyc),
            "epsilon_product_lower_bound": eps_prod,
        }
        cycle_entry["ok"] = cycle_entry["stationarity_error"] < 1e-10
        checks.append(cycle_entry["ok"])

    passed = all(checks)
    report_obj = dict(
        _meta(cfg, seed),
        variant=variant,
        pairs=entries,
        cycle=cycle_entry,
        all_passed=passed,
    )
    io.write_json(os.path.join(out, "theory_report.json"), report_obj)
    if curves:
        report.plot_tv_curves(curves, bounds, os.path.join(out, "tv_convergence.png"))
    for e in entries:
        print("alpha=%.4g beta=%.2g eps=%.3e margin=%.3e %s" % (
            e["alpha"], e["beta"], e["epsilon"], e["margin"], "ok" if e["ok"] else "FAIL",
        ))
    if not passed:
        raise VerificationError("theory checks failed; see theory_report.json")
    return 0


def minorization_epsilon_for(target, alpha, beta, variant):
    from acs.theory import concavity_constants

    return minorization_epsilon(concavity_constants(target), alpha, beta, variant=variant)


# ---------------------------------------------------------------- eval


def cmd_eval(cfg, args):
    """Keys: traces ([{label, path}]), ground_truth (path), target
    (optional, enables kl + mode coverage), eval (mode_radius,
    max_points, bandwidth), out.
    """
    out = _out_dir(args, cfg)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    traces = _require(cfg, "traces")
    if not traces:
        raise ConfigError("traces list is empty")
    gt_path = cfg.get("ground_truth")
    gt = None
    if gt_path is not None:
        if not os.path.exists(gt_path):
            raise ConfigError("ground truth file not found: %s" % (gt_path,))
        gt = io.read_matrix(gt_path).astype(float)
    target = build_target(cfg["target"]) if "target" in cfg else None
    ev_cfg = cfg.get("eval", {})
    kernel = ev.KernelSpec(bandwidth=ev_cfg.get("bandwidth", 1.0))
    max_points = int(ev_cfg.get("max_points", 2000))

    rows, summary = [], {}
    for entry in traces:
        label = entry.get("label") or os.path.basename(entry["path"])
        if not os.path.exists(entry["path"]):
            raise ConfigError("trace file not found: %s" % (entry["path"],))
        X = io.read_matrix(entry["path"]).astype(float)
        if X.shape[0] > max_points:
            X = X[:: int(np.ceil(X.shape[0] / max_points))]
        metrics = {"n_samples": X.shape[0], "self_log10_mmd": ev.log10_mmd(X, X, kernel)}
        if gt is not None:
            metrics["log10_mmd"] = ev.log10_mmd(X, gt, kernel)
        if target is not None and target.space.size() <= DEFAULT_ENUM_CAP:
            metrics["kl"] = ev.empirical_kl(X, target)
        if target is not None and getattr(target, "modes", None) is not None:
            count, _ = ev.mode_coverage(X, target.modes, ev_cfg.get("mode_radius", 5.0))
            metrics["modes_visited"] = count
        for key, value in metrics.items():
            rows.append([label, key, value])
        summary[label] = metrics
    io.write_csv(
        os.path.join(out, "eval_metrics.csv"),
        "acs.eval.v1",
        _meta(cfg, seed),
        ["trace", "metric", "value"],
        rows,
    )
    io.write_json(os.path.join(out, "eval_summary.json"), dict(_meta(cfg, seed), traces=summary))
    for label, metrics in summary.items():
        print("%s: %s" % (label, ", ".join("%s=%.6g" % (k, v) for k, v in metrics.items())))
    return 0


# ---------------------------------------------------------------- main


_COMMANDS = {
    "tune": cmd_tune,
    "sample": cmd_sample,
    "learn": cmd_learn,
    "theory": cmd_theory,
    "eval": cmd_eval,
}


def main(argv=None):
    parser = argparse.ArgumentParser(prog="acs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0] if fn.__doc__ else None)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output directory")
    args = parser.parse_args(argv)
    try:
        cfg = io.load_config(args.config)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print("config error: %s" % (exc,), file=sys.stderr)
        return 1
    except VerificationError as exc:
        print("verification failure: %s" % (exc,), file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
