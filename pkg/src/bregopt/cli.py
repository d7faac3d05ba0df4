"""Command-line harness: reproducible runs, multi-seed sweeps, and a
one-shot verification battery.

Every run is manifest-driven: all seeds are explicit (no wall-clock entropy),
the full configuration is embedded in every output file, and rerunning the
same configuration reproduces output byte-for-byte.  Per-iteration wallclock
telemetry is therefore opt-in (``--timing``).

Commands
--------
run     execute solvers on a problem, one CSV trace per solver + summary JSON
sweep   as ``run`` over seeds 1..S, plus aggregated mean/CI stats JSON
verify  run the invariant battery (geometry identities, sequence inequalities,
        certificates, regret checks) and exit nonzero on any failure

Exit codes: 0 success, 1 failed verification, 2 bad configuration,
3 solver abort (partial trace retained).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analysis, problems, solvers
from .errors import (BregoptError, NonPositiveGap, SolverAbort)
from .geometry import EntropicGeometry, EuclideanGeometry, LogBarrierGeometry
from .oracle import (NOISE_NONE, NOISE_RESAMPLE, NOISE_SPHERE, Oracle,
                     OracleConfig)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_SOLVER_ABORT = 3

_OUT_ENV = "BREGOPT_OUT"


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

_DEFAULTS = {
    "problem": "fisher",
    "n": 50, "m": 5, "lo": 2.0, "hi": 8.0, "market_seed": 1,
    "d": 10,
    "solvers": "adamir",
    "T": 1000,
    "sigma": 0.0,
    "noise": None,          # auto: none if sigma==0 else sphere
    "rel_width": None,      # set to use the utility-resample channel
    "seed": 1,
    "num_seeds": 2,
    "jobs": 1,
    "gamma_init": 1e-2,
    "out": None,
    "timing": False,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="bregopt",
        description="Bregman-geometry first-order solver benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--problem", choices=["fisher", "synthetic-rc"])
        p.add_argument("--n", type=int, help="fisher: number of buyers")
        p.add_argument("--m", type=int, help="fisher: number of goods")
        p.add_argument("--lo", type=float, help="fisher: utility range low end")
        p.add_argument("--hi", type=float, help="fisher: utility range high end")
        p.add_argument("--market-seed", dest="market_seed", type=int)
        p.add_argument("--d", type=int, help="synthetic-rc: dimension")
        p.add_argument("--solvers",
                       help="comma-separated: adamir | pr | egd:<gamma> | md-decay:<gamma0>")
        p.add_argument("--T", type=int, help="iteration horizon")
        p.add_argument("--sigma", type=float, help="noise level (0 = deterministic)")
        p.add_argument("--noise", choices=[NOISE_NONE, NOISE_SPHERE, NOISE_RESAMPLE])
        p.add_argument("--rel-width", dest="rel_width", type=float,
                       help="fisher-resample relative width in (0,1)")
        p.add_argument("--gamma-init", dest="gamma_init", type=float)
        p.add_argument("--out", help=f"output directory (default ${_OUT_ENV} or ./bregopt-out)")
        p.add_argument("--timing", action="store_true", default=None,
                       help="write per-iteration wallclock (breaks byte reproducibility)")

    p_run = sub.add_parser("run", help="single-seed runs, one trace CSV per solver")
    add_common(p_run)
    p_run.add_argument("--seed", type=int, help="oracle seed")

    p_sweep = sub.add_parser("sweep", help="multi-seed sweep with aggregated stats")
    add_common(p_sweep)
    p_sweep.add_argument("--num-seeds", dest="num_seeds", type=int, help="seeds 1..S")
    p_sweep.add_argument("--jobs", type=int, help="parallel runs")

    p_verify = sub.add_parser("verify", help="run the invariant battery")
    p_verify.add_argument("--quick", action="store_true", help="subsampled battery")
    p_verify.add_argument("--seed", type=int, default=0)
    return parser


def _load_config(args):
    cfg = dict(_DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["noise"] is None:
        cfg["noise"] = NOISE_NONE if cfg["sigma"] == 0 else NOISE_SPHERE
    if cfg["out"] is None:
        cfg["out"] = os.environ.get(_OUT_ENV, "bregopt-out")
    return cfg


def _build_problem(cfg):
    if cfg["problem"] == "fisher":
        mkt = problems.make_random_market(cfg["n"], cfg["m"], cfg["lo"], cfg["hi"],
                                          cfg["market_seed"])
        return problems.fisher_problem(mkt)
    return problems.make_synthetic_rc_problem(cfg["d"])


def _oracle_config(cfg, seed):
    if cfg["noise"] == NOISE_NONE:
        return OracleConfig(sigma=0.0, noise_kind=NOISE_NONE, seed=seed)
    if cfg["noise"] == NOISE_SPHERE:
        return OracleConfig(sigma=cfg["sigma"], noise_kind=NOISE_SPHERE, seed=seed)
    return OracleConfig(sigma=None, noise_kind=NOISE_RESAMPLE, seed=seed,
                        rel_width=cfg["rel_width"] or 0.1)


def _reproduction_config(cfg, seed=None):
    keys = ["problem", "solvers", "T", "sigma", "noise", "gamma_init"]
    if cfg["problem"] == "fisher":
        keys += ["n", "m", "lo", "hi", "market_seed"]
    else:
        keys += ["d"]
    if cfg["noise"] == NOISE_RESAMPLE:
        keys += ["rel_width"]
    repro = {k: cfg[k] for k in keys}
    if seed is not None:
        repro["seed"] = seed
    return repro


def _execute(cfg, problem, spec, seed):
    oracle = Oracle(problem, _oracle_config(cfg, seed))
    if cfg["noise"] == NOISE_RESAMPLE:
        oracle.estimated_sigma()
    trace = solvers.run(spec, problem, oracle=oracle, gamma_init=cfg["gamma_init"])
    trace.meta["config"] = _reproduction_config(cfg, seed)
    return trace


def _trace_summary(trace, problem):
    entry = {
        "solver": trace.meta["solver"],
        "oracle": trace.meta["oracle"],
        "horizon": len(trace),
        "final_f_last": trace.final("f_last"),
        "final_f_avg": trace.final("f_avg"),
    }
    if problem.f_star is not None:
        entry["f_star"] = problem.f_star
        entry["final_gap_last"] = trace.final("f_last") - problem.f_star
        entry["final_gap_avg"] = trace.final("f_avg") - problem.f_star
        for fieldname in ("f_avg_gap", "f_last_gap"):
            try:
                entry[f"rate_{fieldname}"] = analysis.fit_rate(trace, fieldname).as_dict()
            except NonPositiveGap:
                entry[f"rate_{fieldname}"] = "converged-below-float-precision"
            except ValueError:
                entry[f"rate_{fieldname}"] = "trace-too-short"
        if trace.meta.get("rho0_sq") is not None and trace.meta["oracle"]["sigma"] == 0:
            entry["regret_certificate"] = analysis.check_regret_certificate(trace).as_dict()
            entry["divergence_bound"] = analysis.check_divergence_bound(trace).as_dict()
    return entry


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_run(cfg):
    problem = _build_problem(cfg)
    specs = [solvers.SolverSpec.parse(s, cfg["T"]) for s in cfg["solvers"].split(",")]
    os.makedirs(cfg["out"], exist_ok=True)
    summary = {
        "config": _reproduction_config(cfg, cfg["seed"]),
        "problem": problem.name,
        "f_star": problem.f_star,
        "runs": [],
    }
    if problem.market is not None:
        summary["market"] = json.loads(problems.market_to_json(problem.market))
    code = EXIT_OK
    for spec in specs:
        path = os.path.join(cfg["out"], f"trace_{spec.label}_seed{cfg['seed']}.csv")
        try:
            trace = _execute(cfg, problem, spec, cfg["seed"])
        except SolverAbort as exc:
            exc.trace.meta["config"] = _reproduction_config(cfg, cfg["seed"])
            exc.trace.to_csv(path, timing=cfg["timing"])
            print(f"[abort] {spec.label}: {exc}", file=sys.stderr)
            summary["runs"].append({"solver": spec.label, "failed": True,
                                    "failure": str(exc), "trace": os.path.basename(path)})
            code = EXIT_SOLVER_ABORT
            continue
        trace.to_csv(path, timing=cfg["timing"])
        entry = _trace_summary(trace, problem)
        entry["trace"] = os.path.basename(path)
        summary["runs"].append(entry)
        print(f"[run] {spec.label}: T={len(trace)} -> {path}")
    _write_json(os.path.join(cfg["out"], "summary.json"), summary)
    return code


def cmd_sweep(cfg):
    problem = _build_problem(cfg)
    specs = [solvers.SolverSpec.parse(s, cfg["T"]) for s in cfg["solvers"].split(",")]
    seeds = list(range(1, cfg["num_seeds"] + 1))
    os.makedirs(cfg["out"], exist_ok=True)
    summary = {
        "config": _reproduction_config(cfg),
        "problem": problem.name,
        "f_star": problem.f_star,
        "seeds": seeds,
        "runs": [],
    }
    if problem.market is not None:
        summary["market"] = json.loads(problems.market_to_json(problem.market))
    stats = {"config": _reproduction_config(cfg), "f_star": problem.f_star,
             "seeds": seeds, "solvers": {}}
    code = EXIT_OK
    for spec in specs:
        def one(seed):
            trace = _execute(cfg, problem, spec, seed)
            path = os.path.join(cfg["out"], f"trace_{spec.label}_seed{seed}.csv")
            trace.to_csv(path, timing=cfg["timing"])
            return trace
        try:
            if cfg["jobs"] > 1:
                with ThreadPoolExecutor(max_workers=cfg["jobs"]) as pool:
                    traces = list(pool.map(one, seeds))
            else:
                traces = [one(seed) for seed in seeds]
        except SolverAbort as exc:
            print(f"[abort] {spec.label}: {exc}", file=sys.stderr)
            summary["runs"].append({"solver": spec.label, "failed": True,
                                    "failure": str(exc)})
            code = EXIT_SOLVER_ABORT
            continue
        agg = analysis.summarize_multiseed(traces)
        if problem.f_star is not None:
            agg["f_star"] = problem.f_star
        stats["solvers"][spec.label] = agg
        entry = {
            "solver": spec.label,
            "num_seeds": len(seeds),
            "mean_final_f_last": float(np.mean([t.final("f_last") for t in traces])),
            "mean_final_f_avg": float(np.mean([t.final("f_avg") for t in traces])),
        }
        summary["runs"].append(entry)
        print(f"[sweep] {spec.label}: {len(seeds)} seeds x T={cfg['T']}")
    _write_json(os.path.join(cfg["out"], "sweep_stats.json"), stats)
    _write_json(os.path.join(cfg["out"], "summary.json"), summary)
    return code


# ---------------------------------------------------------------------------
# Verification battery
# ---------------------------------------------------------------------------

def _verify_geometry_identities(samples, rng):
    geoms = [EuclideanGeometry(6), EntropicGeometry(6), EntropicGeometry(6, rows=2),
             LogBarrierGeometry(6)]
    worst = 0.0
    for geom in geoms:
        for _ in range(samples):
            p, x, y = (geom.random_point(rng) for _ in range(3))
            lhs = geom.divergence(p, y)
            rhs = (geom.divergence(p, x) + geom.divergence(x, y)
                   + float(np.dot(geom.grad_h(y) - geom.grad_h(x), x - p)))
            worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
            v = 0.1 * rng.standard_normal(geom.dimension)
            if geom.kind == "log-barrier":
                v = np.minimum(v, 0.5 / x)  # keep the prox inside the orthant
            direct = geom.prox(x, v)
            via_mirror = geom.mirror(geom.grad_h(x) + v)
            worst = max(worst, float(np.max(np.abs(direct - via_mirror))))
    return worst <= 1e-9, f"max deviation {worst:.3e} (tol 1e-9)"


def _verify_sequence_lemmas(samples, seed):
    report = analysis.check_sequence_lemmas(samples=samples, seed=seed)
    return True, f"{report['samples']} sequences"


def _verify_fisher_gradient(samples, rng):
    mkt = problems.make_random_market(6, 4, 2, 8, seed=11)
    geom = problems.fisher_geometry(mkt)
    eps = 1e-6
    worst = 0.0
    for _ in range(samples):
        b = geom.random_point(rng)
        g = problems.fisher_gradient(mkt, b)
        for idx in rng.integers(0, b.size, size=4):
            e = np.zeros(b.size)
            e[idx] = eps
            fd = (problems.fisher_objective(mkt, b + e)
                  - problems.fisher_objective(mkt, b - e)) / (2 * eps)
            worst = max(worst, abs(g[idx] - fd))
    return worst <= 1e-5, f"max |grad - fd| = {worst:.3e} (tol 1e-5)"


def _verify_certificates(samples):
    mkt = problems.make_random_market(8, 4, 2, 8, seed=5)
    problems.fisher_rs_certificate(mkt, 1.0, samples=samples, seed=1)
    problems.make_synthetic_rc_problem(8, certificate_samples=samples)
    return True, "RS(L=1) and RC(G) sampled certificates hold"


def _verify_pr_egd(samples, rng):
    worst = 0.0
    for k in range(samples):
        mkt = problems.make_random_market(int(rng.integers(2, 7)), int(rng.integers(2, 6)),
                                          2, 8, seed=100 + k)
        b = problems.fisher_geometry(mkt).random_point(rng)
        worst = max(worst, float(np.max(np.abs(
            solvers.pr_step(mkt, b) - solvers.egd_step(mkt, b, 1.0)))))
    return worst <= 1e-12, f"max |pr - egd(1)| = {worst:.3e} (tol 1e-12)"


def _verify_run_certificates(horizon):
    mkt = problems.make_random_market(10, 4, 2, 8, seed=3)
    fisher = problems.fisher_problem(mkt)
    rc = problems.make_synthetic_rc_problem(8)
    details = []
    for prob in (fisher, rc):
        trace = solvers.run(solvers.SolverSpec("adamir", horizon), prob)
        gammas = trace.column("gamma")
        if np.any(np.diff(gammas) > 1e-15):
            return False, f"step-size not nonincreasing on {prob.name}"
        analysis.check_step_identity(trace)
        rep = analysis.check_regret_certificate(trace)
        div = analysis.check_divergence_bound(trace)
        if not (rep.passed and div.passed):
            return False, f"certificate failed on {prob.name}"
        details.append(f"{prob.name} ok")
    return True, "; ".join(details)


def cmd_verify(quick=False, seed=0):
    rng = np.random.default_rng(seed)
    scale = 1 if quick else 10
    checks = [
        ("geometry-identities", lambda: _verify_geometry_identities(100 * scale, rng)),
        ("sequence-lemmas", lambda: _verify_sequence_lemmas(1000 * scale, seed)),
        ("fisher-gradient-fd", lambda: _verify_fisher_gradient(25 * scale, rng)),
        ("regularity-certificates", lambda: _verify_certificates(100 * scale)),
        ("pr-equals-egd1", lambda: _verify_pr_egd(10 * scale, rng)),
        ("run-certificates", lambda: _verify_run_certificates(200 * scale)),
    ]
    failures = 0
    print(f"{'check':28s} {'status':8s} detail")
    for name, fn in checks:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except BregoptError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        status = "pass" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{name:28s} {status:8s} {detail}  [{time.perf_counter() - t0:.2f}s]")
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    print("all checks passed")
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(quick=args.quick, seed=args.seed)
        cfg = _load_config(args)
        if args.command == "run":
            return cmd_run(cfg)
        return cmd_sweep(cfg)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
