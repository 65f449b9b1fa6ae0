"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 model/numerical error,
4 internal assertion (ordered and centralized decisions disagree).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources
from pathlib import Path

import jsonschema

from . import kernels
from . import rng as rngmod
from .bounds import bound_report, jk_spectrum_report, kl_per_clique
from .errors import ConfigError, InternalError, ModelError
from .experiment import (
    ExperimentConfig,
    build_scenario,
    histogram_csv,
    results_csv,
    run_experiment,
    sweep_eig_dat,
    sweep_eigenvalue,
    sweep_k,
    sweep_k_dat,
)
from .statistic import build_local_set, centralized_stat, coefficients_for, local_stats

log = logging.getLogger("ordered_ggm")


def load_schema():
    return json.loads(resources.files("ordered_ggm").joinpath("schema/config.schema.json").read_text())


def load_config(path, overrides=None):
    """Read, schema-check and apply CLI overrides to a JSON config file."""
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"cli: config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cli: {path} is not valid JSON ({exc})") from None
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    try:
        jsonschema.validate(raw, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"cli: config field {where}: {exc.message}") from None
    return ExperimentConfig.from_dict(raw)


def _parse_list(text, cast):
    try:
        return [cast(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON experiment configuration")
    common.add_argument("--output-dir", default=".", help="directory for CSV/JSON outputs (default: .)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")

    runs = argparse.ArgumentParser(add_help=False)
    runs.add_argument("--n-runs", type=int, help="override the number of Monte Carlo runs")
    runs.add_argument("--eta", type=float, help="override the timer scale eta")
    runs.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                      help="parallel workers for the run loop (default: all CPUs)")

    p = argparse.ArgumentParser(prog="ordered-ggm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check a config and print the model structure")

    s = sub.add_parser("simulate", parents=[common, runs], help="run one Monte Carlo experiment")
    s.add_argument("--dump-traces", action="store_true", help="write per-run protocol traces to traces.jsonl")

    s = sub.add_parser("sweep-k", parents=[common, runs], help="sweep the number of clusters")
    s.add_argument("--k-values", required=True, type=lambda t: _parse_list(t, int),
                   help="comma-separated cluster counts, e.g. 3,7,15,31")

    s = sub.add_parser("sweep-eig", parents=[common, runs], help="sweep the eigenvalue scale")
    s.add_argument("--scales", required=True, type=lambda t: _parse_list(t, float),
                   help="comma-separated alpha (chain) or x (tree) values")

    s = sub.add_parser("bound", parents=[common], help="estimate per-cluster probabilities and the lower bound")
    s.add_argument("--n-samples", type=int, help="Monte Carlo draws per hypothesis (default: n_runs)")

    s = sub.add_parser("decompose", parents=[common], help="print local statistics for one observation")
    s.add_argument("--x-from-seed", type=int, required=True, help="seed of the observation draw")
    s.add_argument("--hypothesis", choices=["H0", "H1"], default="H1", help="hypothesis to draw under")
    return p


def _write(outdir, name, text):
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / name).write_text(text)
    log.info("wrote %s", outdir / name)


def _summary(results):
    head = f"{'config_id':<14}{'K':>4}{'scale':>10}{'lam_min':>10}{'runs':>8}{'saved':>9}{'frac':>8}{'bound':>9}{'err':>8}"
    print(head)
    print("-" * len(head))
    for r in results:
        print(f"{r.config_id:<14}{r.K:>4}{r.scale:>10.4g}{r.lambda_min:>10.4g}{r.n_runs:>8}"
              f"{r.avg_saved:>9.3f}{r.frac_saved:>8.3f}{r.bound_value:>9.3f}{r.error_rate:>8.4f}")
        if r.degenerate:
            print(f"  note: {r.config_id} is degenerate (all local statistics vanish)")


def cmd_validate(cfg, args):
    scenario = build_scenario(cfg.scenario, cfg.priors, cfg.seed)
    lset = build_local_set(scenario, coefficients_for(scenario.K, cfg.coefficients))
    g = scenario.graph
    print(f"valid: K={g.K} cliques, N={g.n_nodes} nodes, lambda_min={scenario.lambda_min:.6g}")
    for k in range(2, g.K + 1):
        print(f"  S_{k}={list(g.separator(k))} q({k})={g.q_map[k]}")
    for k, (lo, hi, pd) in enumerate(jk_spectrum_report(lset), start=1):
        log.info("J_%d eig in [%.4g, %.4g] pd=%s", k, lo, hi, pd)
    return 0


def cmd_simulate(cfg, args):
    outdir = Path(args.output_dir)
    traces = []
    sink = traces.append if args.dump_traces else None
    r = run_experiment(cfg, workers=args.workers, trace_sink=sink)
    _write(outdir, "results.csv", results_csv([r]))
    _write(outdir, "stop_histogram.csv", histogram_csv([r]))
    _write(outdir, "result.json", json.dumps(r.to_dict(), indent=2) + "\n")
    if args.dump_traces:
        _write(outdir, "traces.jsonl", "".join(json.dumps(t) + "\n" for t in traces))
    _summary([r])
    return 0


def cmd_sweep_k(cfg, args):
    outdir = Path(args.output_dir)
    results = sweep_k(cfg, args.k_values, workers=args.workers)
    _write(outdir, "sweep_k.csv", results_csv(results))
    _write(outdir, "sweep_k_hist.csv", histogram_csv(results))
    _write(outdir, "sweep_k.dat", sweep_k_dat(results))
    _summary(results)
    return 0


def cmd_sweep_eig(cfg, args):
    outdir = Path(args.output_dir)
    results = sweep_eigenvalue(cfg, args.scales, workers=args.workers)
    _write(outdir, "sweep_eig.csv", results_csv(results))
    _write(outdir, "sweep_eig_hist.csv", histogram_csv(results))
    _write(outdir, "sweep_eig.dat", sweep_eig_dat(results))
    _summary(results)
    return 0


def cmd_bound(cfg, args):
    scenario = build_scenario(cfg.scenario, cfg.priors, cfg.seed)
    lset = build_local_set(scenario, coefficients_for(scenario.K, cfg.coefficients))
    rep = bound_report(lset, scenario, args.n_samples or cfg.n_runs, cfg.seed)
    d = rep.to_dict()
    d["kl_per_clique"] = kl_per_clique(scenario)
    _write(Path(args.output_dir), "bound.json", json.dumps(d, indent=2) + "\n")
    print(f"K={rep.K} delta0={rep.delta0:g} delta1={rep.delta1:g}")
    print(f"sum P_D={sum(rep.pd):.4f} sum (1-P_f)={sum(1 - p for p in rep.pf):.4f}")
    print(f"lower bound K_s >= {rep.ks_lower:.4f} (+/- {rep.ks_lower_stderr:.4f}), limit {rep.ks_limit:g}")
    return 0


def cmd_decompose(cfg, args):
    scenario = build_scenario(cfg.scenario, cfg.priors, cfg.seed)
    lset = build_local_set(scenario, coefficients_for(scenario.K, cfg.coefficients))
    rng = rngmod.stream(args.x_from_seed, rngmod.DECOMPOSE)
    x = rng.standard_normal(scenario.n_nodes)
    if args.hypothesis == "H1":
        x = scenario.chol @ x
    values = local_stats(lset, x)[0]
    total = float(values.sum())
    t = centralized_stat(scenario, x)
    for k, v in enumerate(values, start=1):
        print(f"L_{k} = {v:.12g}")
    match = abs(t - total) <= 1e-8 * (1 + abs(t))
    print(f"sum L_k = {total:.12g}")
    print(f"T(x)    = {t:.12g}")
    print(f"match   = {match}")
    return 0 if match else 4


COMMANDS = {
    "validate": cmd_validate,
    "simulate": cmd_simulate,
    "sweep-k": cmd_sweep_k,
    "sweep-eig": cmd_sweep_eig,
    "bound": cmd_bound,
    "decompose": cmd_decompose,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = {"seed": args.seed, "n_runs": getattr(args, "n_runs", None), "eta": getattr(args, "eta", None)}
    try:
        if getattr(args, "workers", 1) < 1:
            raise ConfigError("cli: --workers must be >= 1")
        cfg = load_config(args.config, overrides)
        print(f"seed={cfg.seed} backend={kernels.BACKEND}")
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 3
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
