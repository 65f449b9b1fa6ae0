"""Monte Carlo evaluation of the ordered-transmission protocol.

Runs are split into fixed blocks of :data:`rng.BLOCK_SIZE`; block ``b`` draws
from the stream ``(seed, RUNS, b)``, so results do not depend on the number of
workers. Each run draws its hypothesis from the priors, samples one
observation vector, and passes its local statistics through the protocol.
"""

from __future__ import annotations

import copy
import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from . import rng as rngmod
from .bounds import BoundReport, bound_report, theorem3_limit
from .errors import ConfigError, EquivalenceViolation
from .graph import graph_from_config
from .model import (
    Hypothesis,
    assemble_global,
    check_priors,
    make_chain_scenario,
    make_tree_scenario,
    tree_lambda_min,
)
from .protocol import run_batch, run_ordered
from .statistic import bayes_threshold, build_local_set, centralized_stats, coefficients_for, local_stats

CSV_SCHEMA = "# ordered-ggm results v1"
CSV_COLUMNS = [
    "config_id", "K", "scale", "lambda_min", "n_runs", "avg_saved", "frac_saved",
    "bound", "bound_stderr", "error_rate", "seed",
]
HIST_SCHEMA = "# ordered-ggm stop-histogram v1"
HIST_COLUMNS = ["config_id", "K", "stop_index", "count"]


@dataclass
class ExperimentConfig:
    scenario: dict
    coefficients: dict | None = None
    priors: tuple = (0.5, 0.5)
    n_runs: int = 20000
    seed: int = 0
    eta: float = 1.0
    stratified: bool = False
    n_bound_samples: int | None = None
    config_id: str = "run"

    def __post_init__(self):
        self.priors = check_priors(self.priors)
        if int(self.n_runs) < 1:
            raise ConfigError("experiment: n_runs must be >= 1")
        if int(self.seed) < 0:
            raise ConfigError("experiment: seed must be non-negative")
        if not self.eta > 0:
            raise ConfigError("experiment: eta must be positive")
        if self.scenario.get("generator") not in ("chain", "tree", "explicit"):
            raise ConfigError(f"experiment: unknown scenario generator {self.scenario.get('generator')!r}")

    @classmethod
    def from_dict(cls, d):
        keys = {"scenario", "coefficients", "priors", "n_runs", "seed", "eta",
                "stratified", "n_bound_samples", "config_id"}
        return cls(**{k: v for k, v in d.items() if k in keys})

    def replace(self, **scenario_updates):
        new = copy.deepcopy(self)
        new.scenario.update(scenario_updates)
        return new

    @property
    def K(self):
        return scenario_K(self.scenario)


def scenario_K(spec):
    if spec["generator"] == "explicit":
        g = spec["graph"]
        if "chain" in g:
            return g["chain"]["k"]
        if "tree" in g:
            return g["tree"]["k"]
        return len(g["cliques"])
    return spec["k"]


def build_scenario(spec, priors=(0.5, 0.5), seed=0):
    gen = spec["generator"]
    if gen == "chain":
        return make_chain_scenario(spec["k"], spec.get("m", 5), spec["alpha"], priors, spec.get("seed", seed))
    if gen == "tree":
        return make_tree_scenario(spec["k"], spec["x"], priors, seed)
    graph = graph_from_config(spec["graph"])
    covs = spec["clique_covs"]
    if covs == "identity":
        covs = [np.eye(len(c)) for c in graph.cliques]
    return assemble_global(graph, [np.asarray(c, dtype=float) for c in covs], priors, label="explicit")


def scenario_scale(spec):
    return {"chain": spec.get("alpha"), "tree": spec.get("x")}.get(spec["generator"], float("nan"))


@dataclass
class ExperimentResult:
    config_id: str
    K: int
    scale: float
    lambda_min: float
    n_runs: int
    seed: int
    avg_saved: float
    saved_stderr: float
    frac_saved: float
    error_rate: float
    centralized_error_rate: float
    bound: BoundReport | None
    per_hypothesis: dict
    stop_histogram: list
    degenerate: bool
    backend: str
    wall_time: float = field(default=0.0, compare=False)

    @property
    def bound_value(self):
        return self.bound.ks_lower if self.bound is not None else 0.0

    @property
    def bound_stderr(self):
        return self.bound.ks_lower_stderr if self.bound is not None else 0.0

    @property
    def combined_stderr(self):
        return math.hypot(self.saved_stderr, self.bound_stderr)

    def csv_row(self):
        return [
            self.config_id, self.K, _fmt(self.scale), _fmt(self.lambda_min), self.n_runs,
            _fmt(self.avg_saved), _fmt(self.frac_saved), _fmt(self.bound_value),
            _fmt(self.bound_stderr), _fmt(self.error_rate), self.seed,
        ]

    def to_dict(self):
        d = {k: getattr(self, k) for k in (
            "config_id", "K", "scale", "lambda_min", "n_runs", "seed", "avg_saved",
            "saved_stderr", "frac_saved", "error_rate", "centralized_error_rate",
            "per_hypothesis", "stop_histogram", "degenerate", "backend", "wall_time")}
        d["bound"] = self.bound.to_dict() if self.bound is not None else None
        return d


def _fmt(v):
    if v is None:
        return "nan"
    return repr(float(v))


def _block_hypotheses(rng, start, stop, pi1, stratified):
    if stratified:
        r = np.arange(start, stop)
        return (np.floor((r + 1) * pi1) > np.floor(r * pi1)).astype(np.int8)
    return (rng.random(stop - start) < pi1).astype(np.int8)


def _run_block(ctx, block):
    b, start, stop = block
    scenario, lset, cfg, tau = ctx
    rng = rngmod.stream(cfg.seed, rngmod.RUNS, b)
    hyp = _block_hypotheses(rng, start, stop, scenario.priors[1], cfg.stratified)
    x = rng.standard_normal((stop - start, scenario.n_nodes))
    h1 = hyp == 1
    x[h1] = x[h1] @ scenario.chol.T
    values = local_stats(lset, x)
    stops, dec = run_batch(values, tau)
    central = (centralized_stats(scenario, x) >= 2.0 * tau).astype(np.int8)
    return hyp, stops, dec, central, values


def run_experiment(config, workers=1, trace_sink=None):
    """Simulate ``config.n_runs`` protocol runs and compare against the bound.

    ``trace_sink``, when given, is called with one trace dict per run in run
    order. Raises :class:`EquivalenceViolation` if any ordered decision
    differs from the centralized one.
    """
    t0 = time.perf_counter()
    scenario = build_scenario(config.scenario, config.priors, config.seed)
    K = scenario.K
    coeffs = coefficients_for(K, config.coefficients)
    lset = build_local_set(scenario, coeffs)
    tau = bayes_threshold(scenario.priors)
    n = int(config.n_runs)
    ctx = (scenario, lset, config, tau)

    blocks = rngmod.blocks(n)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda blk: _run_block(ctx, blk), blocks))
    else:
        parts = [_run_block(ctx, blk) for blk in blocks]

    hyp = np.concatenate([p[0] for p in parts])
    stops = np.concatenate([p[1] for p in parts])
    dec = np.concatenate([p[2] for p in parts])
    central = np.concatenate([p[3] for p in parts])

    bad = np.flatnonzero(dec != central)
    if bad.size:
        raise EquivalenceViolation(
            f"experiment: ordered and centralized decisions differ in {bad.size} run(s), first at run {bad[0]}"
        )

    if trace_sink is not None:
        run = 0
        for p in parts:
            for row, h in zip(p[4], p[0]):
                d = run_ordered(row, tau, config.eta).to_dict()
                d["run"] = run
                d["hypothesis"] = Hypothesis(int(h)).name
                trace_sink(d)
                run += 1

    saved = (K - stops).astype(float)
    per_h = {}
    for h in Hypothesis:
        m = hyp == h
        per_h[h.name] = {
            "n": int(m.sum()),
            "avg_saved": float(saved[m].mean()) if m.any() else float("nan"),
            "error_rate": float((dec[m] != h).mean()) if m.any() else float("nan"),
        }

    bound = None
    if K > 1:
        bound = bound_report(lset, scenario, int(config.n_bound_samples or n), config.seed)

    degenerate = all(np.max(np.abs(j)) < 1e-12 for j in lset.J) and all(abs(e) < 1e-12 for e in lset.e)
    lam = tree_lambda_min(config.scenario["x"]) if config.scenario["generator"] == "tree" else scenario.lambda_min

    avg = float(saved.mean())
    return ExperimentResult(
        config_id=config.config_id,
        K=K,
        scale=scenario_scale(config.scenario),
        lambda_min=float(lam),
        n_runs=n,
        seed=int(config.seed),
        avg_saved=avg,
        saved_stderr=float(saved.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
        frac_saved=avg / K,
        error_rate=float((dec != hyp).mean()),
        centralized_error_rate=float((central != hyp).mean()),
        bound=bound,
        per_hypothesis=per_h,
        stop_histogram=[int(c) for c in np.bincount(stops, minlength=K + 1)[1:]],
        degenerate=bool(degenerate),
        backend=kernels.BACKEND,
        wall_time=time.perf_counter() - t0,
    )


def sweep_k(base_config, k_values, workers=1):
    """One experiment per cluster count; gamma schedules are rescaled to
    ``0.5 / (2^K - 1)`` for each ``K``."""
    if base_config.scenario["generator"] == "explicit":
        raise ConfigError("experiment: sweep_k needs a chain or tree generator")
    coeffs = base_config.coefficients
    if coeffs is not None and "alpha" in coeffs:
        raise ConfigError("experiment: sweep_k cannot rescale an explicit alpha list")
    out = []
    for k in k_values:
        if int(k) < 2:
            raise ConfigError(f"experiment: sweep_k needs K >= 2, got {k}")
        cfg = base_config.replace(k=int(k))
        cfg.coefficients = {"gamma": "auto"}
        out.append(run_experiment(cfg, workers=workers))
    return out


def sweep_eigenvalue(base_config, scale_values, workers=1):
    """One experiment per eigenvalue scale (``alpha`` for chains, ``x`` for trees)."""
    gen = base_config.scenario["generator"]
    key = {"chain": "alpha", "tree": "x"}.get(gen)
    if key is None:
        raise ConfigError("experiment: sweep_eigenvalue needs a chain or tree generator")
    out = []
    for s in scale_values:
        if not float(s) > 0:
            raise ConfigError(f"experiment: scales must be positive, got {s}")
        out.append(run_experiment(base_config.replace(**{key: float(s)}), workers=workers))
    return out


def results_csv(results):
    buf = io.StringIO()
    buf.write(CSV_SCHEMA + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow(r.csv_row())
    return buf.getvalue()


def histogram_csv(results):
    buf = io.StringIO()
    buf.write(HIST_SCHEMA + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HIST_COLUMNS)
    for r in results:
        for i, c in enumerate(r.stop_histogram, start=1):
            w.writerow([r.config_id, r.K, i, c])
    return buf.getvalue()


def sweep_k_dat(results):
    """Whitespace-separated data for plotting saved transmissions against K."""
    lines = ["# K avg_saved bound ceil(K/2)-1"]
    for r in results:
        ref = theorem3_limit(r.K) if r.K > 1 else 0.0
        lines.append(f"{r.K} {_fmt(r.avg_saved)} {_fmt(r.bound_value)} {_fmt(ref)}")
    return "\n".join(lines) + "\n"


def sweep_eig_dat(results):
    lines = ["# scale lambda_min frac_saved bound_frac"]
    for r in results:
        lines.append(f"{_fmt(r.scale)} {_fmt(r.lambda_min)} {_fmt(r.frac_saved)} {_fmt(r.bound_value / r.K)}")
    return "\n".join(lines) + "\n"
