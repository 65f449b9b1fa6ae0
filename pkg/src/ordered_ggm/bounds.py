"""Lower bounds on the average number of transmissions saved.

For ``K > 1`` clusters and any separator split,

    K_s >= max{0, c * (pi1 * sum_k P_D,k + pi0 * sum_k (1 - P_f,k) - (K - 1))}

with ``c = ceil(K/2) - 1``, ``P_D,k = Pr(L_k > delta1 | H1)`` and
``P_f,k = 1 - Pr(L_k <= delta0 | H0)``. The per-cluster probabilities are
estimated by Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import rng as rngmod
from .errors import BadK
from .model import check_priors, logdet
from .statistic import bayes_threshold, local_stats


@dataclass(frozen=True)
class BoundReport:
    K: int
    delta0: float
    delta1: float
    pd: tuple
    pd_stderr: tuple
    pf: tuple
    pf_stderr: tuple
    ks_lower: float
    ks_lower_stderr: float
    ks_limit: float
    n_samples: int
    seed: int

    def to_dict(self):
        return asdict(self)


def deltas(tau):
    """``(min{2 tau, 0}, max{2 tau, 0})``."""
    return min(2.0 * tau, 0.0), max(2.0 * tau, 0.0)


def theorem3_limit(K):
    """``ceil(K/2) - 1``."""
    if K <= 1:
        raise BadK(f"bounds: K must exceed 1, got {K}")
    return float(math.ceil(K / 2) - 1)


def _inner(pd, pf, K, priors):
    # pi1*sum(pd) + pi0*sum(1-pf) - (K-1), rearranged with pi0 + pi1 = 1 so that
    # perfect probabilities give exactly 1
    p0, p1 = check_priors(priors)
    miss = K - float(np.sum(pd))
    false_alarm = K - float(np.sum(1.0 - np.asarray(pf, dtype=float)))
    return 1.0 - p1 * miss - p0 * false_alarm


def theorem2_bound(pd, pf, K, priors):
    """Clamped lower bound on the average number of transmissions saved."""
    if K <= 1:
        raise BadK(f"bounds: K must exceed 1, got {K}")
    if len(pd) != K or len(pf) != K:
        raise BadK(f"bounds: need K={K} detection and false-alarm probabilities")
    return max(0.0, theorem3_limit(K) * _inner(pd, pf, K, priors))


def _draw_local(lset, scenario, n, seed, purpose, chol):
    """Local statistics for ``n`` draws, generated block by block."""
    out = np.empty((n, lset.K))
    for b, start, stop in rngmod.blocks(n):
        z = rngmod.stream(seed, purpose, b).standard_normal((stop - start, scenario.n_nodes))
        x = z if chol is None else z @ chol.T
        out[start:stop] = local_stats(lset, x)
    return out


def estimate_pd_pf(lset, scenario, n, seed):
    """Monte Carlo estimates of ``P_D,k(delta1)`` and ``P_f,k(delta0)``.

    Returns ``(pd, pf, stderrs)`` where ``stderrs`` holds the binomial standard
    errors of each estimate and of the two per-draw counts used in the bound.
    """
    if n < 1:
        raise ValueError("bounds: need n >= 1 samples")
    d0, d1 = deltas(bayes_threshold(scenario.priors))
    l1 = _draw_local(lset, scenario, n, seed, rngmod.BOUND_H1, scenario.chol)
    l0 = _draw_local(lset, scenario, n, seed, rngmod.BOUND_H0, None)
    hit1 = l1 > d1
    hit0 = l0 <= d0
    pd = hit1.mean(axis=0)
    pf = 1.0 - hit0.mean(axis=0)
    # per-draw sums keep the cross-cluster correlation in the bound's error
    c1 = hit1.sum(axis=1)
    c0 = hit0.sum(axis=1)
    stderrs = {
        "pd": np.sqrt(pd * (1.0 - pd) / n),
        "pf": np.sqrt(pf * (1.0 - pf) / n),
        "sum_pd": float(c1.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
        "sum_1mpf": float(c0.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
    }
    return pd, pf, stderrs


def bound_report(lset, scenario, n, seed):
    K = lset.K
    tau = bayes_threshold(scenario.priors)
    d0, d1 = deltas(tau)
    pd, pf, se = estimate_pd_pf(lset, scenario, n, seed)
    if K > 1:
        p0, p1 = scenario.priors
        c = theorem3_limit(K)
        ks = theorem2_bound(pd, pf, K, scenario.priors)
        ks_se = c * math.hypot(p1 * se["sum_pd"], p0 * se["sum_1mpf"])
        limit = c
    else:
        ks, ks_se, limit = 0.0, 0.0, 0.0
    return BoundReport(
        K=K, delta0=d0, delta1=d1,
        pd=tuple(map(float, pd)), pd_stderr=tuple(map(float, se["pd"])),
        pf=tuple(map(float, pf)), pf_stderr=tuple(map(float, se["pf"])),
        ks_lower=float(ks), ks_lower_stderr=float(ks_se), ks_limit=limit,
        n_samples=int(n), seed=int(seed),
    )


def kl_per_clique(scenario):
    """``KL(N(0, I) || N(0, Sigma_Ck)) = (log det Sigma_Ck + tr Sigma_Ck^-1 - M_k) / 2``."""
    return [
        0.5 * (logdet(c) + float(np.trace(np.linalg.inv(c))) - c.shape[0])
        for c in scenario.clique_covs
    ]


def jk_spectrum_report(lset):
    """``(min_eig, max_eig, is_pd)`` of every ``J_k``; diagnostic only."""
    report = []
    for j in lset.J:
        w = np.linalg.eigvalsh(j)
        report.append((float(w[0]), float(w[-1]), bool(w[0] > 0)))
    return report
