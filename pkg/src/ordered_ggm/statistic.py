"""Local log-likelihood ratios and the centralized Bayes test.

The centralized statistic ``T(x) = x'x - x' Sigma^-1 x - log det Sigma`` splits
into per-cluster terms ``L_k(x) = x_Ck' J_k x_Ck - e_k``. Each separator term
``[I - Sigma_Sk^-1]`` is shared between clique ``k`` (weight ``alpha_k``) and its
owner clique ``q(k)`` (weight ``beta_k``), with ``alpha_k + beta_k = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, GammaOutOfRange
from .graph import zero_fill
from .model import Hypothesis, check_priors, logdet

Decision = Hypothesis


@dataclass(frozen=True)
class SplitCoefficients:
    """Separator weights ``alpha_k``/``beta_k`` keyed by ``k = 2..K``."""

    alpha: dict
    beta: dict
    gamma: float | None = None

    @property
    def K(self):
        return len(self.alpha) + 1

    def validate(self, K=None):
        if K is not None and len(self.alpha) != K - 1:
            raise DimensionMismatch(f"statistic: coefficients cover K={self.K}, scenario has K={K}")
        if set(self.alpha) != set(range(2, self.K + 1)) or set(self.beta) != set(self.alpha):
            raise DimensionMismatch("statistic: coefficients must be keyed by k = 2..K")
        for k in self.alpha:
            if abs(self.alpha[k] + self.beta[k] - 1.0) > 1e-12:
                raise DimensionMismatch(f"statistic: alpha_{k} + beta_{k} != 1")
        return self


def gamma_upper(K):
    return 1.0 / (2.0 ** (K - 1) - 1.0)


def gamma_schedule(K, gamma):
    """``alpha_k = 1 - 2^(K-k) gamma``, ``beta_k = 2^(K-k) gamma``.

    Requires ``0 < gamma < 1 / (2^(K-1) - 1)``.
    """
    if K < 2:
        raise GammaOutOfRange("statistic: the gamma schedule needs K >= 2")
    if not 0.0 < gamma < gamma_upper(K):
        raise GammaOutOfRange(f"statistic: gamma={gamma} outside (0, {gamma_upper(K)}) for K={K}")
    beta = {k: 2.0 ** (K - k) * gamma for k in range(2, K + 1)}
    alpha = {k: 1.0 - b for k, b in beta.items()}
    return SplitCoefficients(alpha, beta, float(gamma))


def explicit_schedule(alphas):
    """Coefficients from ``[alpha_2, ..., alpha_K]``; ``beta_k = 1 - alpha_k``."""
    alpha = {k: float(a) for k, a in enumerate(alphas, start=2)}
    return SplitCoefficients(alpha, {k: 1.0 - a for k, a in alpha.items()})


def empty_schedule():
    return SplitCoefficients({}, {})


def default_gamma(K):
    return 0.5 / (2.0 ** K - 1.0)


def coefficients_for(K, spec=None):
    """Resolve a config fragment: ``{"gamma": g}``, ``{"gamma": "auto"}`` or
    ``{"alpha": [...]}``. ``"auto"`` (and ``None``) picks ``0.5 / (2^K - 1)``."""
    if K == 1:
        return empty_schedule()
    spec = spec or {"gamma": "auto"}
    if "alpha" in spec:
        c = explicit_schedule(spec["alpha"])
        return c.validate(K)
    g = spec.get("gamma", "auto")
    return gamma_schedule(K, default_gamma(K) if g == "auto" else float(g))


@dataclass(frozen=True, eq=False)
class LocalStatisticSet:
    J: tuple
    e: tuple
    coeffs: SplitCoefficients
    scenario: object = field(repr=False)

    @property
    def K(self):
        return len(self.J)


def build_local_set(scenario, coeffs=None):
    """Compute ``J_k`` and ``e_k`` for every cluster."""
    g = scenario.graph
    K = g.K
    if coeffs is None:
        coeffs = coefficients_for(K)
    coeffs.validate(K)

    J, e = [], []
    for k in range(1, K + 1):
        ck = g.clique(k)
        cov = scenario.clique_covs[k - 1]
        jk = np.eye(len(ck)) - np.linalg.inv(cov)
        ek = logdet(cov)
        terms = [(j, coeffs.beta[j]) for j in g.q_sets[k]]
        if k >= 2:
            terms.append((k, coeffs.alpha[k]))
        for j, w in terms:
            sj = g.separator(j)
            if not sj:
                continue
            scov = scenario.sep_covs[j - 2]
            jk -= w * zero_fill(np.eye(len(sj)) - np.linalg.inv(scov), sj, ck)
            ek -= w * logdet(scov)
        J.append(0.5 * (jk + jk.T))
        e.append(float(ek))
    return LocalStatisticSet(tuple(J), tuple(e), coeffs, scenario)


def local_stat(lset, k, x):
    """``L_k(x) = x_Ck' J_k x_Ck - e_k``."""
    if not 1 <= k <= lset.K:
        raise IndexError(f"cluster index {k} outside 1..{lset.K}")
    xc = np.asarray(x, dtype=float)[lset.scenario.graph.clique_index(k)]
    return float(xc @ lset.J[k - 1] @ xc - lset.e[k - 1])


def local_stats(lset, X):
    """All ``L_k`` for a batch of observations: ``(n, N) -> (n, K)``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    g = lset.scenario.graph
    out = np.empty((X.shape[0], lset.K))
    for k in range(1, lset.K + 1):
        xc = X[:, g.clique_index(k)]
        out[:, k - 1] = np.einsum("ij,ij->i", xc @ lset.J[k - 1], xc) - lset.e[k - 1]
    return out


def centralized_stats(scenario, X):
    """``T(x)`` for each row of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != scenario.n_nodes:
        raise DimensionMismatch(f"statistic: observation length {X.shape[1]} != N={scenario.n_nodes}")
    quad = np.einsum("ij,ij->i", X, X) - np.einsum("ij,ij->i", X @ scenario.global_precision, X)
    return quad - scenario.logdet_cov


def centralized_stat(scenario, x):
    return float(centralized_stats(scenario, x)[0])


def bayes_threshold(priors):
    """``tau = ln(pi0 / pi1)``; the test compares ``T`` against ``2 tau``."""
    p0, p1 = check_priors(priors)
    return math.log(p0 / p1)


def decide(t, tau):
    """H1 iff ``t >= 2 tau``."""
    return Decision.H1 if t >= 2.0 * tau else Decision.H0


def centralized_decide(scenario, x):
    return decide(centralized_stat(scenario, x), bayes_threshold(scenario.priors))
