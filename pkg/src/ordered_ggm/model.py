"""Gaussian models on decomposable graphs.

Under H1 the observation vector is ``N(0, Sigma)`` where ``Sigma`` is the
unique Markov-consistent covariance whose clique marginals are the supplied
``Sigma_Ck``; under H0 it is ``N(0, I)``. The global precision is assembled
clique by clique and inverted once.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import rng as rngmod
from .errors import (
    BadPriors,
    CholeskyFailure,
    DegenerateInput,
    DimensionMismatch,
    InconsistentSeparator,
    NotSpd,
)
from .graph import DecomposableGraph, binary_tree_graph, chain_graph

PD_TOL = 1e-10
SEP_TOL = 1e-8
MAX_RETRIES = 32


class Hypothesis(enum.IntEnum):
    H0 = 0
    H1 = 1


def check_priors(priors):
    """Return ``(pi0, pi1)`` as floats; both positive and summing to one."""
    try:
        p0, p1 = (float(p) for p in priors)
    except (TypeError, ValueError):
        raise BadPriors(f"priors must be a pair (pi0, pi1), got {priors!r}") from None
    if not (p0 > 0 and p1 > 0) or abs(p0 + p1 - 1.0) > 1e-12:
        raise BadPriors(f"priors must be positive and sum to 1, got ({p0}, {p1})")
    return p0, p1


def as_spd(a, name="matrix", pd_tol=PD_TOL):
    """Symmetrize ``a`` and check that its smallest eigenvalue exceeds ``pd_tol``."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatch(f"{name}: expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotSpd(f"{name}: non-finite entries")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > 1e-10 * scale:
        raise NotSpd(f"{name}: not symmetric")
    a = 0.5 * (a + a.T)
    lam = np.linalg.eigvalsh(a)[0]
    if lam <= pd_tol:
        raise NotSpd(f"{name}: not positive definite (min eigenvalue {lam:.3e})")
    return a


def logdet(a):
    sign, val = np.linalg.slogdet(a)
    if sign <= 0:
        raise NotSpd("log-determinant of a matrix that is not positive definite")
    return float(val)


@dataclass(frozen=True, eq=False)
class GgmScenario:
    graph: DecomposableGraph
    clique_covs: tuple
    sep_covs: tuple
    global_precision: np.ndarray = field(repr=False)
    global_cov: np.ndarray = field(repr=False)
    priors: tuple = (0.5, 0.5)
    label: str = ""
    scale: float = float("nan")

    @property
    def K(self):
        return self.graph.K

    @property
    def n_nodes(self):
        return self.graph.n_nodes

    @cached_property
    def lambda_min(self):
        """Smallest eigenvalue over all clique covariances."""
        return min(float(np.linalg.eigvalsh(c)[0]) for c in self.clique_covs)

    @cached_property
    def logdet_cov(self):
        return logdet(self.global_cov)

    @cached_property
    def chol(self):
        return self.cholesky()

    def cholesky(self):
        try:
            return np.linalg.cholesky(self.global_cov)
        except np.linalg.LinAlgError as exc:
            raise CholeskyFailure(f"model: global covariance is not numerically PD ({exc})") from None


def assemble_global(graph, clique_covs, priors=(0.5, 0.5), label="", scale=float("nan")):
    """Assemble the global precision and covariance from clique covariances.

    The precision is ``sum_k [Sigma_Ck^-1]^V - sum_{k>=2} [Sigma_Sk^-1]^V``;
    separator covariances are read from ``Sigma_Ck`` at the ``S_k`` positions
    and must agree with the owning clique ``C_q(k)``.
    """
    priors = check_priors(priors)
    if len(clique_covs) != graph.K:
        raise DimensionMismatch(f"model: {len(clique_covs)} clique covariances for K={graph.K} cliques")
    covs = []
    for k, c in enumerate(clique_covs, start=1):
        c = as_spd(c, name=f"model: clique covariance {k}")
        if c.shape[0] != len(graph.clique(k)):
            raise DimensionMismatch(
                f"model: clique covariance {k} has dimension {c.shape[0]}, clique has {len(graph.clique(k))} nodes"
            )
        covs.append(c)

    seps = []
    for k in range(2, graph.K + 1):
        own = graph.separator_positions(k, within=k)
        par = graph.separator_positions(k, within=graph.q_map[k])
        a = covs[k - 1][np.ix_(own, own)]
        b = covs[graph.q_map[k] - 1][np.ix_(par, par)]
        dev = float(np.max(np.abs(a - b))) if a.size else 0.0
        if dev > SEP_TOL * max(1.0, float(np.max(np.abs(b))) if b.size else 1.0):
            raise InconsistentSeparator(k, dev)
        seps.append(a)

    n = graph.n_nodes
    prec = np.zeros((n, n))
    for k in range(1, graph.K + 1):
        idx = graph.clique_index(k)
        prec[np.ix_(idx, idx)] += np.linalg.inv(covs[k - 1])
    for k in range(2, graph.K + 1):
        s = seps[k - 2]
        if s.size == 0:
            continue
        idx = np.asarray(graph.separator(k), dtype=np.intp) - 1
        prec[np.ix_(idx, idx)] -= np.linalg.inv(s)
    prec = 0.5 * (prec + prec.T)
    as_spd(prec, name="model: assembled global precision")
    cov = np.linalg.inv(prec)
    cov = 0.5 * (cov + cov.T)
    return GgmScenario(graph, tuple(covs), tuple(seps), prec, cov, priors, label, float(scale))


def random_orthonormal(dim, rng):
    """Orthonormalize a standard-normal matrix; the triangular factor gets a
    positive diagonal so the result is unique for a given draw."""
    g = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.diag(r))


def random_spd_with_spectrum(dim, eigenvalues, seed):
    """Return ``V^T diag(eigenvalues) V`` for a seeded random orthonormal ``V``."""
    lam = np.asarray(eigenvalues, dtype=float)
    if dim < 1 or lam.shape != (dim,):
        raise DegenerateInput(f"model: need {dim} eigenvalues for dimension {dim}, got {lam.shape}")
    if np.any(lam <= 0):
        raise DegenerateInput("model: eigenvalues must be positive")
    v = random_orthonormal(dim, rngmod.stream(seed, rngmod.SCENARIO))
    a = (v.T * lam) @ v
    return 0.5 * (a + a.T)


def make_chain_scenario(K, M=5, alpha_scale=1.0, priors=(0.5, 0.5), seed=0):
    """Chain of ``K`` cliques of size ``M`` with 1-node separators, every
    clique sharing the covariance ``Sigma_C1``.

    ``Sigma_C1`` has eigenvalues evenly spaced on ``[alpha_scale, 1.5*alpha_scale]``.
    For ``K > 1`` its first and last diagonal entries are replaced by their
    mean so consecutive cliques agree on the shared node.
    """
    if K < 1 or M < 2:
        raise DegenerateInput("model: chain scenario needs K >= 1 and M >= 2")
    if alpha_scale <= 0:
        raise DegenerateInput("model: alpha_scale must be positive")
    graph = chain_graph(K, M, 1)
    lam = np.linspace(alpha_scale, 1.5 * alpha_scale, M)
    for attempt in range(MAX_RETRIES):
        sub_seed = seed if attempt == 0 else int(np.random.SeedSequence([seed, attempt]).generate_state(1)[0])
        c = random_spd_with_spectrum(M, lam, sub_seed)
        if K > 1:
            avg = 0.5 * (c[0, 0] + c[M - 1, M - 1])
            c[0, 0] = c[M - 1, M - 1] = avg
        try:
            as_spd(c)
        except NotSpd:
            continue
        return assemble_global(graph, [c] * K, priors, label="chain", scale=alpha_scale)
    raise NotSpd(f"model: chain covariance not PD after {MAX_RETRIES} retries")


def tree_clique_cov(x, M=4):
    """``x^2`` on the diagonal, ``x/10`` off it."""
    return x * x * np.eye(M) + (x / 10.0) * (np.ones((M, M)) - np.eye(M))


def tree_lambda_min(x):
    """Smallest eigenvalue of :func:`tree_clique_cov` for ``M = 4``."""
    return x * x - x / 10.0


def make_tree_scenario(K, x=1.6, priors=(0.5, 0.5), seed=0):
    """Binary tree of ``K`` four-node cliques with 1-node separators, every clique
    covariance equal to :func:`tree_clique_cov`. ``seed`` is accepted for a
    uniform factory signature and unused."""
    if K < 1:
        raise DegenerateInput("model: tree scenario needs K >= 1")
    if not (x * x - x / 10.0 > 0 and x * x + 3 * x / 10.0 > 0):
        raise NotSpd(f"model: tree clique covariance is not PD for x={x}")
    graph = binary_tree_graph(K, 4, 1)
    return assemble_global(graph, [tree_clique_cov(x)] * K, priors, label="tree", scale=x)


def sample(scenario, hypothesis, n, seed, keys=(rngmod.SAMPLE,)):
    """Draw ``n`` observation vectors (rows) under ``hypothesis``."""
    rng = rngmod.stream(seed, *keys)
    z = rng.standard_normal((n, scenario.n_nodes))
    if Hypothesis(hypothesis) == Hypothesis.H0:
        return z
    return z @ scenario.chol.T
