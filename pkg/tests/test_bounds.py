import math

import numpy as np
import pytest

from ordered_ggm.bounds import (
    bound_report,
    deltas,
    estimate_pd_pf,
    jk_spectrum_report,
    kl_per_clique,
    theorem2_bound,
    theorem3_limit,
)
from ordered_ggm.errors import BadK
from ordered_ggm.graph import chain_graph
from ordered_ggm.model import Hypothesis, assemble_global, make_chain_scenario, make_tree_scenario, sample
from ordered_ggm.statistic import build_local_set, gamma_schedule, local_stats


@pytest.mark.parametrize("tau, expected", [(0.0, (0.0, 0.0)), (1.0, (0.0, 2.0)), (-1.0, (-2.0, 0.0))])
def test_deltas(tau, expected):
    assert deltas(tau) == expected


class TestLowerBound:
    @pytest.mark.parametrize("K", [2, 3, 7, 20, 33])
    def test_perfect_probabilities_recover_limit(self, K):
        assert theorem2_bound([1.0] * K, [0.0] * K, K, (0.3, 0.7)) == math.ceil(K / 2) - 1

    def test_clamped(self):
        assert theorem2_bound([0.0] * 5, [1.0] * 5, 5, (0.5, 0.5)) == 0.0

    def test_boundary_arithmetic(self):
        pd = [0.95] * 20
        pf = [0.05] * 20
        assert theorem2_bound(pd, pf, 20, (0.5, 0.5)) == pytest.approx(0.0, abs=1e-12)

    def test_bad_k(self):
        with pytest.raises(BadK):
            theorem2_bound([1.0], [0.0], 1, (0.5, 0.5))
        with pytest.raises(BadK):
            theorem3_limit(1)

    @pytest.mark.parametrize("K, lim", [(20, 9), (2, 0), (7, 3)])
    def test_limit(self, K, lim):
        assert theorem3_limit(K) == lim

    def test_limit_fraction(self):
        assert theorem3_limit(20) / 20 == pytest.approx(0.45)


class TestEstimates:
    def test_identity_scenario_exact_zero(self):
        sc = assemble_global(chain_graph(3, 3, 1), [np.eye(3)] * 3)
        pd, pf, _ = estimate_pd_pf(build_local_set(sc), sc, 500, seed=1)
        assert np.all(pd == 0.0) and np.all(pf == 0.0)

    def test_against_oversampled_oracle(self):
        g = chain_graph(2, 2, 1)
        c1 = np.array([[3.0, 0.8], [0.8, 2.0]])
        c2 = np.array([[2.0, -0.5], [-0.5, 4.0]])
        sc = assemble_global(g, [c1, c2])
        lset = build_local_set(sc, gamma_schedule(2, 0.4))
        n = 20_000
        pd, pf, se = estimate_pd_pf(lset, sc, n, seed=3)
        # oracle: 10x draws through the plain sampler with a different seed
        l1 = local_stats(lset, sample(sc, Hypothesis.H1, 10 * n, seed=1001))
        l0 = local_stats(lset, sample(sc, Hypothesis.H0, 10 * n, seed=1002))
        pd_o = (l1 > 0.0).mean(axis=0)
        pf_o = 1.0 - (l0 <= 0.0).mean(axis=0)
        se_pd = np.sqrt(se["pd"] ** 2 + pd_o * (1 - pd_o) / (10 * n))
        se_pf = np.sqrt(se["pf"] ** 2 + pf_o * (1 - pf_o) / (10 * n))
        assert np.all(np.abs(pd - pd_o) <= 4 * se_pd)
        assert np.all(np.abs(pf - pf_o) <= 4 * se_pf)

    def test_tree_trend_toward_perfect(self):
        means = []
        for x in (1.1, 1.2, 1.4, 1.6):
            sc = make_tree_scenario(7, x)
            pd, pf, _ = estimate_pd_pf(build_local_set(sc), sc, 20_000, seed=5)
            means.append((pd.mean(), pf.mean()))
        assert all(a[0] < b[0] for a, b in zip(means, means[1:]))
        assert all(a[1] > b[1] for a, b in zip(means, means[1:]))

    def test_large_eigenvalues_near_perfect(self):
        sc = make_chain_scenario(6, 5, 199.0, seed=0)
        pd, pf, _ = estimate_pd_pf(build_local_set(sc), sc, 5000, seed=1)
        assert pd.min() > 0.99 and pf.max() < 0.01

    def test_stderr_scaling(self):
        sc = make_tree_scenario(3, 1.2)
        lset = build_local_set(sc)
        _, _, a = estimate_pd_pf(lset, sc, 4000, seed=7)
        _, _, b = estimate_pd_pf(lset, sc, 8000, seed=7)
        ratio = b["pd"] / a["pd"]
        assert np.all(np.abs(ratio - 1 / math.sqrt(2)) < 0.1 / math.sqrt(2))

    def test_report_invariants(self):
        sc = make_tree_scenario(7, 1.4, priors=(0.7, 0.3))
        rep = bound_report(build_local_set(sc), sc, 2000, seed=0)
        assert rep.delta0 <= 0 <= rep.delta1
        assert rep.delta1 == pytest.approx(2 * math.log(0.7 / 0.3))
        assert all(0 <= p <= 1 for p in rep.pd + rep.pf)
        assert rep.ks_lower >= 0 and rep.ks_limit == 3


class TestDiagnostics:
    def test_kl_identity(self):
        sc = assemble_global(chain_graph(2, 2, 1), [np.eye(2)] * 2)
        assert kl_per_clique(sc) == [0.0, 0.0]

    def test_kl_diag_two(self):
        sc = assemble_global(chain_graph(1, 2, 1), [np.diag([2.0, 2.0])])
        assert kl_per_clique(sc)[0] == pytest.approx(math.log(2) - 0.5, abs=1e-12)
        assert kl_per_clique(sc)[0] == pytest.approx(0.1931, abs=1e-4)

    def test_kl_increasing_in_x(self):
        kl = [kl_per_clique(make_tree_scenario(3, x))[0] for x in (1.1, 1.2, 1.4, 1.6)]
        assert all(a < b for a, b in zip(kl, kl[1:]))

    def test_spectrum_identity(self):
        sc = assemble_global(chain_graph(2, 3, 1), [np.eye(3)] * 2)
        assert all(lo == hi == 0.0 for lo, hi, _ in jk_spectrum_report(build_local_set(sc)))

    def test_spectrum_tree_band(self):
        sc = make_tree_scenario(7, 1.6)
        rep = jk_spectrum_report(build_local_set(sc, gamma_schedule(7, 0.5 / (2**7 - 1))))
        assert all(hi <= 1.05 for _, hi, _ in rep)

    def test_spectrum_chain_weyl_band(self):
        # finite-eigenvalue form of the sandwich: each [I - Sigma^-1] block has
        # eigenvalues in [1 - 1/lambda_min, 1)
        sc = make_chain_scenario(20, 5, 199.0, seed=0)
        c = gamma_schedule(20, 0.5 / (2**19 - 1))
        rep = jk_spectrum_report(build_local_set(sc, c))
        lam = sc.lambda_min
        for k, (lo, hi, pd) in enumerate(rep, start=1):
            weight = sum(c.beta[j] for j in sc.graph.q_sets[k]) + (c.alpha[k] if k > 1 else 0.0)
            assert lo >= 1.0 - 1.0 / lam - weight - 1e-12
            assert hi <= 1.0
        # clusters whose separator weight leaves a margin above 1/lambda are PD
        assert all(pd for _, _, pd in rep[:10])
