import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _scenarios import random_scenario
from ordered_ggm.errors import DegenerateInput, InconsistentSeparator, NotSpd
from ordered_ggm.graph import chain_graph, validate_perfect_sequence
from ordered_ggm.model import (
    Hypothesis,
    assemble_global,
    make_chain_scenario,
    make_tree_scenario,
    random_spd_with_spectrum,
    sample,
    tree_lambda_min,
)

FIG2 = validate_perfect_sequence([[1, 2, 3], [2, 3, 4]], 4)


def fig2_covs():
    # consistent on the shared block {2, 3}
    c1 = np.array([[2.0, 0.5, 0.3], [0.5, 1.5, 0.2], [0.3, 0.2, 1.8]])
    c2 = np.array([[1.5, 0.2, 0.4], [0.2, 1.8, -0.3], [0.4, -0.3, 2.5]])
    return [c1, c2]


def check_identities(sc):
    g = sc.graph
    for k in range(1, g.K + 1):
        idx = g.clique_index(k)
        marg = sc.global_cov[np.ix_(idx, idx)]
        c = sc.clique_covs[k - 1]
        assert np.max(np.abs(marg - c)) <= 1e-6 * np.max(np.abs(c))
    ld = np.linalg.slogdet(sc.global_cov)[1]
    fact = sum(np.linalg.slogdet(c)[1] for c in sc.clique_covs) - sum(
        np.linalg.slogdet(s)[1] for s in sc.sep_covs
    )
    assert abs(ld - fact) <= 1e-8 * max(1.0, abs(ld))
    members = [set(c) for c in g.cliques]
    for i in range(1, g.n_nodes + 1):
        for j in range(i + 1, g.n_nodes + 1):
            if not any(i in c and j in c for c in members):
                assert abs(sc.global_precision[i - 1, j - 1]) < 1e-8


class TestAssemble:
    def test_identity_fixed_point(self):
        g = chain_graph(4, 3, 1)
        sc = assemble_global(g, [np.eye(3)] * 4)
        np.testing.assert_array_equal(sc.global_cov, np.eye(g.n_nodes))
        assert sc.logdet_cov == 0.0

    def test_two_clique_chain_markov_zero(self):
        sc = assemble_global(FIG2, fig2_covs())
        # explicit 4x4 inversion of the assembled covariance
        prec = np.linalg.inv(sc.global_cov)
        assert abs(prec[0, 3]) < 1e-12 and abs(prec[3, 0]) < 1e-12
        np.testing.assert_allclose(prec, sc.global_precision, atol=1e-12)

    def test_two_clique_chain_logdet(self):
        c1, c2 = fig2_covs()
        sc = assemble_global(FIG2, [c1, c2])
        brute = np.log(np.linalg.det(sc.global_cov))
        expected = np.log(np.linalg.det(c1)) + np.log(np.linalg.det(c2)) - np.log(np.linalg.det(c1[1:, 1:]))
        assert brute == pytest.approx(expected, rel=1e-10)

    def test_inconsistent_separator_reports_k(self):
        c1, c2 = fig2_covs()
        c2 = c2.copy()
        c2[0, 0] += 0.1
        with pytest.raises(InconsistentSeparator) as exc:
            assemble_global(FIG2, [c1, c2])
        assert exc.value.k == 2
        assert exc.value.max_dev == pytest.approx(0.1)

    def test_not_spd(self):
        with pytest.raises(NotSpd):
            assemble_global(FIG2, [np.diag([1.0, -1.0, 1.0]), np.eye(3)])

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_identities_random(self, seed):
        check_identities(random_scenario(np.random.default_rng(seed)))


class TestSpectrum:
    def test_equal_eigenvalues(self):
        np.testing.assert_allclose(random_spd_with_spectrum(4, [2.5] * 4, seed=3), 2.5 * np.eye(4), atol=1e-13)

    def test_spectrum_preserved(self):
        lam = np.linspace(199, 1.5 * 199, 5)
        a = random_spd_with_spectrum(5, lam, seed=11)
        np.testing.assert_allclose(np.linalg.eigvalsh(a), lam, rtol=1e-8)
        assert np.max(np.abs(a - np.diag(np.diag(a)))) > 1.0

    def test_deterministic(self):
        a = random_spd_with_spectrum(5, np.arange(1.0, 6.0), seed=42)
        b = random_spd_with_spectrum(5, np.arange(1.0, 6.0), seed=42)
        assert a.tobytes() == b.tobytes()

    def test_degenerate(self):
        with pytest.raises(DegenerateInput):
            random_spd_with_spectrum(0, [], seed=0)
        with pytest.raises(DegenerateInput):
            random_spd_with_spectrum(2, [1.0, 0.0], seed=0)

    @given(st.integers(1, 8), st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_spectrum_property(self, dim, seed):
        lam = np.random.default_rng(seed).uniform(0.1, 50, size=dim)
        a = random_spd_with_spectrum(dim, lam, seed)
        np.testing.assert_allclose(np.linalg.eigvalsh(a), np.sort(lam), rtol=1e-8)


class TestScenarioFactories:
    def test_chain_paper_config(self):
        sc = make_chain_scenario(20, 5, 199.0, seed=0)
        assert sc.K == 20 and sc.n_nodes == 81
        assert 199 * 0.75 < sc.lambda_min <= 1.5 * 199
        check_identities(sc)

    def test_chain_single_clique(self):
        sc = make_chain_scenario(1, 5, 3.0, seed=1)
        np.testing.assert_allclose(sc.global_cov, sc.clique_covs[0], atol=1e-12)
        np.testing.assert_allclose(np.linalg.eigvalsh(sc.clique_covs[0]), np.linspace(3, 4.5, 5), rtol=1e-8)

    def test_chain_corner_consistency(self):
        sc = make_chain_scenario(2, 3, 5.0, seed=2)
        c = sc.clique_covs[0]
        assert c[0, 0] == c[2, 2]
        check_identities(sc)

    @pytest.mark.parametrize("x, lam", [(1.1, 1.10), (1.2, 1.32), (1.4, 1.82), (1.6, 2.40)])
    def test_tree_lambda_min(self, x, lam):
        assert tree_lambda_min(x) == pytest.approx(lam, abs=1e-12)
        sc = make_tree_scenario(3, x)
        assert sc.lambda_min == pytest.approx(lam, abs=1e-12)

    def test_tree_diagonal_case(self):
        x = 1.3
        c = x * x * np.eye(4)
        assert np.linalg.eigvalsh(c)[0] == pytest.approx(x * x)

    def test_tree_consistency_automatic(self):
        check_identities(make_tree_scenario(3, 1.1))
        check_identities(make_tree_scenario(15, 1.6))

    def test_tree_not_pd(self):
        with pytest.raises(NotSpd):
            make_tree_scenario(3, 0.05)


class TestSample:
    def test_identity_scenario(self):
        sc = assemble_global(chain_graph(2, 3, 1), [np.eye(3)] * 2)
        n = 100_000
        for h in Hypothesis:
            x = sample(sc, h, n, seed=5)
            cov = x.T @ x / n
            assert np.max(np.abs(cov - np.eye(sc.n_nodes))) < 5 / np.sqrt(n)

    def test_h1_covariance_within_standard_errors(self):
        sc = assemble_global(FIG2, fig2_covs())
        n = 100_000
        x = sample(sc, Hypothesis.H1, n, seed=9)
        prods = x[:, :, None] * x[:, None, :]
        est = prods.mean(axis=0)
        se = prods.std(axis=0) / np.sqrt(n)
        assert np.all(np.abs(est - sc.global_cov) < 5 * se)

    def test_deterministic(self):
        sc = make_tree_scenario(3, 1.2)
        a = sample(sc, Hypothesis.H1, 10, seed=3)
        b = sample(sc, Hypothesis.H1, 10, seed=3)
        assert a.tobytes() == b.tobytes()
