import numpy as np
import pytest

from graphon_sis import (SampledGraph, StepKernel, adjacency_eigenvalues, empirical_graphon,
                         lp_norm, normalized_spectrum, operator_spectrum, sample_graph)
from graphon_sis.sampling import parse_edge_list, read_edge_list, write_edge_list

from conftest import complete_graph, empty_graph


# -- sampling --------------------------------------------------------------------

@pytest.mark.parametrize("n,seed", [(2, 0), (17, 5), (60, 2**64 - 1)])
def test_sample_constant_one_is_complete(n, seed):
    G = sample_graph(StepKernel.constant(1.0), n, seed)
    assert G.n_edges == n * (n - 1) // 2


def test_sample_constant_zero_is_empty():
    assert sample_graph(StepKernel.constant(0.0), 50, 3).n_edges == 0


def test_sample_edge_count_binomial():
    n, p = 1000, 0.5
    pairs = n * (n - 1) // 2
    G = sample_graph(StepKernel.constant(p), n, 42)
    assert abs(G.n_edges - p * pairs) < 4 * np.sqrt(pairs * p * (1 - p))


def test_sample_graph_invariants(wsb):
    G = sample_graph(wsb, 73, 9)
    a = G.adjacency
    assert np.array_equal(a, a.T)
    assert not a.diagonal().any()
    assert set(np.unique(a)) <= {0, 1}
    u = G.latents
    assert np.all(np.diff(u) > 0) and u[-1] == 1.0


def test_sample_reproducible(wsb):
    a = sample_graph(wsb, 120, 123).adjacency
    b = sample_graph(wsb, 120, 123).adjacency
    c = sample_graph(wsb, 120, 124).adjacency
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_pair_stream_contract(wsb):
    # one uniform per pair i < j in lexicographic order from default_rng(seed)
    n, seed = 30, 77
    rng = np.random.default_rng(seed)
    u = np.arange(1, n + 1) / n
    expected = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < wsb(u[i], u[j]):
                expected[i, j] = expected[j, i] = 1
    np.testing.assert_array_equal(sample_graph(wsb, n, seed).adjacency, expected)


def test_sample_argument_errors(wsb):
    with pytest.raises(ValueError):
        sample_graph(wsb, 1, 0)
    with pytest.raises(ValueError):
        sample_graph(wsb, 10, -1)


def test_sampling_monotone_in_density():
    lo, hi = StepKernel.constant(0.3), StepKernel.constant(0.35)
    d_lo = np.mean([sample_graph(lo, 40, s).n_edges for s in range(100)])
    d_hi = np.mean([sample_graph(hi, 40, s).n_edges for s in range(100)])
    assert d_lo < d_hi


@pytest.mark.parametrize("n", [100, 400, 1600])
def test_degree_concentration(n):
    p = 0.3
    G = sample_graph(StepKernel.constant(p), n, n)
    dev = np.abs(G.degrees() / (n - 1) - p).max()
    assert dev < 4 * np.sqrt(p * (1 - p) / (n - 1))


def test_empirical_graphon_trivial():
    W = empirical_graphon(complete_graph(3))
    assert W.n_blocks == 3
    np.testing.assert_array_equal(W.values, 1 - np.eye(3))
    assert empirical_graphon(empty_graph(4)).values.sum() == 0


def test_empirical_graphon_edge_count(wsb):
    G = sample_graph(wsb, 90, 1)
    assert 90 ** 2 * lp_norm(empirical_graphon(G), 1) == pytest.approx(2 * G.n_edges)


@pytest.mark.parametrize("seed", range(5))
def test_empirical_spectrum_is_normalized_adjacency(wsb, seed):
    G = sample_graph(wsb, 64, seed)
    a = operator_spectrum(empirical_graphon(G), G.n).eigenvalues
    b = np.linalg.eigvalsh(G.adjacency.astype(float))[::-1] / G.n
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_edge_list_roundtrip(tmp_path, wsb):
    G = sample_graph(wsb, 40, 7)
    path = tmp_path / "g.txt"
    write_edge_list(G, path, {"seed": 7, "graphon": "wsb-paper"})
    back = read_edge_list(path)
    assert back.n == 40 and back.source_seed == 7
    np.testing.assert_array_equal(back.adjacency, G.adjacency)
    body = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    assert body[0] == "40"
    assert all(int(l.split()[0]) < int(l.split()[1]) for l in body[1:])


@pytest.mark.parametrize("text", ["3\n1 1\n", "3\n2 1\n", "3\n1 4\n", "3\n1 2\n1 2\n", "3\n1\n"])
def test_edge_list_rejects_non_simple(text):
    with pytest.raises(ValueError):
        parse_edge_list(text)


def test_from_adjacency_validation():
    with pytest.raises(ValueError):
        SampledGraph.from_adjacency([[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        SampledGraph.from_adjacency([[1, 0], [0, 0]])


# -- spectral ---------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 5, 12])
def test_complete_graph_spectrum(n):
    ev = adjacency_eigenvalues(complete_graph(n)).eigenvalues
    np.testing.assert_allclose(ev, [n - 1] + [-1] * (n - 1), atol=1e-12)


def test_empty_graph_spectrum():
    np.testing.assert_array_equal(adjacency_eigenvalues(empty_graph(6)).eigenvalues, 0)


def test_path_spectrum():
    # characteristic polynomial -l^3 + 2l
    P3 = SampledGraph.from_adjacency([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    np.testing.assert_allclose(adjacency_eigenvalues(P3).eigenvalues, [np.sqrt(2), 0, -np.sqrt(2)],
                               atol=1e-14)


def test_normalized_complete():
    rep = normalized_spectrum(adjacency_eigenvalues(complete_graph(4)))
    np.testing.assert_allclose(rep.eigenvalues, [0.75, -0.25, -0.25, -0.25], atol=1e-14)
    assert rep.padded_length == 4
    np.testing.assert_array_equal(normalized_spectrum(adjacency_eigenvalues(empty_graph(3))).eigenvalues, 0)


@pytest.mark.parametrize("seed", range(4))
def test_spectrum_identities(wsb, seed):
    G = sample_graph(wsb, 150, seed)
    S = adjacency_eigenvalues(G)
    ev = S.eigenvalues
    assert np.all(np.diff(ev) <= 0)
    assert abs(ev.sum()) <= 1e-6 * G.n
    assert (ev ** 2).sum() == pytest.approx(2 * G.n_edges, rel=1e-6)
    assert ev[0] >= 2 * G.n_edges / G.n - 1e-9
    np.testing.assert_allclose(normalized_spectrum(S).eigenvalues,
                               operator_spectrum(empirical_graphon(G), G.n).eigenvalues, atol=1e-9)


def test_spectrum_permutation_invariant(wsb):
    G = sample_graph(wsb, 80, 4)
    perm = np.random.default_rng(0).permutation(80)
    H = SampledGraph.from_adjacency(G.adjacency[np.ix_(perm, perm)])
    np.testing.assert_allclose(adjacency_eigenvalues(G).eigenvalues,
                               adjacency_eigenvalues(H).eigenvalues, atol=1e-9)


def test_eigenvalue_accuracy_residual(wsb):
    # each eigenvalue is exact for some unit vector: min singular value of A - l I is ~0
    G = sample_graph(wsb, 60, 2)
    a = G.adjacency.astype(float)
    for lam in adjacency_eigenvalues(G).eigenvalues[:5]:
        smin = np.linalg.svd(a - lam * np.eye(60), compute_uv=False)[-1]
        assert smin <= 1e-8 * max(1.0, adjacency_eigenvalues(G).lambda_max)
