import numpy as np
import pytest

from skewclust.dsbm import (
    DsbmParams,
    generate,
    meta_circulant,
    meta_cmg,
    meta_dag,
    meta_pattern,
    read_truth,
    write_instance,
)
from skewclust.graph import load_edge_list
from skewclust.metrics import tf


def test_circulant_k3():
    assert np.array_equal(meta_circulant(3, 0.0),
                          [[0.5, 1, 0], [0, 0.5, 1], [1, 0, 0.5]])


def test_circulant_k5():
    f = meta_circulant(5, 0.3)
    assert f[0, 1] == 0.7 and f[1, 0] == pytest.approx(0.3) and f[0, 2] == 0.5
    assert f[4, 0] == 0.7


def test_mu_range():
    for bad in (0.5, -0.1):
        with pytest.raises(ValueError):
            meta_circulant(3, bad)
    with pytest.raises(ValueError):
        meta_dag(2, 0.1)


def test_dag_pattern():
    f = meta_dag(5, 0.1)
    assert f[1, 2] == 0.1 and f[2, 1] == 0.9 and f[0, 3] == 0.5
    assert f[0, 2] == 0.1 and f[2, 0] == 0.9
    # no wraparound
    assert f[4, 0] == 0.5 and f[0, 4] == 0.5
    assert np.allclose(f + f.T, 1.0)


def test_cmg_pattern():
    f = meta_cmg(6, 0.2, seed=4)
    off = f[~np.eye(6, dtype=bool)]
    assert np.all(np.isin(np.round(off, 12), [0.2, 0.8]))
    assert np.all(np.diag(f) == 0.5)
    assert np.array_equal(f, meta_cmg(6, 0.2, seed=4))
    assert np.allclose(f + f.T, 1.0)
    assert not all(np.array_equal(f, meta_cmg(6, 0.2, seed=s)) for s in range(5, 10))


def test_meta_pattern_dispatch():
    assert np.array_equal(meta_pattern("dag", 4, 0.1), meta_dag(4, 0.1))
    with pytest.raises(ValueError):
        meta_pattern("star", 4, 0.1)


def test_params_validation():
    f = meta_circulant(2, 0.0)
    with pytest.raises(ValueError):
        DsbmParams(2, 0.5, 0.5, (2, 3, 1), f)
    with pytest.raises(ValueError):
        DsbmParams(2, 1.5, 0.5, (2, 2), f)
    bad = f.copy()
    bad[0, 0] = 0.4
    with pytest.raises(ValueError):
        DsbmParams(2, 0.5, 0.5, (2, 2), bad)
    bad = f.copy()
    bad[0, 1] = 0.9
    with pytest.raises(ValueError):
        DsbmParams(2, 0.5, 0.5, (2, 2), bad)


def test_extreme_orientation():
    f = np.array([[0.5, 1.0], [0.0, 0.5]])
    inst = generate(DsbmParams(2, 1.0, 1.0, (2, 2), f, seed=3))
    g = inst.graph
    assert g.num_edges == 6
    assert tf(g, [0, 1], [2, 3]) == 4
    assert inst.truth.assignment.tolist() == [0, 0, 1, 1]


def test_empty_when_p_zero():
    inst = generate(DsbmParams(3, 0.0, 0.0, (3, 3, 3), meta_circulant(3, 0.1)))
    assert inst.graph.num_edges == 0 and inst.graph.n == 9


def test_deterministic_and_seed_sensitive():
    pr = DsbmParams(3, 0.2, 0.2, (20, 20, 20), meta_circulant(3, 0.1), seed=8)
    a, b = generate(pr), generate(pr)
    assert (a.graph.adjacency != b.graph.adjacency).nnz == 0
    c = generate(DsbmParams(3, 0.2, 0.2, (20, 20, 20), meta_circulant(3, 0.1), seed=9))
    assert (a.graph.adjacency != c.graph.adjacency).nnz > 0


def test_oriented_no_reciprocal_pairs():
    g = generate(DsbmParams(2, 0.5, 0.5, (30, 30), meta_circulant(2, 0.2), seed=1)).graph
    m = g.adjacency.toarray()
    assert not np.any((m > 0) & (m.T > 0))
    assert np.all(g.adjacency.data == 1.0)


def test_paper_scale_edge_count():
    pr = DsbmParams(5, 0.008, 0.008, (1000,) * 5, meta_circulant(5, 0.0), seed=0)
    m = generate(pr).graph.num_edges
    pairs = 5000 * 4999 / 2
    mean, sd = 0.008 * pairs, np.sqrt(pairs * 0.008 * 0.992)
    assert pr.expected_edges() == pytest.approx(mean)
    assert abs(m - mean) <= 3 * sd


def test_orientation_marginals():
    # two clusters of 150, only cross edges; F_01 = 0.7
    f = meta_circulant(2, 0.3)
    pr = DsbmParams(2, 0.0, 0.45, (150, 150), f, seed=5)
    m = generate(pr).graph.adjacency.toarray()
    fwd = m[:150, 150:].sum()
    back = m[150:, :150].sum()
    total = fwd + back
    assert total >= 10_000
    se = np.sqrt(0.7 * 0.3 / total)
    assert abs(fwd / total - 0.7) <= 4 * se


def test_within_cluster_fair():
    pr = DsbmParams(1, 0.5, 0.0, (200,), np.array([[0.5]]), seed=2)
    m = generate(pr).graph.adjacency.toarray()
    up, down = np.triu(m).sum(), np.tril(m).sum()
    total = up + down
    assert abs(up / total - 0.5) <= 4 * np.sqrt(0.25 / total)


def test_mu_zero_adjacent_cross_edges_forward():
    pr = DsbmParams(4, 0.1, 0.3, (15,) * 4, meta_circulant(4, 0.0), seed=6)
    inst = generate(pr)
    lab = inst.truth.assignment
    src, dst, _ = inst.graph.edges()
    a, b = lab[src], lab[dst]
    adjacent = (b - a) % 4 == 1
    backward = (a - b) % 4 == 1
    assert adjacent.sum() > 0
    assert backward.sum() == 0


def test_degrees_exchangeable_when_p_equals_q():
    pr = DsbmParams(2, 0.1, 0.1, (300, 300), meta_circulant(2, 0.0), seed=4)
    g = generate(pr).graph
    deg = g.out_degree() + g.in_degree()
    m0, m1 = deg[:300].mean(), deg[300:].mean()
    sd = deg.std() / np.sqrt(300)
    assert abs(m0 - m1) <= 4 * np.sqrt(2) * sd


def test_instance_files_roundtrip(tmp_path):
    pr = DsbmParams(3, 0.3, 0.1, (5, 6, 7), meta_dag(3, 0.1), seed=2)
    inst = generate(pr)
    edges, truth = write_instance(tmp_path / "x", inst)
    g, _ = load_edge_list(edges)
    assert g.n == 18 and (g.adjacency != inst.graph.adjacency).nnz == 0
    assert read_truth(truth, 18) == inst.truth
    first = open(edges, "rb").read()
    write_instance(tmp_path / "x", generate(pr))
    assert open(edges, "rb").read() == first


def test_read_truth_rejects_gaps(tmp_path):
    p = tmp_path / "t.tsv"
    p.write_text("0\t0\n2\t1\n")
    with pytest.raises(ValueError):
        read_truth(p)
