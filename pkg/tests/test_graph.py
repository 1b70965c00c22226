import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skewclust.graph import (
    Digraph,
    GraphFormatError,
    ZeroDegreeError,
    build_skew,
    hermitian_entry,
    largest_weak_component,
    load_edge_list,
    normalize_skew,
    skew_degrees,
    volume,
    weak_connectivity,
    write_edge_list,
    write_label_map,
)

from conftest import cycle, two_cycles


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


# -- construction


def test_duplicates_summed_and_self_loops_dropped():
    g = Digraph(3, [0, 0, 1, 2], [1, 1, 1, 0], [2.0, 3.0, 7.0, 0.0])
    assert g.num_edges == 1
    assert g.weight(0, 1) == 5.0
    assert g.weight(1, 1) == 0.0


def test_negative_weight_rejected():
    with pytest.raises(ValueError):
        Digraph(2, [0], [1], [-1.0])


def test_endpoint_out_of_range():
    with pytest.raises(ValueError):
        Digraph(2, [0], [2])


def test_empty_graph():
    g = Digraph(4, [], [])
    assert g.num_edges == 0
    assert build_skew(g).matrix.nnz == 0
    assert len(weak_connectivity(build_skew(g)).components) == 4


# -- K and H


def test_skew_single_edge(edge2):
    k = build_skew(edge2).toarray()
    assert k[0, 1] == 2.0 and k[1, 0] == -2.0
    assert np.count_nonzero(k) == 2


def test_reciprocal_edges_collapse_to_net():
    g = Digraph.from_edges(2, [(0, 1, 3.0), (1, 0, 1.0)])
    k = build_skew(g).toarray()
    assert k[0, 1] == 2.0 and k[1, 0] == -2.0


def test_equal_reciprocal_pair_vanishes():
    g = Digraph.from_edges(3, [(0, 1, 2.0), (1, 0, 2.0), (1, 2)])
    k = build_skew(g)
    assert k.matrix.nnz == 2
    assert k.toarray()[0, 1] == 0.0


def test_skew_three_cycle(tri):
    k = build_skew(tri).toarray()
    assert np.count_nonzero(k) == 6
    assert set(np.unique(k[k != 0])) == {-1.0, 1.0}
    assert np.all(k.sum(axis=1) == 0)


def test_hermitian_entry(edge2):
    assert hermitian_entry(edge2, 0, 1) == (0.0, 2.0)
    assert hermitian_entry(edge2, 1, 0) == (0.0, -2.0)
    g = Digraph.from_edges(3, [(0, 1, 2.0)])
    assert hermitian_entry(g, 0, 2) == (0.0, 0.0)
    with pytest.raises(IndexError):
        hermitian_entry(edge2, 0, 5)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 25), st.floats(0.05, 0.9), st.integers(0, 2**31 - 1))
def test_skew_exact_antisymmetry(n, density, seed):
    r = np.random.default_rng(seed)
    m = np.where(r.random((n, n)) < density, r.uniform(0.1, 3.0, (n, n)), 0.0)
    g = Digraph.from_matrix(m)
    k = build_skew(g).matrix
    assert (k + k.T).nnz == 0 or abs(k + k.T).max() == 0
    assert k.diagonal().sum() == 0
    # support equals M's support after cancelling equal reciprocal pairs
    mm = g.adjacency.toarray()
    expect = (mm != mm.T)
    assert np.array_equal(k.toarray() != 0, expect)
    assert volume(g, range(n)) == pytest.approx(2 * g.total_weight())


# -- connectivity


def test_connectivity_examples(tri):
    rep = weak_connectivity(build_skew(tri))
    assert rep.connected and len(rep.components) == 1
    rep = weak_connectivity(build_skew(two_cycles()))
    assert not rep.connected
    assert [len(c) for c in rep.components] == [3, 3]
    g = Digraph.from_edges(3, [(0, 1)])
    rep = weak_connectivity(build_skew(g))
    assert [sorted(c) for c in rep.components] == [[0, 1], [2]]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.floats(0.0, 0.2), st.integers(0, 2**31 - 1))
def test_components_partition_vertices(n, density, seed):
    r = np.random.default_rng(seed)
    g = Digraph.from_matrix((r.random((n, n)) < density).astype(float))
    rep = weak_connectivity(build_skew(g))
    seen = sorted(v for c in rep.components for v in c)
    assert seen == list(range(n))
    sizes = [len(c) for c in rep.components]
    assert sizes == sorted(sizes, reverse=True)


def test_largest_weak_component():
    g = Digraph.from_edges(6, [(0, 1), (1, 2), (4, 5)])
    sub, keep = largest_weak_component(g)
    assert list(keep) == [0, 1, 2]
    assert sub.n == 3 and sub.num_edges == 2


# -- normalization


def test_normalize_single_edge(edge2):
    k = build_skew(edge2)
    rw = normalize_skew(k, "rw").toarray()
    sym = normalize_skew(k, "sym").toarray()
    assert rw[0, 1] == 1.0 and rw[1, 0] == -1.0
    assert sym[0, 1] == pytest.approx(1.0) and sym[1, 0] == pytest.approx(-1.0)


def test_normalize_cycle_sym(tri):
    s = normalize_skew(build_skew(tri), "sym")
    a = s.toarray()
    assert s.tag == "sym" and s.is_skew
    assert np.allclose(np.abs(a[a != 0]), 0.5)
    assert np.allclose(skew_degrees(build_skew(tri)), 2.0)


def test_rw_not_skew_in_general():
    g = Digraph.from_edges(3, [(0, 1), (1, 2), (0, 2, 3.0)])
    rw = normalize_skew(build_skew(g), "rw")
    assert rw.tag == "rw"
    assert not rw.is_skew


def test_zero_degree_named():
    g = Digraph.from_edges(3, [(0, 1)])
    with pytest.raises(ZeroDegreeError) as err:
        normalize_skew(build_skew(g), "sym")
    assert err.value.vertex == 2


def test_volume_examples(tri, edge2):
    assert volume(tri, [0, 1, 2]) == 6
    assert volume(edge2, [0]) == 2
    assert volume(edge2, [0, 1]) == 4


# -- file formats


def test_tsv_cycle(tmp_path):
    g, labels = load_edge_list(_write(tmp_path, "c.tsv", "0\t1\n1\t2\n2\t0\n"))
    assert g.n == 3 and g.num_edges == 3
    assert np.all(g.adjacency.data == 1.0)
    assert labels == ["0", "1", "2"]


def test_tsv_duplicate_sum(tmp_path):
    g, _ = load_edge_list(_write(tmp_path, "d.tsv", "0\t1\t2\n0\t1\t3\n"))
    assert g.num_edges == 1 and g.weight(0, 1) == 5.0


def test_tsv_comments_and_labels(tmp_path):
    text = "# a food web\nshark\tseal\t2\nseal\tfish\n\nfish\tshark  # odd\n"
    g, labels = load_edge_list(_write(tmp_path, "l.tsv", text))
    assert g.n == 3 and g.num_edges == 3
    assert g.weight(labels.index("shark"), labels.index("seal")) == 2.0


def test_tsv_bad_weight_reports_line(tmp_path):
    with pytest.raises(GraphFormatError) as err:
        load_edge_list(_write(tmp_path, "b.tsv", "0\t1\n1\t2\tabc\n"))
    assert err.value.lineno == 2


def test_tsv_negative_weight(tmp_path):
    with pytest.raises(GraphFormatError):
        load_edge_list(_write(tmp_path, "n.tsv", "0\t1\t-2\n"))


def test_unweighted_flag(tmp_path):
    g, _ = load_edge_list(_write(tmp_path, "w.tsv", "0\t1\t7\n1\t0\t2\n"), unweighted=True)
    assert g.weight(0, 1) == 1.0 and g.weight(1, 0) == 1.0


def test_roundtrip_keeps_isolated_vertices(tmp_path):
    g = Digraph.from_edges(5, [(0, 1, 0.1), (3, 1, 2.5)])
    path = tmp_path / "r.tsv"
    write_edge_list(path, g)
    h, _ = load_edge_list(path)
    assert h.n == 5
    assert (h.adjacency != g.adjacency).nnz == 0


def test_pajek(tmp_path):
    text = ('*Vertices 4\n1 "a"\n2 "b"\n3 "c"\n4 "d"\n'
            "*Arcs\n1 2 1.5\n2 3\n3 1\n")
    g, labels = load_edge_list(_write(tmp_path, "g.net", text), format="pajek")
    assert g.n == 4 and g.num_edges == 3
    assert g.weight(0, 1) == 1.5
    assert labels == ["a", "b", "c", "d"]


def test_pajek_out_of_range_arc(tmp_path):
    with pytest.raises(GraphFormatError) as err:
        load_edge_list(_write(tmp_path, "x.net", "*Vertices 2\n*Arcs\n1 3\n"), format="pajek")
    assert err.value.lineno == 3


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_edge_list(tmp_path / "nope.tsv")


def test_label_map(tmp_path):
    path = tmp_path / "m.tsv"
    write_label_map(path, ["x", "y"])
    assert path.read_text() == "x\t0\ny\t1\n"
