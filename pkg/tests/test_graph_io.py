import io

import networkx as nx
import numpy as np
import pytest

from pooltest.errors import EdgeListParseError, EmptyGraphError, InvalidParameterError
from pooltest.graph_io import (
    Graph,
    compute_stats,
    generate_small_world,
    karate_club,
    load_edge_list,
    load_gml,
    write_edge_list,
)
from pooltest.models import CleanupPolicy


def from_text(text, cleanup=CleanupPolicy.NONE):
    return load_edge_list(io.BytesIO(text.encode("utf-8")), cleanup=cleanup)


# --- edge lists ---
def test_duplicate_and_reversed_edges_collapse():
    graph = from_text("1 2\n2 1\n1 2\n")
    assert (graph.n, graph.m) == (2, 1)


def test_comments_blank_lines_and_labels():
    graph = from_text("# a comment\n\n10 20\n  20 30  \n# trailing\n")
    assert graph.labels == [10, 20, 30]
    assert graph.edges == [(0, 1), (1, 2)]
    assert graph.labelled_edges() == [(10, 20), (20, 30)]


def test_malformed_line_reports_line_number():
    with pytest.raises(EdgeListParseError) as exc:
        from_text("1 2\n2 x\n")
    assert exc.value.line_no == 2
    with pytest.raises(EdgeListParseError, match="line 3"):
        from_text("1 2\n\n1 2 3\n")


def test_empty_input():
    with pytest.raises(EmptyGraphError):
        from_text("# nothing here\n")


def test_cleanup_policies():
    text = "1 2\n2 3\n4 4\n5 6\n"
    assert from_text(text).n == 6
    dropped = from_text(text, CleanupPolicy.DROP_ISOLATED)
    assert dropped.labels == [1, 2, 3, 5, 6]
    assert dropped.m == 3
    largest = from_text(text, CleanupPolicy.LARGEST_COMPONENT)
    assert largest.labels == [1, 2, 3]
    with pytest.raises(EmptyGraphError):
        from_text("7 7\n", CleanupPolicy.DROP_ISOLATED)


def test_write_and_reload(tmp_path):
    graph = from_text("5 9\n9 12\n12 5\n12 40\n")
    path = tmp_path / "edges.txt"
    with open(path, "w") as f:
        write_edge_list(graph, f)
    again = load_edge_list(path)
    assert again.labels == graph.labels
    assert again.labelled_edges() == graph.labelled_edges()


def test_graph_rejects_bad_construction():
    g = nx.Graph([(0, 0)])
    with pytest.raises(InvalidParameterError):
        Graph(g, labels=[1])
    with pytest.raises(InvalidParameterError):
        Graph(nx.Graph([(0, 2)]), labels=[1, 2])


def test_gml_is_read_undirected(tmp_path):
    path = tmp_path / "tiny.gml"
    path.write_text(
        """graph [
  directed 1
  node [ id 1 label "a" ]
  node [ id 2 label "b" ]
  node [ id 3 label "c" ]
  node [ id 9 label "lonely" ]
  edge [ source 1 target 2 ]
  edge [ source 2 target 1 ]
  edge [ source 1 target 2 ]
  edge [ source 3 target 3 ]
  edge [ source 2 target 3 ]
]
"""
    )
    graph = load_gml(path)
    assert (graph.n, graph.m) == (4, 2)
    assert load_gml(path, cleanup=CleanupPolicy.DROP_ISOLATED).labels == [1, 2, 3]


# --- fixtures and generators ---
def test_karate():
    graph = karate_club()
    assert (graph.n, graph.m) == (34, 78)
    assert graph.labels == list(range(1, 35))
    assert {graph.g.nodes[v]["club"] for v in range(34)} == {"Mr. Hi", "Officer"}


def test_neighbors_are_sorted_arrays():
    graph = karate_club()
    for v in range(graph.n):
        nbrs = graph.neighbors[v]
        assert nbrs.tolist() == sorted(graph.g[v])


def test_small_world_lattice():
    graph = generate_small_world(n=100, k=6, rewire_p=0.0)
    degrees = [d for _, d in graph.g.degree]
    assert set(degrees) == {6}
    assert graph.m == 300


def test_small_world_defaults():
    graph = generate_small_world(seed=3)
    assert (graph.n, graph.m) == (1000, 15000)
    stats = compute_stats(graph)
    assert stats.avg_degree == 30
    assert stats.diameter in (3, 4)
    assert stats.avg_path_length == pytest.approx(2.4414, abs=0.1)


def test_small_world_clustering():
    values = [compute_stats(generate_small_world(seed=s)).avg_clustering_coefficient for s in range(5)]
    assert np.mean(values) == pytest.approx(0.1133, abs=0.02)


def test_small_world_variants():
    classic = generate_small_world(n=200, k=10, seed=1, variant="classic")
    both = generate_small_world(n=200, k=10, seed=1)
    assert classic.m == both.m == 1000
    assert nx.number_of_selfloops(both.g) == 0
    # the classic rewire never moves the first endpoint, so no degree drops below k/2
    assert min(d for _, d in classic.g.degree) >= 5


@pytest.mark.parametrize(
    "kwargs",
    [dict(k=7), dict(k=0), dict(n=10, k=10), dict(rewire_p=1.5), dict(variant="other")],
)
def test_small_world_rejects_bad_parameters(kwargs):
    with pytest.raises(InvalidParameterError):
        generate_small_world(**kwargs)


def test_generator_is_seeded():
    a, b = generate_small_world(n=200, k=10, seed=4), generate_small_world(n=200, k=10, seed=4)
    assert a.edges == b.edges
    assert a.edges != generate_small_world(n=200, k=10, seed=5).edges


# --- statistics ---
def test_complete_graph_stats():
    stats = compute_stats(Graph.from_edges([(u, w) for u in range(4) for w in range(u + 1, 4)]))
    assert stats.avg_clustering_coefficient == 1.0
    assert stats.diameter == 1
    assert stats.density == 1.0
    assert stats.avg_excess_degree == pytest.approx(2.0)


def test_path_stats():
    stats = compute_stats(Graph.from_edges([(1, 2), (2, 3)]))
    assert stats.avg_path_length == pytest.approx(4 / 3)
    assert stats.diameter == 2
    # the middle node has degree 2 but no triangle, the ends count as zero
    assert stats.avg_clustering_coefficient == 0.0
    assert stats.avg_excess_degree == pytest.approx(6 / 4 - 1)


def test_disconnected_stats_use_largest_component():
    graph = Graph.from_edges([(1, 2), (2, 3), (3, 4), (7, 8)])
    stats = compute_stats(graph)
    assert stats.diameter == 3
    assert stats.avg_path_length == pytest.approx(20 / 12)
    assert stats.diameter >= stats.avg_path_length


def test_excess_degree_bound():
    stats = compute_stats(karate_club())
    assert stats.avg_excess_degree >= stats.avg_degree - 1
    assert stats.density == pytest.approx(2 * 78 / (34 * 33))
