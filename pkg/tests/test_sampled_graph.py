import numpy as np
import pytest

import pooltest.sampled_graph as sampled_graph
from pooltest.errors import CapacityError, EmptyGraphError, InvalidParameterError
from pooltest.graph_io import Graph, karate_club
from pooltest.sampled_graph import (
    build_sampled_graph,
    covariance,
    is_community,
    modularity,
    set_covariance,
)


@pytest.fixture(scope="module")
def karate_sg():
    return build_sampled_graph(karate_club())


def test_single_edge():
    sg = build_sampled_graph(Graph.from_edges([(1, 2)]))
    assert sg.p_uw == pytest.approx(np.array([[0.5, 1.0], [1.0, 0.5]]) / 3)
    assert sg.p_uw[0, 1] == pytest.approx(1 / 3)
    assert covariance(sg, 0, 1) == pytest.approx(1 / 12)


def test_triangle():
    sg = build_sampled_graph(Graph.from_edges([(1, 2), (2, 3), (1, 3)]))
    c = 1 / 12
    assert np.allclose(np.diag(sg.p_uw), c)
    assert sg.p_uw[0, 2] == pytest.approx(1.5 * c)


def test_distribution_invariants(karate_sg):
    sg = karate_sg
    assert abs(sg.p_uw.sum() - 1.0) < 1e-9
    assert np.array_equal(sg.p_uw, sg.p_uw.T)
    assert np.allclose(sg.p_u, sg.p_uw.sum(axis=1))
    assert not sg.p_uw.flags.writeable
    q = sg.covariance_matrix()
    assert np.max(np.abs(q - q.T)) < 1e-12
    assert abs(q.sum()) < 1e-9


def test_set_covariance(karate_sg):
    sg = karate_sg
    everyone = range(sg.n)
    assert abs(set_covariance(sg, everyone, everyone)) < 1e-9
    assert set_covariance(sg, [3], [7]) == pytest.approx(covariance(sg, 3, 7), abs=1e-15)
    # members 1 and 2 are friends on the same side
    assert covariance(sg, 0, 1) > 0


def test_set_covariance_is_additive(karate_sg):
    rng = np.random.default_rng(1)
    for _ in range(20):
        nodes = rng.permutation(karate_sg.n)
        s1, s2, t = nodes[:5], nodes[5:12], rng.choice(karate_sg.n, size=8, replace=False)
        joint = set_covariance(karate_sg, np.concatenate([s1, s2]), t)
        split = set_covariance(karate_sg, s1, t) + set_covariance(karate_sg, s2, t)
        assert abs(joint - split) < 1e-12


def test_communities(karate_sg):
    graph = karate_sg.graph
    assert is_community(karate_sg, range(graph.n))
    faction = [v for v in range(graph.n) if graph.g.nodes[v]["club"] == "Mr. Hi"]
    assert is_community(karate_sg, faction)
    p = karate_sg
    for u in range(graph.n):
        assert is_community(p, [u]) == (p.p_uw[u, u] >= p.p_u[u] * p.p_w[u])
    with pytest.raises(InvalidParameterError):
        is_community(karate_sg, [])


def test_modularity(karate_sg):
    n = karate_sg.n
    assert abs(modularity(karate_sg, [list(range(n))])) < 1e-9
    singles = modularity(karate_sg, [[u] for u in range(n)])
    assert singles == pytest.approx(sum(covariance(karate_sg, u, u) for u in range(n)))
    graph = karate_sg.graph
    factions = [
        [v for v in range(n) if graph.g.nodes[v]["club"] == club] for club in ("Mr. Hi", "Officer")
    ]
    assert modularity(karate_sg, factions) > 0
    with pytest.raises(InvalidParameterError, match="exactly once"):
        modularity(karate_sg, [[0, 1], [1, 2]])


def test_out_of_range_nodes(karate_sg):
    with pytest.raises(InvalidParameterError):
        covariance(karate_sg, 0, 34)
    with pytest.raises(InvalidParameterError):
        set_covariance(karate_sg, [-1], [0])


def test_build_rejects_degenerate_graphs(monkeypatch):
    with pytest.raises(EmptyGraphError):
        build_sampled_graph(Graph.from_edges([], nodes=[1, 2]))
    with pytest.raises(InvalidParameterError):
        build_sampled_graph(Graph.from_edges([], nodes=[1]))
    monkeypatch.setattr(sampled_graph, "MAX_DENSE_NODES", 10)
    with pytest.raises(CapacityError):
        build_sampled_graph(karate_club())
