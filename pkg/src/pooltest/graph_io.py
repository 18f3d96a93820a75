"""Graph ingestion, synthetic graphs and summary statistics.

Graphs are undirected and simple. Nodes are compacted to 0..n-1; the original
ids are kept as labels for output.
"""
import io
import logging
import re
from functools import cached_property
from pathlib import Path
from typing import BinaryIO, Iterable, List, Sequence, TextIO, Tuple, Union

import networkx as nx
import numpy as np
from scipy.sparse.csgraph import shortest_path

from pooltest.errors import EdgeListParseError, EmptyGraphError, InvalidParameterError
from pooltest.models import CleanupPolicy, GraphStats
from pooltest.seeding import derive_rng

logger = logging.getLogger("pooltest.graph_io")


class Graph:
    """Undirected simple graph over nodes 0..n-1 with retained labels."""

    def __init__(self, g: nx.Graph, labels: Sequence[int]):
        if sorted(g.nodes) != list(range(g.number_of_nodes())):
            raise InvalidParameterError("graph nodes must be 0..n-1")
        if nx.number_of_selfloops(g):
            raise InvalidParameterError("graph must not contain self-loops")
        if len(labels) != g.number_of_nodes():
            raise InvalidParameterError("one label per node is required")
        self.g = g
        self.labels = list(labels)

    @classmethod
    def from_edges(cls, edges: Iterable[Tuple[int, int]], nodes: Iterable[int] = (), cleanup: CleanupPolicy = CleanupPolicy.NONE) -> "Graph":
        """Build from labelled edges: drop self-loops and duplicates, apply cleanup, compact ids."""
        raw = nx.Graph()
        raw.add_nodes_from(nodes)
        raw.add_edges_from(edges)
        raw.remove_edges_from(list(nx.selfloop_edges(raw)))
        cleanup = CleanupPolicy(cleanup)
        if cleanup is CleanupPolicy.DROP_ISOLATED:
            raw.remove_nodes_from([v for v, d in raw.degree if d == 0])
        elif cleanup is CleanupPolicy.LARGEST_COMPONENT and raw.number_of_nodes():
            raw = raw.subgraph(max(nx.connected_components(raw), key=len)).copy()
        if raw.number_of_nodes() == 0:
            raise EmptyGraphError("graph is empty after cleanup")
        labels = sorted(raw.nodes)
        index = {label: i for i, label in enumerate(labels)}
        compact = nx.Graph()
        compact.add_nodes_from((index[label], raw.nodes[label]) for label in labels)
        compact.add_edges_from((index[u], index[w]) for u, w in raw.edges)
        return cls(compact, labels)

    @property
    def n(self) -> int:
        return self.g.number_of_nodes()

    @property
    def m(self) -> int:
        return self.g.number_of_edges()

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return sorted((min(u, w), max(u, w)) for u, w in self.g.edges)

    def adjacency_matrix(self) -> np.ndarray:
        return nx.to_numpy_array(self.g, nodelist=range(self.n), dtype=float)

    @cached_property
    def neighbors(self) -> List[np.ndarray]:
        """Sorted neighbour index arrays, one per node."""
        csr = nx.to_scipy_sparse_array(self.g, nodelist=range(self.n), format="csr")
        csr.sort_indices()
        return [csr.indices[csr.indptr[v]:csr.indptr[v + 1]].astype(np.int64) for v in range(self.n)]

    def labelled_edges(self) -> List[Tuple[int, int]]:
        return [(self.labels[u], self.labels[w]) for u, w in self.edges]


def _parse_edge_lines(lines: Iterable[str]) -> List[Tuple[int, int]]:
    edges = []
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise EdgeListParseError(line_no, line.rstrip("\n"))
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise EdgeListParseError(line_no, line.rstrip("\n")) from None
    return edges


def load_edge_list(source: Union[BinaryIO, TextIO, Path, str], cleanup: CleanupPolicy = CleanupPolicy.NONE) -> Graph:
    """Read whitespace-separated integer pairs, one edge per line, '#' comments."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as f:
            edges = _parse_edge_lines(f)
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
        edges = _parse_edge_lines(io.StringIO(text))
    if not edges:
        raise EmptyGraphError("edge list contains no edges")
    graph = Graph.from_edges(edges, cleanup=cleanup)
    logger.info("loaded edge list: n=%d m=%d (cleanup=%s)", graph.n, graph.m, CleanupPolicy(cleanup).value)
    return graph


def write_edge_list(graph: Graph, stream: TextIO) -> None:
    for u, w in graph.labelled_edges():
        stream.write(f"{u} {w}\n")


def load_gml(path: Union[Path, str], cleanup: CleanupPolicy = CleanupPolicy.NONE) -> Graph:
    """GML input (e.g. political blogs), read as undirected."""
    text = Path(path).read_text(encoding="utf-8")
    if "multigraph" not in text:
        # political blogs repeats edges without declaring a multigraph
        text = re.sub(r"graph\s*\[", "graph [\n  multigraph 1", text, count=1)
    raw = nx.parse_gml(text, label="id")
    return Graph.from_edges(((int(u), int(w)) for u, w in raw.edges()), nodes=(int(v) for v in raw.nodes), cleanup=cleanup)


def karate_club() -> Graph:
    """Zachary karate club, labels 1..34, with each member's faction in the "club" attribute."""
    raw = nx.karate_club_graph()
    edges = [(u + 1, w + 1) for u, w in raw.edges]
    graph = Graph.from_edges(edges, nodes=range(1, raw.number_of_nodes() + 1))
    for v in raw.nodes:
        graph.g.nodes[v]["club"] = raw.nodes[v]["club"]
    return graph


def generate_small_world(
    n: int = 1000,
    k: int = 30,
    rewire_p: float = 0.5,
    seed: int = 0,
    variant: str = "both-endpoints",
) -> Graph:
    """Ring lattice of n nodes with k nearest neighbours, then rewired edge by edge.

    "both-endpoints" replaces a removed edge by one between two uniformly random
    distinct nodes; "classic" keeps the first endpoint and redraws the second.
    Self-loops and duplicates are rejected and redrawn, so m stays n*k/2.
    """
    if k % 2 or k <= 0:
        raise InvalidParameterError(f"k must be a positive even integer (got {k})")
    if k >= n:
        raise InvalidParameterError(f"k must be smaller than n (got k={k}, n={n})")
    if not 0.0 <= rewire_p <= 1.0:
        raise InvalidParameterError(f"rewire_p must lie in [0, 1] (got {rewire_p})")
    if variant not in ("both-endpoints", "classic"):
        raise InvalidParameterError(f"unknown rewiring variant {variant!r}")

    rng = derive_rng(seed)
    g = nx.Graph()
    g.add_nodes_from(range(n))
    lattice = [(i, (i + j) % n) for i in range(n) for j in range(1, k // 2 + 1)]
    g.add_edges_from(lattice)

    coins = rng.random(len(lattice))
    for (u, w), coin in zip(lattice, coins):
        if coin >= rewire_p:
            continue
        g.remove_edge(u, w)
        while True:
            if variant == "classic":
                a, b = u, int(rng.integers(n))
            else:
                a, b = (int(x) for x in rng.integers(n, size=2))
            if a != b and not g.has_edge(a, b):
                break
        g.add_edge(a, b)

    return Graph(g, labels=list(range(1, n + 1)))


def compute_stats(graph: Graph) -> GraphStats:
    """Summary statistics; path length and diameter are over the largest connected component."""
    g, n, m = graph.g, graph.n, graph.m
    degrees = np.fromiter((d for _, d in g.degree), dtype=float, count=n)
    avg_excess = float((degrees ** 2).sum() / degrees.sum() - 1.0) if m else 0.0

    component = sorted(max(nx.connected_components(g), key=len))
    avg_path, diameter = 0.0, 0
    if len(component) > 1:
        sub = nx.to_scipy_sparse_array(g, nodelist=component, format="csr")
        dist = shortest_path(sub, method="D", directed=False, unweighted=True)
        size = len(component)
        avg_path = float(dist.sum() / (size * (size - 1)))
        diameter = int(dist.max())

    return GraphStats(
        n=n,
        m=m,
        avg_degree=2.0 * m / n,
        avg_excess_degree=avg_excess,
        # nodes of degree < 2 count as 0
        avg_clustering_coefficient=float(nx.average_clustering(g)),
        avg_path_length=avg_path,
        diameter=diameter,
        density=2.0 * m / (n * (n - 1)) if n > 1 else 0.0,
    )
