"""Sampled graphs: a graph paired with a bivariate distribution over ordered node pairs.

The distribution samples paths of length one and two,
p(u, w) = c * (A + A^2 / 2)(u, w), so the covariance
q(u, w) = p(u, w) - p_U(u) p_W(w) measures how much more often u and w are
sampled together than chance.
"""
import logging
from typing import Collection, Iterable, Sequence

import numpy as np

from pooltest.errors import CapacityError, EmptyGraphError, InvalidParameterError
from pooltest.graph_io import Graph

logger = logging.getLogger("pooltest.sampled_graph")

MAX_DENSE_NODES = 5000


class SampledGraph:
    """Immutable once built; safe to share between readers."""

    def __init__(self, graph: Graph, p_uw: np.ndarray):
        self.graph = graph
        self.p_uw = p_uw
        self.p_u = p_uw.sum(axis=1)
        self.p_w = p_uw.sum(axis=0)
        for arr in (self.p_uw, self.p_u, self.p_w):
            arr.flags.writeable = False

    @property
    def n(self) -> int:
        return self.p_uw.shape[0]

    def covariance_matrix(self) -> np.ndarray:
        return self.p_uw - np.outer(self.p_u, self.p_w)

    def _index(self, nodes: Iterable[int]) -> np.ndarray:
        idx = np.fromiter(nodes, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise InvalidParameterError(f"node index out of range 0..{self.n - 1}")
        return idx


def build_sampled_graph(graph: Graph) -> SampledGraph:
    n = graph.n
    if n < 2:
        raise InvalidParameterError("a sampled graph needs at least two nodes")
    if graph.m == 0:
        raise EmptyGraphError("graph has no edges; the sampling distribution is undefined")
    if n > MAX_DENSE_NODES:
        raise CapacityError(f"graph has {n} nodes; dense sampled graphs are limited to {MAX_DENSE_NODES}")
    A = graph.adjacency_matrix()
    S = A + 0.5 * (A @ A)
    # np.sum uses pairwise summation
    c = 1.0 / np.sum(S)
    logger.debug("sampled graph: n=%d, normaliser c=%.6g", n, c)
    return SampledGraph(graph, c * S)


def covariance(sg: SampledGraph, u: int, w: int) -> float:
    u, w = sg._index((u, w))
    return float(sg.p_uw[u, w] - sg.p_u[u] * sg.p_w[w])


def set_covariance(sg: SampledGraph, S1: Collection[int], S2: Collection[int]) -> float:
    a, b = sg._index(S1), sg._index(S2)
    joint = sg.p_uw[np.ix_(a, b)].sum()
    return float(joint - sg.p_u[a].sum() * sg.p_w[b].sum())


def is_community(sg: SampledGraph, S: Collection[int]) -> bool:
    if len(S) == 0:
        raise InvalidParameterError("a community must be non-empty")
    return set_covariance(sg, S, S) >= 0.0


def modularity(sg: SampledGraph, partition: Sequence[Collection[int]]) -> float:
    """Sum of the self-covariances of the parts of a partition of V."""
    seen = np.zeros(sg.n, dtype=np.int64)
    for part in partition:
        seen[sg._index(part)] += 1
    if not (seen == 1).all():
        raise InvalidParameterError("partition must cover every node exactly once")
    return sum(set_covariance(sg, part, part) for part in partition)
