"""Independent-cascade infections truncated at a generation depth.

Seeds are infected. Generation by generation, every node infected at depth
d < D makes one trial per not-yet-infected neighbour, succeeding with
probability phi; the first success infects the neighbour at depth d + 1.
"""
import logging
from typing import Optional

import numpy as np

from pooltest.errors import InvalidParameterError
from pooltest.graph_io import Graph
from pooltest.models import CascadeConfig, StatusVector

logger = logging.getLogger("pooltest.cascade_sim")


def run_cascade(
    graph: Graph,
    config: CascadeConfig,
    rng: Optional[np.random.Generator] = None,
    uniforms: Optional[np.ndarray] = None,
) -> StatusVector:
    """Infect a random seed set and propagate.

    ``uniforms`` optionally fixes the coin of every directed edge (an n x n
    array; the trial u -> w succeeds when uniforms[u, w] < phi), which couples
    runs at different phi.
    """
    n = graph.n
    if config.num_seeds > n:
        raise InvalidParameterError(f"cannot pick {config.num_seeds} seeds from {n} nodes")
    if rng is None:
        rng = np.random.default_rng(config.seed)

    infected = np.zeros(n, dtype=bool)
    seeds = rng.choice(n, size=config.num_seeds, replace=False)
    infected[seeds] = True
    frontier = [int(s) for s in seeds]
    neighbors = graph.neighbors

    for _ in range(config.depth):
        if not frontier or config.phi <= 0.0:
            break
        next_frontier = []
        for u in frontier:
            candidates = neighbors[u][~infected[neighbors[u]]]
            if candidates.size == 0:
                continue
            coins = uniforms[u, candidates] if uniforms is not None else rng.random(candidates.size)
            hits = candidates[coins < config.phi]
            infected[hits] = True
            next_frontier.extend(hits.tolist())
        frontier = next_frontier

    return StatusVector(bits=infected)


def measure_prevalence(status: StatusVector) -> float:
    if len(status) == 0:
        raise InvalidParameterError("prevalence of an empty population is undefined")
    return float(status.bits.sum()) / len(status)
