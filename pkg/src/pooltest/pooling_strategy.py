"""Pooling strategies: hierarchical agglomerative merging by set covariance, and random pooling.

Every node starts in its own set. The pair of live sets with the largest
covariance is merged by appending the higher-id set to the lower-id one, which
keeps the relative order inside both sets. Merging continues down to a single
set, whose order is the pooling permutation.
"""
import io
import logging
from typing import Dict, List, Tuple, Union

import numpy as np
import pandas as pd

from pooltest.errors import InvalidParameterError
from pooltest.models import Dendrogram, MergeStep, PoolingStrategy
from pooltest.sampled_graph import SampledGraph

logger = logging.getLogger("pooltest.pooling_strategy")

# relative to the largest initial |q(u, w)|
TIE_RTOL = 1e-11


class HierarchicalMerger:
    """Merge state: live sets, their pairwise covariances and the merge log.

    ``cov`` is symmetric and holds q(S_i, S_j) for live ids, self-covariance on
    the diagonal. ``_search`` mirrors its strict upper triangle with -inf for
    dead ids, so a row-major argmax yields the lexicographically smallest
    (i, j) among the maximal pairs. Covariances within ``tie_tol`` of the
    maximum count as ties, so rounding in the incremental updates cannot
    reorder pairs whose exact covariances are equal.
    """

    def __init__(self, sg: SampledGraph):
        n = sg.n
        if n < 2:
            raise InvalidParameterError("hierarchical pooling needs at least two nodes")
        self.n = n
        self.sets: Dict[int, List[int]] = {i: [i] for i in range(n)}
        cov = sg.covariance_matrix()
        # row and column sums round differently; keep cov exactly symmetric
        self.cov = 0.5 * (cov + cov.T)
        self.tie_tol = TIE_RTOL * float(np.abs(self.cov).max())
        self.alive = np.ones(n, dtype=bool)
        self._search = np.triu(self.cov, k=1)
        self._search[np.tril_indices(n)] = -np.inf
        self.dendrogram = Dendrogram(n=n)

    @property
    def live_count(self) -> int:
        return len(self.sets)

    def step(self) -> MergeStep:
        if self.live_count < 2:
            raise InvalidParameterError("only one set remains")
        best = self._search.max()
        flat = int(np.argmax(self._search >= best - self.tie_tol))
        i, j = divmod(flat, self.n)
        q_ij = float(self.cov[i, j])

        self.sets[i].extend(self.sets.pop(j))
        self.alive[j] = False

        diag = self.cov[i, i] + 2.0 * q_ij + self.cov[j, j]
        row = self.cov[i] + self.cov[j]
        row[i] = diag
        self.cov[i, :] = row
        self.cov[:, i] = row

        self._search[j, :] = -np.inf
        self._search[:, j] = -np.inf
        before = self.alive[:i]
        self._search[:i, i] = np.where(before, row[:i], -np.inf)
        after = self.alive[i + 1:]
        self._search[i, i + 1:] = np.where(after, row[i + 1:], -np.inf)

        merge = MergeStep(step=len(self.dendrogram.merges) + 1, left_id=i, right_id=j, covariance=q_ij)
        self.dendrogram.merges.append(merge)
        return merge

    def run(self) -> Tuple[PoolingStrategy, Dendrogram]:
        while self.live_count > 1:
            self.step()
        (survivor,) = self.sets.values()
        return PoolingStrategy(sigma=survivor), self.dendrogram


def hierarchical_pooling(sg: SampledGraph) -> Tuple[PoolingStrategy, Dendrogram]:
    merger = HierarchicalMerger(sg)
    strategy, dendrogram = merger.run()
    logger.info("hierarchical pooling: %d nodes, %d merges", sg.n, len(dendrogram.merges))
    return strategy, dendrogram


def random_pooling(n: int, seed: Union[int, np.random.Generator]) -> PoolingStrategy:
    if n < 1:
        raise InvalidParameterError("random pooling needs at least one node")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return PoolingStrategy(sigma=rng.permutation(n))


def dendrogram_csv(dendrogram: Dendrogram) -> str:
    frame = pd.DataFrame(
        [m.model_dump() for m in dendrogram.merges],
        columns=["step", "left_id", "right_id", "covariance"],
    )
    buf = io.StringIO()
    frame.to_csv(buf, index=False, float_format="%.6g", lineterminator="\n")
    return buf.getvalue()
