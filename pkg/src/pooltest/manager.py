import logging
import sys
from functools import cached_property
from typing import Optional

import pandas as pd
from pydantic import ValidationError

from pooltest.cache import StrategyCache, graph_fingerprint
from pooltest.cost_model import DEFAULT_M_MAX
from pooltest.datasets import DatasetRegistry
from pooltest.graph_io import Graph, compute_stats
from pooltest.models import ArrivalConfig, CleanupPolicy, ModelParams, PoolingStrategy, Strategy, TableName
from pooltest.pooling_strategy import dendrogram_csv, hierarchical_pooling
from pooltest.reports import (
    experiment_frame,
    line_frame,
    parse_seed_range,
    run_graph_experiment,
    stats_frame,
    table_csv,
    to_csv,
)
from pooltest.sampled_graph import build_sampled_graph
from pooltest.settings import PoolTestSettings

logger = logging.getLogger("pooltest-manager")

HIER_KEY = "hier-sigma"


class PoolTestManager:
    def __init__(self, settings: Optional[PoolTestSettings] = None):
        self.settings = settings or PoolTestSettings()
        self.registry = DatasetRegistry(self.settings)

    @cached_property
    def cache(self) -> StrategyCache:
        return StrategyCache(self.settings.resolved_cache_path)

    def _workers(self, workers: Optional[int]) -> int:
        return workers or self.settings.workers

    def _load(self, dataset: str, cleanup: Optional[str]) -> Graph:
        policy = CleanupPolicy(cleanup) if cleanup else None
        graph = self.registry.load(dataset, cleanup=policy)
        print(f"📂 {dataset}: n={graph.n} m={graph.m}", file=sys.stderr)
        return graph

    def hierarchical_strategy(self, graph: Graph) -> PoolingStrategy:
        """Hierarchical permutation of a graph, computed once and cached by content."""
        fingerprint = graph_fingerprint(graph)
        cached = self.cache.get(fingerprint, HIER_KEY)
        if cached is not None:
            try:
                strategy = PoolingStrategy(sigma=cached)
            except ValidationError:
                strategy = None
            if strategy is not None and len(strategy) == graph.n:
                logger.info("hierarchical strategy cache hit (%s)", fingerprint)
                return strategy
            logger.warning("discarding unusable cached strategy (%s)", fingerprint)
            print("⚠️ Cached pooling strategy is unusable, rebuilding it", file=sys.stderr)
            self.cache.invalidate(fingerprint, HIER_KEY)

        print(f"🧮 Building hierarchical pooling strategy for {graph.n} nodes...", file=sys.stderr)
        strategy, _ = hierarchical_pooling(build_sampled_graph(graph))
        self.cache.set(fingerprint, HIER_KEY, strategy.sigma.tolist())
        return strategy

    # --- TABLES ---
    def tables_run(self, table: str = "cost", group_size_max: int = DEFAULT_M_MAX):
        return table_csv(TableName(table), group_size_max)

    # --- LINE ---
    def line_run(
        self,
        r1: float = 0.05,
        omega: float = 0.5,
        group_size: int = 5,
        num_groups: int = 1_000_000,
        seed: int = 0,
        random_pooling: bool = False,
        workers: Optional[int] = None,
    ):
        config = ArrivalConfig(
            params=ModelParams.two_type(r1, omega),
            group_size=group_size,
            num_groups=num_groups,
            seed=seed,
        )
        print(f"🚶 Simulating {config.length} samples (M={group_size}, omega={omega})...", file=sys.stderr)
        return to_csv(line_frame(config, shuffle=bool(random_pooling), workers=self._workers(workers)))

    # --- GRAPH ---
    def graph_run(
        self,
        dataset: str,
        group_size: int = 10,
        num_seeds: str = "1..5",
        runs: int = 10_000,
        strategy: str = "hier",
        phi: float = 0.1,
        depth: int = 2,
        cleanup: Optional[str] = None,
        seed: int = 0,
        per_run: bool = False,
        workers: Optional[int] = None,
    ):
        strategy = Strategy(strategy)
        seed_counts = parse_seed_range(num_seeds)
        graph = self._load(dataset, cleanup)
        hier_sigma = self.hierarchical_strategy(graph) if strategy is Strategy.HIER else None

        print(f"🚀 {runs} cascades per |S| in {seed_counts[0]}..{seed_counts[-1]} ({strategy.value})...", file=sys.stderr)
        report = run_graph_experiment(
            graph,
            dataset,
            group_size=group_size,
            seed_counts=seed_counts,
            runs=runs,
            strategy=strategy,
            phi=phi,
            depth=depth,
            seed=seed,
            hier_sigma=hier_sigma,
            workers=self._workers(workers),
        )
        return to_csv(experiment_frame(report, per_run=bool(per_run)))

    def graph_stats(self, dataset: str, cleanup: Optional[str] = None):
        graph = self._load(dataset, cleanup)
        return to_csv(stats_frame(dataset, compute_stats(graph)))

    def graph_dendrogram(self, dataset: str, cleanup: Optional[str] = None):
        graph = self._load(dataset, cleanup)
        strategy, dendrogram = hierarchical_pooling(build_sampled_graph(graph))
        self.cache.set(graph_fingerprint(graph), HIER_KEY, strategy.sigma.tolist())
        return dendrogram_csv(dendrogram)

    # --- DATASET ---
    def dataset_list(self):
        rows = []
        for name in self.registry.names():
            entry = self.registry.manifest.get(name)
            rows.append({
                "name": name,
                "description": entry.description if entry else "built in",
                "present": self.registry.is_present(name),
                "path": str(self.registry.path_for(name)) if entry else "",
            })
        return to_csv(pd.DataFrame(rows, columns=["name", "description", "present", "path"]))

    def dataset_fetch(self, name: str, force: bool = False):
        print(f"⬇️  Fetching {name}...", file=sys.stderr)
        path = self.registry.fetch(name, force=bool(force))
        print(f"✅ {name} saved to {path}", file=sys.stderr)
        return ""
