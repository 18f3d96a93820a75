"""CSV reports: the analytic tables, line simulations and graph pooling experiments.

Every report is a pandas frame rendered with a header row, '.' decimals and six
significant digits, so a fixed seed gives byte-identical output.
"""
import io
import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from pooltest.cascade_sim import measure_prevalence, run_cascade
from pooltest.cost_model import (
    DEFAULT_M_MAX,
    REGULAR_LOWEST_COST,
    TABLE_GROUP_SIZES,
    cost_iid,
    cost_markov_special,
    optimal_group_size,
    regular_crossover,
    savings_ratio,
)
from pooltest.errors import InvalidParameterError
from pooltest.graph_io import Graph
from pooltest.line_sim import estimate_cost, estimate_random_pooling_cost
from pooltest.models import (
    ArrivalConfig,
    CascadeConfig,
    ExperimentReport,
    GraphStats,
    ModelParams,
    PoolingStrategy,
    RunRecord,
    SavingsMode,
    SeedCountSummary,
    Strategy,
    TableName,
)
from pooltest.pool_exec import run_dorfman
from pooltest.pooling_strategy import random_pooling
from pooltest.seeding import derive_rng

logger = logging.getLogger("pooltest.reports")

FLOAT_FORMAT = "%.6g"
R1_VALUES = tuple(k / 100 for k in range(1, 11))
OMEGAS = tuple(k / 10 for k in range(10))

CASCADE_STREAM = 0
STRATEGY_STREAM = 1


def to_csv(frame: pd.DataFrame) -> str:
    buf = io.StringIO()
    frame.to_csv(buf, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buf.getvalue()


def _omega_column(w: float) -> str:
    return f"omega={w:.1f}"


# --- Analytic tables ---

def table_frame(which: TableName, M_max: int = DEFAULT_M_MAX) -> pd.DataFrame:
    """One row per prevalence r1 = 1%..10%, one column per omega.

    The omega = 0 entries of every table use the published pool sizes
    ``TABLE_GROUP_SIZES``; the optimal tables take the argmin elsewhere.
    """
    which = TableName(which)
    rows = []
    for r1, M, reference in zip(R1_VALUES, TABLE_GROUP_SIZES, REGULAR_LOWEST_COST):
        row = {"r1": r1}
        if which is TableName.COST:
            row["M"] = M
            costs = [cost_markov_special(r1, w, M) for w in OMEGAS]
            row.update({_omega_column(w): c for w, c in zip(OMEGAS, costs)})
            row["regular"] = reference
            row["regular_crossover"] = regular_crossover(OMEGAS, costs, reference)
        elif which is TableName.SAVING:
            row["M"] = M
            for w in OMEGAS[1:]:
                row[_omega_column(w)] = savings_ratio(ModelParams.two_type(r1, w), M, SavingsMode.FIXED)
        elif which is TableName.SIZE_OPT:
            row[_omega_column(0.0)] = M
            for w in OMEGAS[1:]:
                row[_omega_column(w)] = optimal_group_size(ModelParams.two_type(r1, w), M_max).argmin_M
        elif which is TableName.COST_OPT:
            costs = [cost_markov_special(r1, 0.0, M)]
            costs += [optimal_group_size(ModelParams.two_type(r1, w), M_max).min_cost for w in OMEGAS[1:]]
            row.update({_omega_column(w): c for w, c in zip(OMEGAS, costs)})
            row["regular"] = reference
            row["regular_crossover"] = regular_crossover(OMEGAS, costs, reference)
        else:
            for w in OMEGAS[1:]:
                row[_omega_column(w)] = savings_ratio(
                    ModelParams.two_type(r1, w), mode=SavingsMode.OPTIMAL, M_max=M_max, baseline_M=M
                )
        rows.append(row)
    return pd.DataFrame(rows)


def table_csv(which: TableName, M_max: int = DEFAULT_M_MAX) -> str:
    return to_csv(table_frame(which, M_max))


# --- Line simulation ---

def line_frame(config: ArrivalConfig, shuffle: bool = False, workers: int = 1) -> pd.DataFrame:
    """Simulated cost next to the closed form.

    ``z`` is measured against the closed form for consecutive pooling and
    against the i.i.d. cost for random pooling, which breaks the correlation.
    """
    params = config.params
    if params.K != 2 or list(params.r0) != [0.0, 1.0]:
        raise InvalidParameterError("the line report compares against the two-type closed form")
    r1, w, M = params.pi[0], params.omega, config.group_size
    estimator = estimate_random_pooling_cost if shuffle else estimate_cost
    estimate = estimator(config, workers=workers)

    closed_form = cost_markov_special(r1, w, M)
    iid = cost_iid(1.0 - r1, M)
    reference = iid if shuffle else closed_form
    diff = estimate.mean_cost - reference
    if estimate.std_error > 0:
        z = diff / estimate.std_error
    else:
        z = 0.0 if diff == 0 else math.copysign(math.inf, diff)

    return pd.DataFrame([{
        "r1": r1,
        "omega": w,
        "group_size": M,
        "num_groups": estimate.num_groups,
        "seed": config.seed,
        "pooling": "random" if shuffle else "consecutive",
        "estimate": estimate.mean_cost,
        "std_error": estimate.std_error,
        "closed_form": closed_form,
        "iid_cost": iid,
        "z": z,
    }])


# --- Graph experiments ---

_RANGE = re.compile(r"^\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?$")


def parse_seed_range(text: str) -> List[int]:
    """Seed counts from "A..B" (inclusive) or a single count "A"."""
    match = _RANGE.match(str(text))
    if not match:
        raise InvalidParameterError(f"seed-count range must look like A..B or A (got {text!r})")
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) else lo
    if lo < 1 or hi < lo:
        raise InvalidParameterError(f"seed-count range must satisfy 1 <= A <= B (got {text!r})")
    return list(range(lo, hi + 1))


def _one_run(
    graph: Graph,
    group_size: int,
    config: CascadeConfig,
    run: int,
    strategy: Strategy,
    hier_sigma: Optional[PoolingStrategy],
) -> RunRecord:
    cascade_rng = derive_rng(config.seed, config.num_seeds, run, CASCADE_STREAM)
    status = run_cascade(graph, config, rng=cascade_rng)
    if strategy is Strategy.HIER:
        sigma = hier_sigma
    else:
        sigma = random_pooling(graph.n, derive_rng(config.seed, config.num_seeds, run, STRATEGY_STREAM))
    outcome = run_dorfman(status, sigma, group_size)
    return RunRecord(
        num_seeds=config.num_seeds,
        run=run,
        prevalence=measure_prevalence(status),
        total_tests=outcome.total_tests,
    )


def _std_error(values: np.ndarray) -> float:
    return float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0


def summarize(records: Sequence[RunRecord], n: int, group_size: int) -> SeedCountSummary:
    prevalences = np.array([r.prevalence for r in records])
    tests = np.array([r.total_tests for r in records], dtype=np.int64)
    mean_prevalence = float(prevalences.mean())
    return SeedCountSummary(
        num_seeds=records[0].num_seeds,
        runs=len(records),
        mean_prevalence=mean_prevalence,
        prevalence_std_error=_std_error(prevalences),
        mean_cost=float(tests.sum()) / (n * len(records)),
        cost_std_error=_std_error(tests / n),
        theory_cost=cost_iid(1.0 - mean_prevalence, group_size),
    )


def run_graph_experiment(
    graph: Graph,
    dataset: str,
    group_size: int,
    seed_counts: Sequence[int],
    runs: int,
    strategy: Strategy,
    phi: float = 0.1,
    depth: int = 2,
    seed: int = 0,
    hier_sigma: Optional[PoolingStrategy] = None,
    workers: int = 1,
) -> ExperimentReport:
    """Cascades scored under one pooling strategy, ``runs`` per seed count.

    Run i at |S| = s draws its cascade from (seed, s, i), so hier and random
    reports with the same seed score the same status vectors.
    """
    strategy = Strategy(strategy)
    if runs < 1:
        raise InvalidParameterError(f"runs must be >= 1 (got {runs})")
    if group_size < 1:
        raise InvalidParameterError(f"group size must be >= 1 (got {group_size})")
    if strategy is Strategy.HIER:
        if hier_sigma is None:
            raise InvalidParameterError("hierarchical experiments need the pooling permutation")
        if len(hier_sigma) != graph.n:
            raise InvalidParameterError("pooling permutation does not match the graph")

    report = ExperimentReport(
        dataset=dataset, n=graph.n, group_size=group_size, strategy=strategy,
        phi=phi, depth=depth, seed=seed, runs=runs,
    )
    # build the neighbour arrays once, before any worker thread reads them
    _ = graph.neighbors

    for num_seeds in seed_counts:
        config = CascadeConfig(phi=phi, depth=depth, num_seeds=num_seeds, seed=seed)

        def one(run: int) -> RunRecord:
            return _one_run(graph, group_size, config, run, strategy, hier_sigma)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                records = list(pool.map(one, range(runs)))
        else:
            records = [one(run) for run in range(runs)]

        report.records.extend(records)
        summary = summarize(records, graph.n, group_size)
        report.summaries.append(summary)
        logger.info(
            "%s |S|=%d: prevalence %.4f, cost %.4f (theory %.4f)",
            dataset, num_seeds, summary.mean_prevalence, summary.mean_cost, summary.theory_cost,
        )
    return report


def experiment_frame(report: ExperimentReport, per_run: bool = False) -> pd.DataFrame:
    meta = {
        "dataset": report.dataset,
        "n": report.n,
        "group_size": report.group_size,
        "strategy": report.strategy.value,
        "phi": report.phi,
        "depth": report.depth,
        "seed": report.seed,
    }
    if per_run:
        rows = [{**meta, **r.model_dump()} for r in report.records]
        columns = list(meta) + ["num_seeds", "run", "prevalence", "total_tests"]
    else:
        rows = [{**meta, **s.model_dump()} for s in report.summaries]
        columns = list(meta) + list(SeedCountSummary.model_fields)
    return pd.DataFrame(rows, columns=columns)


# --- Graph statistics ---

STATS_COLUMNS = {
    "n": "Number of nodes",
    "m": "Number of edges",
    "avg_degree": "Average degree",
    "avg_excess_degree": "Average excess degree",
    "avg_clustering_coefficient": "Average clustering coefficient",
    "avg_path_length": "Average path length",
    "diameter": "Diameter",
    "density": "Density",
}


def stats_frame(dataset: str, stats: GraphStats) -> pd.DataFrame:
    row = {"Dataset": dataset}
    row.update({label: getattr(stats, field) for field, label in STATS_COLUMNS.items()})
    return pd.DataFrame([row])
