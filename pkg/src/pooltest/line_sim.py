"""Monte-Carlo simulation of a testing-site line.

Groups arrive with i.i.d. sizes and i.i.d. types; samples inside a group are
i.i.d. Bernoulli with the group type's prevalence. The line is cut into
consecutive pools of M aligned at the first sample.

The line is generated in chunks of ``chunk_groups`` pools. Each chunk restarts
the arrival process at a pool boundary and draws from its own stream derived
from (seed, chunk index), so the output does not depend on the worker count.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from pooltest.models import ArrivalConfig, SimEstimate, StatusVector
from pooltest.pool_exec import pool_tests
from pooltest.seeding import derive_rng

logger = logging.getLogger("pooltest.line_sim")

SHUFFLE_STREAM = 1 << 32

# pools sharing an arrival group are correlated, so the standard error is
# taken over this many contiguous batches of pools
SE_BATCHES = 50


def _size_sampler(config: ArrivalConfig, rng: np.random.Generator) -> tuple[Callable[[int], np.ndarray], float]:
    if config.group_sizes is None:
        w = config.params.omega
        return (lambda k: rng.geometric(1.0 - w, size=k)), 1.0 / (1.0 - w)
    support = np.fromiter(config.group_sizes.keys(), dtype=np.int64)
    probs = np.fromiter(config.group_sizes.values(), dtype=float)
    probs = probs / probs.sum()
    return (lambda k: rng.choice(support, size=k, p=probs)), float(support @ probs)


def _group_sizes(config: ArrivalConfig, rng: np.random.Generator, length: int) -> np.ndarray:
    """Arrival group sizes covering ``length`` samples, the last one truncated."""
    if config.group_sizes is None and config.params.omega >= 1.0:
        return np.array([length], dtype=np.int64)
    draw, mean_size = _size_sampler(config, rng)
    batch = int(length / mean_size * 1.05) + 16
    parts, total = [], 0
    while total < length:
        part = draw(batch)
        parts.append(part)
        total += int(part.sum())
    sizes = np.concatenate(parts)
    ends = np.cumsum(sizes)
    last = int(np.searchsorted(ends, length))
    sizes = sizes[: last + 1].copy()
    sizes[-1] -= int(ends[last]) - length
    return sizes


def _chunk_bits(config: ArrivalConfig, index: int, length: int) -> np.ndarray:
    rng = derive_rng(config.seed, index)
    params = config.params
    sizes = _group_sizes(config, rng, length)
    types = rng.choice(params.K, size=sizes.size, p=np.asarray(params.pi) / np.sum(params.pi))
    positive_prob = 1.0 - np.asarray(params.r0, dtype=float)
    sample_types = np.repeat(types, sizes)
    return (rng.random(length) < positive_prob[sample_types]).astype(np.uint8)


def _line_bits(config: ArrivalConfig, workers: int = 1) -> np.ndarray:
    M = config.group_size
    chunk_lengths = []
    remaining = config.num_groups
    while remaining > 0:
        groups = min(config.chunk_groups, remaining)
        chunk_lengths.append(groups * M)
        remaining -= groups

    def build(index: int) -> np.ndarray:
        return _chunk_bits(config, index, chunk_lengths[index])

    if workers > 1 and len(chunk_lengths) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(build, range(len(chunk_lengths))))
    else:
        chunks = [build(i) for i in range(len(chunk_lengths))]
    logger.debug("generated %d chunks, %d samples", len(chunks), config.length)
    return np.concatenate(chunks)


def generate_line(config: ArrivalConfig, workers: int = 1) -> StatusVector:
    return StatusVector(bits=_line_bits(config, workers))


def _estimate(bits: np.ndarray, config: ArrivalConfig) -> SimEstimate:
    M = config.group_size
    per_pool = pool_tests(bits, M) / M
    G = per_pool.size
    if G >= 2 * SE_BATCHES:
        size = G // SE_BATCHES
        batches = per_pool[: size * SE_BATCHES].reshape(SE_BATCHES, size).mean(axis=1)
        std_error = float(batches.std(ddof=1) / np.sqrt(SE_BATCHES))
    else:
        std_error = float(per_pool.std(ddof=1) / np.sqrt(G)) if G > 1 else 0.0
    return SimEstimate(mean_cost=float(per_pool.mean()), std_error=std_error, num_groups=G, group_size=M)


def estimate_cost(config: ArrivalConfig, workers: int = 1) -> SimEstimate:
    """Pools of M consecutive samples."""
    return _estimate(_line_bits(config, workers), config)


def estimate_random_pooling_cost(config: ArrivalConfig, workers: int = 1) -> SimEstimate:
    """Same line, uniformly shuffled before pooling."""
    bits = _line_bits(config, workers)
    order = derive_rng(config.seed, SHUFFLE_STREAM).permutation(bits.size)
    return _estimate(bits[order], config)
