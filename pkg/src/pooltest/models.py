from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

PROB_TOL = 1e-12


class TableName(str, Enum):
    COST = "cost"
    SAVING = "saving"
    SIZE_OPT = "size_opt"
    COST_OPT = "cost_opt"
    SAVING_OPT = "saving_opt"


class SavingsMode(str, Enum):
    FIXED = "fixed"
    OPTIMAL = "optimal"


class Strategy(str, Enum):
    HIER = "hier"
    RANDOM = "random"


class CleanupPolicy(str, Enum):
    NONE = "none"
    DROP_ISOLATED = "drop-isolated"
    LARGEST_COMPONENT = "largest-component"


# --- Analytic model ---

class ModelParams(BaseModel):
    """Markov-modulated stream: K group types, type mix pi, per-type negative
    probabilities r0 and geometric continuation omega."""
    model_config = ConfigDict(frozen=True)

    K: int = Field(ge=1)
    pi: List[float]
    r0: List[float]
    omega: float = 0.0

    @model_validator(mode="after")
    def _check_invariants(self):
        if len(self.pi) != self.K or len(self.r0) != self.K:
            raise ValueError(f"pi and r0 must both have length K={self.K}")
        if any(p < 0 for p in self.pi):
            raise ValueError("pi must be non-negative")
        if abs(sum(self.pi) - 1.0) > PROB_TOL:
            raise ValueError(f"pi must sum to 1 (got {sum(self.pi)!r})")
        if any(not 0.0 <= r <= 1.0 for r in self.r0):
            raise ValueError("every r0[k] must lie in [0, 1]")
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError("omega must lie in [0, 1]")
        return self

    @classmethod
    def two_type(cls, r1: float, omega: float) -> "ModelParams":
        """Pure positive / pure negative groups, the serial-correlation special case."""
        return cls(K=2, pi=[r1, 1.0 - r1], r0=[0.0, 1.0], omega=omega)

    def with_omega(self, omega: float) -> "ModelParams":
        return ModelParams(K=self.K, pi=list(self.pi), r0=list(self.r0), omega=omega)


class CostPoint(BaseModel):
    M: int
    cost: float


class CostCurve(BaseModel):
    entries: List[CostPoint]
    argmin_M: int

    @model_validator(mode="after")
    def _check_sorted(self):
        sizes = [e.M for e in self.entries]
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("entries must be sorted by M strictly increasing")
        if self.argmin_M not in sizes:
            raise ValueError("argmin_M must be one of the tabulated sizes")
        return self

    @property
    def min_cost(self) -> float:
        return next(e.cost for e in self.entries if e.M == self.argmin_M)


# --- Status vectors and strategies ---

class StatusVector(BaseModel):
    """Per-sample (or per-node) infection indicators, 1 = positive."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bits: np.ndarray

    @field_validator("bits", mode="before")
    @classmethod
    def _as_bits(cls, v):
        arr = np.asarray(v)
        if arr.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("bits must contain only 0 and 1")
        arr = arr.astype(np.uint8)
        arr.flags.writeable = False
        return arr

    def __len__(self) -> int:
        return int(self.bits.size)


class PoolingStrategy(BaseModel):
    """A permutation sigma of node indices 0..n-1; consecutive blocks of M form the pools."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sigma: np.ndarray

    @field_validator("sigma", mode="before")
    @classmethod
    def _as_permutation(cls, v):
        arr = np.array(v, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("sigma must be a bijection on 0..n-1")
        if arr.size and (arr.min() < 0 or arr.max() >= arr.size
                         or not (np.bincount(arr, minlength=arr.size) == 1).all()):
            raise ValueError("sigma must be a bijection on 0..n-1")
        arr.flags.writeable = False
        return arr

    @classmethod
    def identity(cls, n: int) -> "PoolingStrategy":
        return cls(sigma=np.arange(n))

    def __len__(self) -> int:
        return int(self.sigma.size)


class TestOutcome(BaseModel):
    __test__ = False

    n: int
    group_size: int
    total_tests: int = Field(ge=0)
    groups_positive: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_bounds(self):
        pools = -(-self.n // self.group_size)
        if not pools <= self.total_tests <= pools + self.n:
            raise ValueError("total_tests must lie in [ceil(n/M), ceil(n/M) + n]")
        return self

    @property
    def relative_cost(self) -> float:
        return self.total_tests / self.n


# --- Line simulation ---

class ArrivalConfig(BaseModel):
    """A simulated testing-site line.

    ``group_sizes`` is an explicit size -> probability table (A1); when omitted the
    group sizes are geometric with parameter 1 - omega (A1+).
    """
    params: ModelParams
    group_sizes: Optional[Dict[int, float]] = None
    group_size: int = Field(ge=1, description="pool size M")
    num_groups: int = Field(ge=1)
    seed: int = Field(default=0, ge=0)
    chunk_groups: int = Field(default=1 << 16, ge=1)

    @field_validator("group_sizes")
    @classmethod
    def _check_table(cls, v):
        if v is None:
            return v
        if not v:
            raise ValueError("group size table is empty")
        if any(size < 1 or size > 10_000 for size in v):
            raise ValueError("group sizes must be integers in [1, 10000]")
        if any(p < 0 for p in v.values()):
            raise ValueError("group size probabilities must be non-negative")
        total = sum(v.values())
        if total <= 0:
            raise ValueError("group size table has zero total probability")
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"group size probabilities must sum to 1 (got {total!r})")
        return dict(sorted(v.items()))

    @property
    def length(self) -> int:
        return self.num_groups * self.group_size


class SimEstimate(BaseModel):
    mean_cost: float
    std_error: float = Field(ge=0)
    num_groups: int
    group_size: int

    @model_validator(mode="after")
    def _check_range(self):
        lo, hi = 1.0 / self.group_size, (self.group_size + 1) / self.group_size
        if not lo - 1e-12 <= self.mean_cost <= hi + 1e-12:
            raise ValueError("mean_cost must lie in [1/M, (M+1)/M]")
        return self


# --- Graph pooling ---

class MergeStep(BaseModel):
    step: int
    left_id: int
    right_id: int
    covariance: float


class Dendrogram(BaseModel):
    n: int
    merges: List[MergeStep] = Field(default_factory=list)


class CascadeConfig(BaseModel):
    phi: float = Field(default=0.1, ge=0.0, le=1.0)
    depth: int = Field(default=2, ge=0)
    num_seeds: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)


class GraphStats(BaseModel):
    n: int
    m: int
    avg_degree: float
    avg_excess_degree: float
    avg_clustering_coefficient: float
    avg_path_length: float
    diameter: int
    density: float


class RunRecord(BaseModel):
    num_seeds: int
    run: int
    prevalence: float
    total_tests: int


class SeedCountSummary(BaseModel):
    num_seeds: int
    runs: int
    mean_prevalence: float
    prevalence_std_error: float
    mean_cost: float
    cost_std_error: float
    theory_cost: float


class ExperimentReport(BaseModel):
    dataset: str
    n: int
    group_size: int
    strategy: Strategy
    phi: float
    depth: int
    seed: int
    runs: int
    records: List[RunRecord] = Field(default_factory=list)
    summaries: List[SeedCountSummary] = Field(default_factory=list)
