"""Expected relative cost of Dorfman two-stage testing.

Costs are per sample: the expected number of tests for a pool of M divided by M.
Streams are either i.i.d. Bernoulli or Markov-modulated by a hidden chain of
group types (geometric group sizes, i.i.d. group types, homogeneous groups).
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from pooltest.errors import InvalidParameterError
from pooltest.models import CostCurve, CostPoint, ModelParams, SavingsMode

logger = logging.getLogger("pooltest.cost_model")

DEFAULT_M_MAX = 64

# Lowest expected relative cost of (d1,d2)-regular pooling matrices for
# r1 = 1%, 2%, ..., 10%. Reference values only; that method is not implemented.
REGULAR_LOWEST_COST: Tuple[float, ...] = (
    0.1218, 0.1881, 0.2545, 0.3147, 0.3678, 0.4166, 0.4627, 0.5035, 0.5416, 0.5760,
)

# Published group sizes for r1 = 1%, ..., 10%: every table pools these at
# omega = 0. They are the i.i.d. optima except at 7%, where M=5 is kept
# although M=4 is marginally cheaper (0.5019 vs 0.5043).
TABLE_GROUP_SIZES: Tuple[int, ...] = (11, 8, 6, 6, 5, 5, 5, 4, 4, 4)


def _check_group_size(M: int) -> int:
    if int(M) != M or M < 1:
        raise InvalidParameterError(f"group size M must be a positive integer (got {M!r})")
    return int(M)


def _check_probability(name: str, value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise InvalidParameterError(f"{name} must lie in [0, 1] (got {value!r})")
    return float(value)


def prevalence(params: ModelParams) -> Tuple[float, float]:
    """Return (r0, r1) for a randomly selected sample."""
    r0 = float(np.dot(params.pi, params.r0))
    return r0, 1.0 - r0


def cost_iid(r0: float, M: int) -> float:
    _check_probability("r0", r0)
    M = _check_group_size(M)
    return (M + 1) / M - r0 ** M


def transition_matrix(params: ModelParams) -> np.ndarray:
    """Hidden type chain: stay with probability omega, otherwise redraw a type from pi."""
    pi = np.asarray(params.pi, dtype=float)
    w = params.omega
    return (1.0 - w) * np.tile(pi, (params.K, 1)) + w * np.eye(params.K)


def prob_all_negative(params: ModelParams, M: int) -> float:
    """P(X(1) = ... = X(M) = 0) = pi R (P R)^(M-1) 1."""
    M = _check_group_size(M)
    P = transition_matrix(params)
    r = np.asarray(params.r0, dtype=float)
    v = np.ones(params.K)
    for _ in range(M - 1):
        v = P @ (r * v)
    return float(np.dot(params.pi, r * v))


def cost_markov(params: ModelParams, M: int) -> float:
    M = _check_group_size(M)
    return (M + 1) / M - prob_all_negative(params, M)


def cost_markov_special(r1: float, omega: float, M: int) -> float:
    """Closed form for two pure types (all-positive / all-negative groups)."""
    _check_probability("r1", r1)
    _check_probability("omega", omega)
    M = _check_group_size(M)
    r0 = 1.0 - r1
    return (M + 1) / M - r0 * (omega + (1.0 - omega) * r0) ** (M - 1)


def lower_bound(params: ModelParams, M: int) -> float:
    M = _check_group_size(M)
    r0, _ = prevalence(params)
    w = params.omega
    return (M + 1) / M - r0 * (w + (1.0 - w) * r0) ** (M - 1)


def cost_curve(params: ModelParams, M_max: int = DEFAULT_M_MAX) -> CostCurve:
    if int(M_max) != M_max or M_max < 2:
        raise InvalidParameterError(f"M_max must be an integer >= 2 (got {M_max!r})")
    entries = [CostPoint(M=M, cost=cost_markov(params, M)) for M in range(1, int(M_max) + 1)]
    # min() keeps the first of equal costs, i.e. the smaller M
    best = min(entries, key=lambda e: e.cost)
    return CostCurve(entries=entries, argmin_M=best.M)


def optimal_group_size(params: ModelParams, M_max: int = DEFAULT_M_MAX) -> CostCurve:
    curve = cost_curve(params, M_max)
    logger.debug("optimal M=%d (cost %.6f) for %s", curve.argmin_M, curve.min_cost, params)
    return curve


def savings_ratio(
    params: ModelParams,
    M: Optional[int] = None,
    mode: SavingsMode = SavingsMode.FIXED,
    M_max: int = DEFAULT_M_MAX,
    baseline_M: Optional[int] = None,
) -> float:
    """Cost with correlation omega as a percentage of the cost at omega = 0.

    FIXED compares both at the given M; OPTIMAL compares each at its own optimal M,
    unless ``baseline_M`` pins the pool size at omega = 0.
    """
    baseline = params.with_omega(0.0)
    if SavingsMode(mode) is SavingsMode.FIXED:
        if M is None:
            raise InvalidParameterError("fixed-M savings ratio needs a group size M")
        num, den = cost_markov(params, M), cost_markov(baseline, M)
    else:
        num = optimal_group_size(params, M_max).min_cost
        if baseline_M is None:
            den = optimal_group_size(baseline, M_max).min_cost
        else:
            den = cost_markov(baseline, baseline_M)
    if den <= 0:
        raise InvalidParameterError("baseline cost is zero; savings ratio undefined")
    return 100.0 * num / den


def regular_crossover(omegas: Sequence[float], costs: Sequence[float], reference: float) -> Optional[float]:
    """Smallest omega whose cost is below the (d1,d2)-regular reference, if any."""
    for w, c in zip(omegas, costs):
        if c < reference:
            return w
    return None
