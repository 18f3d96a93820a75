"""Dorfman two-stage test accounting.

Each pool costs one test; a positive pool adds one retest per member. A
trailing partial pool (n mod M != 0) is tested as a smaller pool of its own.
"""
import numpy as np

from pooltest.errors import InvalidParameterError
from pooltest.models import PoolingStrategy, StatusVector, TestOutcome


def pool_tests(bits: np.ndarray, M: int) -> np.ndarray:
    """Tests spent on each consecutive block of ``bits``."""
    if M < 1:
        raise InvalidParameterError(f"group size M must be >= 1 (got {M})")
    n = bits.size
    pools = -(-n // M)
    padded = np.zeros(pools * M, dtype=bool)
    padded[:n] = bits.astype(bool)
    positive = padded.reshape(pools, M).any(axis=1)
    sizes = np.full(pools, M, dtype=np.int64)
    if n % M:
        sizes[-1] = n % M
    return 1 + positive * sizes


def run_dorfman(status: StatusVector, sigma: PoolingStrategy, M: int) -> TestOutcome:
    if len(status) != len(sigma):
        raise InvalidParameterError(
            f"status has {len(status)} entries but the strategy orders {len(sigma)} nodes"
        )
    if len(status) == 0:
        raise InvalidParameterError("cannot pool an empty population")
    tests = pool_tests(status.bits[sigma.sigma], M)
    return TestOutcome(
        n=len(status),
        group_size=M,
        total_tests=int(tests.sum()),
        groups_positive=int((tests > 1).sum()),
    )
