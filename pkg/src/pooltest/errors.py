class PoolTestError(Exception):
    """Base class for every error raised by pooltest."""


class InvalidParameterError(PoolTestError, ValueError):
    pass


class EdgeListParseError(PoolTestError):
    def __init__(self, line_no: int, line: str, reason: str = "expected two integer node ids"):
        self.line_no = line_no
        self.line = line
        super().__init__(f"line {line_no}: {reason}: {line!r}")


class EmptyGraphError(PoolTestError):
    pass


class CapacityError(PoolTestError):
    pass


class DatasetMissingError(PoolTestError):
    """Raised when a dataset file is not on disk. The message says how to fetch it."""


class DatasetFetchError(PoolTestError):
    pass
