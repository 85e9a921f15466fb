"""Exception hierarchy shared by every layer."""

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_HYPOTHESIS_FAILED = 3
EXIT_THEOREM_VIOLATED = 4
EXIT_AUDIT_FAILED = 5


class TransversalsError(Exception):
    """Base class for errors surfaced to the command line."""

    exit_code = EXIT_INPUT_ERROR


class DimensionMismatchError(TransversalsError, ValueError):
    """Points of different ambient dimensions were mixed."""


class CapExceededError(TransversalsError):
    """An exhaustive enumeration would exceed a configured cap."""

    def __init__(self, what: str, size: int, cap: int, flag: str):
        super().__init__(f"{what} is {size}, above the cap of {cap}; raise it with {flag}")
        self.what = what
        self.size = size
        self.cap = cap
        self.flag = flag


class InvalidInstanceError(TransversalsError, ValueError):
    """An instance file or instance object violates the input contract."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(f"{message} at {path}" if path else message)
        self.path = path


class MatroidError(TransversalsError, ValueError):
    """Unknown labels or a malformed matroid description."""


class InvariantError(TransversalsError):
    """An internal invariant failed; indicates a bug."""


class DegenerateNormalError(TransversalsError, ValueError):
    """A zero normal vector was supplied where a cell or hyperplane is required."""


class ComplexError(TransversalsError, ValueError):
    """A simplicial complex is malformed or lacks required structure."""
