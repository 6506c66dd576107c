"""Exception types shared across the laboratory."""


class DimensionError(ValueError):
    """Array length or grid-extent mismatch."""


class RegimeError(ValueError):
    """Operation not admissible in the current dispersion-parameter regime."""


class ResonantOperatorError(RegimeError):
    """Smoothing operator is singular: 1 + eps^2 n^2 vanishes at some integer n."""


class ExactnessError(ValueError):
    """Exact integer arithmetic was requested but is not available."""


class InconclusiveError(RuntimeError):
    """A search box was too small to be provably exhaustive."""

    def __init__(self, message: str, required=None):
        super().__init__(message)
        self.required = required


class ContractionError(RuntimeError):
    """Fixed-point iteration failed to contract; carries the observed ratio."""

    def __init__(self, message: str, ratio: float | None = None):
        super().__init__(message)
        self.ratio = ratio


class DivergenceError(RuntimeError):
    """Blow-up monitor triggered during time stepping; carries a report."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
