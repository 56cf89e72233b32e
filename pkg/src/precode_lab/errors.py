"""Exception hierarchy shared by all modules."""


class PrecodeLabError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(PrecodeLabError, ValueError):
    """An argument is outside its documented domain."""


class DimensionError(PrecodeLabError, ValueError):
    """Matrix shapes or symmetry do not match what an operation requires."""


class SingularFactorError(PrecodeLabError, ArithmeticError):
    """A triangular factor has a (numerically) vanishing diagonal entry.

    Attributes
    ----------
    column : int
        Zero-based index of the first offending column.
    group : int or None
        One-based group index when raised while building a per-group factor.
    """

    def __init__(self, column: int, group: int | None = None, detail: str = ""):
        self.column = column
        self.group = group
        where = f"column {column}" if group is None else f"group {group}, column {column}"
        msg = f"rank-deficient input at {where}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class FeasibilityError(PrecodeLabError):
    """The retained-eigenvector allocation leaves a group too few dimensions."""

    def __init__(self, group: int, available: int, needed: int):
        self.group = group
        self.available = available
        self.needed = needed
        super().__init__(
            f"group {group} keeps {available} free dimensions but needs {needed}"
        )


class DegenerateRunError(PrecodeLabError):
    """Too many channel blocks produced degenerate precoder builds."""
