"""Exception types.  All derive from ValueError so callers can catch broadly."""


class DimensionMismatch(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


class NotUnitaryError(ValueError):
    pass


class NotPositiveError(ValueError):
    """A matrix that must be positive semidefinite has a negative eigenvalue."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class RankDeficientError(ValueError):
    def __init__(self, message: str, rank: int, required: int):
        super().__init__(message)
        self.rank = rank
        self.required = required
