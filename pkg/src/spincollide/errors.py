"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class CapacityError(RuntimeError):
    """A requested computation exceeds the configured size limits."""


class DiagonalizationError(RuntimeError):
    """The eigensolver failed to converge."""

    def __init__(self, dim: int, msg: str = ""):
        self.dim = dim
        super().__init__(f"eigendecomposition failed for {dim}x{dim} matrix" + (f": {msg}" if msg else ""))
