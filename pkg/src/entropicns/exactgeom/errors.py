class GeometryError(Exception):
    """Base class for errors raised by the polyhedral kernel."""


class DimensionMismatch(GeometryError, ValueError):
    pass


class ResourceLimitExceeded(GeometryError, RuntimeError):
    """A configured cap on rows or rays was hit."""

    def __init__(self, what: str, count: int, limit: int):
        super().__init__(f"{what} count {count} exceeds the limit {limit}")
        self.what = what
        self.count = count
        self.limit = limit


class CertificateError(GeometryError, LookupError):
    pass


class FeasibleSystemError(GeometryError, ValueError):
    """An operation that needs an infeasible system was handed a feasible one."""
