"""Exception hierarchy shared by all freespec modules."""


class FreespecError(Exception):
    """Base class for every error raised by the library."""


class NumericalFailure(FreespecError):
    """An iterative numerical routine did not converge."""


class ArityError(FreespecError):
    """Tuple arities (number of matrices) do not match."""


class FieldError(FreespecError):
    """Real and complex data were mixed where that is not allowed."""


class DomainError(FreespecError):
    """An argument lies outside the domain of an operation."""


class CatalogError(FreespecError):
    """Unknown catalog id or invalid catalog parameters."""


class UnboundedError(FreespecError):
    """The free spectrahedron (or polytope) is unbounded."""


class CapacityError(FreespecError):
    """A problem exceeds a configured size cap."""

    def __init__(self, message, required=None, cap=None):
        super().__init__(message)
        self.required = required
        self.cap = cap
