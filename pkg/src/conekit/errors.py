"""Exception taxonomy shared by the library and the CLI.

Every error that can cross the CLI boundary carries a stable ``kind``
string so scripted callers can dispatch on ``error.kind`` in the JSON
output instead of parsing prose.
"""


class ConekitError(Exception):
    """Base class for all package errors."""

    kind = "error"

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class UsageError(ConekitError):
    """Malformed input: bad shapes, unparseable polynomials, bad flags."""

    kind = "usage-error"


class DomainError(ConekitError):
    """Mathematically invalid request (e.g. point outside the cone,
    direction not in the hyperbolicity cone, non-symmetric matrix)."""

    kind = "domain-error"


class UnsupportedOperationError(ConekitError):
    """The operation is not available for this cone representation."""

    kind = "unsupported-operation"


class NumericalFailure(ConekitError):
    """A numerical routine could not certify its own answer (solver did
    not converge, root-finding produced complex parts above tolerance,
    rank decision fell inside the ambiguity band)."""

    kind = "numerical-failure"
