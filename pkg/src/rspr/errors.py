"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: UsageError -> 1,
ParseError -> 2, budget exhaustion -> 3, InternalInvariantError -> 4.
"""


class UsageError(ValueError):
    """A caller violated an operation's precondition."""


class DomainError(ValueError):
    """Arguments are structurally valid but outside the operation's domain."""


class ParseError(ValueError):
    """Malformed Newick input.

    Carries ``position``, the 0-based offset into the source text at which
    the problem was detected (or None when not applicable).
    """

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None
                         else f"{message} (at position {position})")
        self.position = position


class ResourceError(RuntimeError):
    """An exact enumeration was requested on an instance too large for it."""


class InternalInvariantError(RuntimeError):
    """A guaranteed structural property failed to hold; indicates a bug."""
