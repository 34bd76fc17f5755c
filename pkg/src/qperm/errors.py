"""Exception types shared across the package."""


class QpermError(Exception):
    """Base class for all qperm errors."""


class BoundError(QpermError, ValueError):
    """An integer argument is outside its supported range."""


class DimensionError(QpermError, ValueError):
    """Mismatched ground sizes, word lengths or matrix shapes."""


class DomainError(QpermError, ValueError):
    """Input is outside the operation's domain (e.g. a crossing partition)."""


class SingularGramError(QpermError, ArithmeticError):
    """The Gram matrix G_kn is not invertible for these parameters."""

    def __init__(self, k, n):
        self.k = k
        self.n = n
        super().__init__(f"Gram matrix is singular for k={k}, n={n}")


class InvariantViolation(QpermError):
    """A mathematical identity the library guarantees failed to hold."""
