"""Exception hierarchy shared by all modules."""


class InvalidInputError(ValueError):
    """Arguments violate an operation's preconditions."""


class UnsupportedDimensionError(InvalidInputError):
    """The requested dimension is outside what an operation supports."""


class ResourceLimitError(RuntimeError):
    """A configured size or work cap would be exceeded."""


class ConditioningError(ArithmeticError):
    """A correlation matrix is too ill-conditioned to solve reliably."""
