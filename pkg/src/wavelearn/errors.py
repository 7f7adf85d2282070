"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """An argument violates a documented precondition."""


class LipschitzViolationError(ValueError):
    """A gradient (or surrogate gradient) exceeds the declared Lipschitz bound."""


class ResourceLimitError(ValueError):
    """The request would materialize something beyond the desk-scale guards."""
