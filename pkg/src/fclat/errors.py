"""Exception types shared across the package."""


class FclatError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(FclatError, ValueError):
    """Invalid input data: bad shapes, identifiers, schemas, or parameters."""


class CapExceededError(ValidationError):
    """Context too large for exact enumeration."""


class ProviderError(FclatError, RuntimeError):
    """A probability provider violated its protocol."""
