"""Exception types shared across the package."""


class ProbeError(Exception):
    """Base class for everything this package raises deliberately."""


class SpecError(ProbeError, ValueError):
    """A probe spec is malformed or violates a tokenizer constraint."""


class ModelError(ProbeError, RuntimeError):
    """The model could not be loaded or a query could not be answered."""
