"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input value is outside the mathematically valid domain."""


class DimensionError(ValueError):
    """Array shapes or grid sizes do not match."""


class NumericError(RuntimeError):
    """A numerical routine failed to converge or lost accuracy."""


class ResolutionError(ValueError):
    """The grid is too coarse for the requested operation."""


class UnsupportedRegionError(ValueError):
    """The requested region type is not supported by this operation."""


class ConfigError(ValueError):
    """Configuration validation failed; carries all collected messages."""

    def __init__(self, messages):
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))
