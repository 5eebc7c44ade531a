"""Exception types shared across the toolkit."""


class ParameterDomainError(ValueError):
    """A physical parameter is outside its admissible domain."""


class ConfigurationError(ValueError):
    """A configuration is inconsistent or violates a precondition."""


class DelayOverflowError(RuntimeError):
    """A propagation delay landed at or beyond the last delay bin."""


class HorizonExceededError(RuntimeError):
    """The mobile's true position left the span covered by the uniform
    backbone; enlarge the simulated horizon (t_max_s / p_count)."""


class DegenerateAnchorError(ValueError):
    """The ensemble carries no power at the requested anchor time."""


class InventoryError(FileNotFoundError):
    """Artifacts listed in a run manifest are missing on disk."""
