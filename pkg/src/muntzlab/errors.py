"""Exception types shared across the package."""


class MuntzlabError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(MuntzlabError):
    """Invalid user-supplied configuration or parameters."""


class ConditioningError(MuntzlabError):
    """The evaluated basis is numerically rank-deficient on the grid."""


class UnboundedGrowthError(MuntzlabError):
    """The growth linear program is unbounded (constraint grid too coarse)."""


class ConvergenceError(MuntzlabError):
    """The exchange iteration did not converge within its iteration cap."""
