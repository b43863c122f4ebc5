"""Exception hierarchy shared by every steersim module."""


class SteersimError(Exception):
    pass


class DimensionError(SteersimError, ValueError):
    pass


class NormalizationError(SteersimError, ValueError):
    pass


class DegenerateChannelError(SteersimError):
    pass


class SingularChannelError(SteersimError):
    pass


class InfeasiblePowerError(SteersimError):
    pass


class InvalidQuadratureError(SteersimError, ValueError):
    pass


class BudgetExceededError(SteersimError):
    pass


class NotADAGError(SteersimError):
    pass


class IncompleteStateError(SteersimError):
    pass


class ConfigError(SteersimError, ValueError):
    pass
