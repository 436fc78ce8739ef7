class SentifuseError(Exception):
    """Base class for every error raised by sentifuse."""


class DimensionError(SentifuseError, ValueError):
    pass


class ContractError(SentifuseError, ValueError):
    pass


class ConfigurationError(SentifuseError, ValueError):
    pass


class DatasetError(SentifuseError, ValueError):
    pass


class DataError(SentifuseError, ValueError):
    pass


class UndefinedMetricError(SentifuseError, ValueError):
    """A metric whose formula has no value for the given series, e.g. zero variance."""


class NumericalError(SentifuseError, RuntimeError):
    pass
