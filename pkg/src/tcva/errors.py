"""Exception hierarchy shared by every tcva module."""


class TCVAError(Exception):
    """Base class for all errors raised by tcva."""


class EmptyInputError(TCVAError, ValueError):
    pass


class TemperatureRangeError(TCVAError, ValueError):
    def __init__(self, temperature, t_min, t_max):
        self.temperature = temperature
        super().__init__(
            f"temperature {temperature!r} outside allowed range [{t_min}, {t_max}]"
        )


class ContractViolation(TCVAError, ValueError):
    """An argument breaks a documented precondition."""


class InvalidWeightScheme(TCVAError, ValueError):
    pass


class UndefinedCorrelationError(TCVAError, ValueError):
    """Correlation is undefined, e.g. one input vector is constant."""


class DegenerateBootstrapError(TCVAError, RuntimeError):
    pass


class ConfigError(TCVAError, ValueError):
    pass


class DatasetError(TCVAError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AlignmentError(TCVAError, ValueError):
    def __init__(self, message, unmatched=()):
        self.unmatched = sorted(unmatched)
        if self.unmatched:
            message = f"{message}: {', '.join(self.unmatched)}"
        super().__init__(message)


class JudgeError(TCVAError):
    """Base for failures talking to a judge backend."""


class JudgeTransportError(JudgeError):
    """Network or HTTP failure; safe to retry."""


class JudgeParseError(JudgeError):
    def __init__(self, message, raw=None):
        self.raw = raw
        super().__init__(message)


class ExtractionError(JudgeError):
    def __init__(self, message, raw=None):
        self.raw = raw
        super().__init__(message)


class CacheMissError(TCVAError, LookupError):
    def __init__(self, message, key=None):
        self.key = key
        super().__init__(message)
