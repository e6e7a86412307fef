"""Exception hierarchy shared by all modules."""


class PhaseOracleError(Exception):
    pass


class DomainError(PhaseOracleError, ValueError):
    """An argument lies outside the domain of the operation (bad width, index, length)."""


class ConfigurationError(PhaseOracleError, ValueError):
    pass


class PreconditionError(PhaseOracleError, ValueError):
    pass


class ProtocolViolation(PhaseOracleError, RuntimeError):
    """A measurement fell outside both verdict bands; the oracle was not of the promised form."""


class UnsupportedError(PhaseOracleError):
    pass
