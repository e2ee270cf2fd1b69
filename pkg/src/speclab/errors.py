"""Exception hierarchy."""


class SpeclabError(Exception):
    """Base class for all package errors."""


class NonIntegrable(SpeclabError):
    """The gauge integral diverges for every trial scale: the norm is infinite."""


class InvalidDomain(SpeclabError):
    pass


class InvalidPotential(SpeclabError):
    pass


class UnboundedLevelSet(SpeclabError):
    pass


class MissingDecayClass(SpeclabError):
    pass


class MissingParameter(SpeclabError):
    pass


class InvalidParameters(SpeclabError):
    pass


class BracketGap(SpeclabError):
    """Lower and upper eigenvalue-count brackets did not meet."""

    def __init__(self, message, lower=None, upper=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


class InconsistentVerdict(SpeclabError):
    """A finite/infinite verdict table contradicts a proved implication."""


class ConfigError(SpeclabError):
    pass
