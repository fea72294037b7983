"""Exception hierarchy shared by every module."""


class CcstabError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(CcstabError, ValueError):
    """A state lies outside the state interval [-M, M]."""


class ModelError(CcstabError, ValueError):
    """A flux or entropy violates its structural requirements."""


class CurveOutOfDomainError(CcstabError):
    """A critical-curve root could not be bracketed inside [-M, M]."""


class UnsupportedConfigurationError(CcstabError):
    """Inputs fall outside the configuration a closed-form predicate covers."""


class EmptySetError(CcstabError):
    """The weighted entropy is non-negative at u_L, so Pi is empty."""


class CalibrationError(CcstabError):
    """No admissible constant passed the verification scans.

    Attributes
    ----------
    witness : dict
        The worst violating sample found during the search.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}


class InvariantViolation(CcstabError, AssertionError):
    """An internal consistency check failed; carries the event log when available."""

    def __init__(self, message, log=None):
        super().__init__(message)
        self.log = log or []


class ConfigError(CcstabError):
    """Configuration text could not be parsed or validated.

    Attributes
    ----------
    problems : list of str
        Every problem found, each prefixed with its line number.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("\n".join(self.problems))


class RefinementError(CcstabError, ValueError):
    """A discretisation parameter is too coarse for the requested accuracy."""
