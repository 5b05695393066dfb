"""Exception hierarchy shared by every module of the package."""


class TsallisMdpError(Exception):
    """Base class for all errors raised by tsallis_mdp."""


class DomainError(TsallisMdpError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class UnsupportedIndexError(TsallisMdpError, ValueError):
    """The entropic index is valid but not supported by this operation."""


class PreconditionError(TsallisMdpError, ValueError):
    """A documented precondition of an identity check is violated."""


class ConvergenceError(TsallisMdpError, RuntimeError):
    """A numerical optimizer failed to certify its result."""


class DivergenceError(TsallisMdpError, RuntimeError):
    """A solver's iterates left the configured bound.

    The partially populated trace is attached as ``trace``.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class SingularityError(TsallisMdpError, RuntimeError):
    """A policy-evaluation linear system could not be solved."""


class MdpValidationError(TsallisMdpError, ValueError):
    """An MDP violates one of its invariants."""


class MdpParseError(TsallisMdpError, ValueError):
    """An MDP file could not be parsed."""
