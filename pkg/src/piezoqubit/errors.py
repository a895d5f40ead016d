"""Exception types raised across the package."""


class PiezoQubitError(Exception):
    """Base class for all package errors."""


class DomainError(PiezoQubitError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularAdmittanceError(DomainError):
    """A lossless branch was evaluated exactly at its series resonance."""


class UndefinedLifetimeError(DomainError):
    """Conductance is zero (or negative) so T1 = C/G is undefined."""


class InvariantError(PiezoQubitError, ValueError):
    """A value violates a type invariant (e.g. a non-physical density matrix)."""


class IntegrationDivergedError(PiezoQubitError, RuntimeError):
    """The integrated state left the physical set during integration."""

    def __init__(self, message, time):
        super().__init__(f"{message} at t = {time:.6g} s")
        self.time = time


class FitFailedError(PiezoQubitError, RuntimeError):
    """A fit could not be performed on the supplied data."""


class InsufficientDataError(PiezoQubitError, ValueError):
    """Too few points or modes for the requested analysis."""


class RankDeficientError(PiezoQubitError, RuntimeError):
    """The fit Jacobian is degenerate with respect to a parameter."""

    def __init__(self, parameter):
        super().__init__(f"degenerate Jacobian: parameter {parameter!r} is not constrained by the data")
        self.parameter = parameter


class NoCrossoverError(DomainError):
    """Piezoelectric and TLS loss curves do not cross at a unique frequency."""


class DegenerateModelError(NoCrossoverError):
    """The two loss models coincide, so every frequency is a crossover."""


class ParseError(PiezoQubitError, ValueError):
    """Malformed input file."""

    def __init__(self, message, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line


class FixtureNotFoundError(PiezoQubitError, FileNotFoundError):
    """A bundled data file is missing."""
