"""Exception and warning types raised across the package."""


class HydroformError(Exception):
    """Base class for all package errors."""


class IndexViolation(HydroformError, ValueError):
    """An index tuple falls outside the admissible range."""


class BadQuantumNumbers(HydroformError, ValueError):
    """Quantum numbers (n, l, m) do not satisfy 0 <= l <= n, |m| <= l."""


class DegenerateDenominator(HydroformError, ZeroDivisionError):
    """A lower Pochhammer symbol vanishes before the series terminates."""


class NonTerminating(HydroformError, ValueError):
    """A hypergeometric series was requested that is not a polynomial."""


class DegenerateU(HydroformError, ValueError):
    """The ratio u = alpha/beta takes a value where a formula is singular."""


class DegenerateQ(HydroformError, ValueError):
    """The four-momentum q = p - k vanishes at the evaluation point."""


class SingularPoint(HydroformError, ValueError):
    """A finite-difference stencil touches a singular point."""


class ConvergenceRegionViolated(HydroformError, ValueError):
    """Parameters lie outside the region where an expansion converges."""


class InsufficientSeeds(HydroformError, ValueError):
    """The seed set does not determine the requested lattice point."""


class NoConvergence(HydroformError, RuntimeError):
    """An adaptive procedure hit its refinement cap."""


class BackendDisagreement(HydroformError, RuntimeError):
    """Independent backends disagree even after precision doubling."""


class AmplificationWarning(UserWarning):
    """Forward recursion grew intermediate values far beyond the seeds."""
