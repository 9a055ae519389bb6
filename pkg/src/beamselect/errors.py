"""Exception hierarchy for beamselect.

Every error raised by this package derives from :class:`BeamselectError`, so
callers can catch one base class.  The concrete subclasses map one-to-one onto
the failure kinds the CLI turns into exit codes (see ``beamselect.cli``).
"""


class BeamselectError(Exception):
    """Base class for all beamselect errors."""


class InputError(BeamselectError):
    """An argument violates an operation's precondition (bad index, bad range)."""


class ValidationError(BeamselectError):
    """A value violates a documented type invariant (named in the message)."""


class ParseError(BeamselectError):
    """A document could not be parsed; message carries line/field context."""


class ModelError(BeamselectError):
    """A statistical model input is invalid, e.g. a non-PSD covariance."""


class GeometryError(BeamselectError):
    """Scene geometry is degenerate, e.g. a zero-norm client position."""


class DegenerateDistributionError(BeamselectError):
    """A distribution collapsed to a point mass where a density was requested."""


class InfeasibleError(BeamselectError):
    """No subset can meet the expected-gain threshold."""


class SizeError(BeamselectError):
    """Problem size exceeds a hard cap (64 agents; 20 for exhaustive search)."""


class ConvergenceError(BeamselectError):
    """An iterative solver hit its iteration cap before reaching its goal."""
