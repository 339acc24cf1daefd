"""Exception types shared across the library.

Every error class carries a human-readable message that names the offending
operation and, where available, the witness inputs, so that CLI diagnostics
can be produced without re-deriving context.
"""


class PreconditionError(ValueError):
    """An operation was called with inputs violating its stated preconditions."""


class UnsupportedInputError(ValueError):
    """The input is structurally valid but outside the supported family
    (e.g. an unbounded set where a bounded one is required)."""


class UnboundedGammaError(RuntimeError):
    """No finite cone-control constant exists because the probe direction
    lies on the relative boundary of the cone."""


class ContradictionError(RuntimeError):
    """Numerically verified hypotheses lead to a conclusion the data
    contradicts; indicates an inconsistent input or a kernel bug."""


class TheoremViolationError(RuntimeError):
    """A proved statement failed on concrete inputs.  This always means the
    implementation (not the mathematics) is wrong, so it is a hard failure."""


class InsufficientSampleError(RuntimeError):
    """A sampling campaign produced no admissible samples where at least one
    was required."""


class SceneFormatError(ValueError):
    """A scene or grid file failed validation.  ``field`` points at the
    offending entry."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
