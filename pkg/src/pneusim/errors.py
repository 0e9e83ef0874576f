"""Exception hierarchy for the simulator.

The CLI maps these onto distinct exit codes, so keep the split between
"bad input document" (ScenarioError), "physically inconsistent value"
(InvariantError / InvalidStateError) and "the integration itself failed"
(IntegrationError).
"""


class PneusimError(Exception):
    """Base class for all errors raised by this package."""


class InvariantError(PneusimError, ValueError):
    """A parameter bundle violates one of its physical invariants."""


class InvalidStateError(PneusimError, ValueError):
    """An operation was called with a physically invalid state."""


class ScenarioError(PneusimError, ValueError):
    """A scenario document could not be parsed or resolved."""


class DelayLineUnderflowError(PneusimError, RuntimeError):
    """A delay-line lookup reached past the retained history (sizing bug)."""


class IntegrationError(PneusimError, RuntimeError):
    """The integrator produced a non-finite or non-physical state."""

    def __init__(self, message: str, t: float | None = None, dt: float | None = None):
        if t is not None:
            message = f"{message} (t={t:.9g} s, dt={dt:.3g} s)"
        super().__init__(message)
        self.t = t
        self.dt = dt
