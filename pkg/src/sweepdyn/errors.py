"""Exception hierarchy shared by every sweepdyn module."""


class SweepdynError(Exception):
    """Base class for all errors raised by sweepdyn."""


class InvalidParameters(SweepdynError, ValueError):
    """A parameter set or configuration violates its invariants."""


class SingularCarryingCapacity(SweepdynError, ArithmeticError):
    """Effective carrying capacity ``kmax - c*W`` fell below the guard."""

    def __init__(self, capacity: float, guard: float):
        self.capacity = capacity
        self.guard = guard
        super().__init__(
            f"effective carrying capacity kmax - c*W = {capacity!r} "
            f"is below the singularity guard {guard!r}"
        )


class OutOfSchedule(SweepdynError, ValueError):
    """A time lies outside the coverage of a parameter schedule."""


class NumericalError(SweepdynError, ArithmeticError):
    """Base class for integration failures."""


class StepBudgetExceeded(NumericalError):
    pass


class StepUnderflow(NumericalError):
    pass


class NonFiniteState(NumericalError):
    pass


class NoInteriorEquilibrium(SweepdynError, ValueError):
    """The parameters admit no positive interior critical point."""


class InsufficientOscillations(SweepdynError, ValueError):
    pass


class WindowOutOfRange(SweepdynError, ValueError):
    """A sweep window around a breakpoint leaves the trajectory."""


class ConfigError(SweepdynError, ValueError):
    """A run configuration failed validation."""
