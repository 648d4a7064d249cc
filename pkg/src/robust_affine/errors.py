"""Exception types shared across the package."""


class InvalidBoxError(ValueError):
    """A parameter box cannot be used for the requested operation."""


class NotConstantSlopeError(InvalidBoxError):
    """The upper drift slope is state-dependent on the real line.

    Raised when the drift-slope interval is non-degenerate and the state
    space is the whole real line, so no constant ODE coefficient exists.
    """


class BlowUpError(ArithmeticError):
    """The Riccati solution exceeded the blow-up guard before the horizon."""

    def __init__(self, t: float, value: float, guard: float):
        self.t = t
        self.value = value
        self.guard = guard
        super().__init__(
            f"Riccati solution reached |psi| = {abs(value):.3e} > guard "
            f"{guard:.1e} at t = {t:.6g}"
        )


class OutOfRangeError(ValueError):
    """An evaluation point lies outside the solved or simulated range."""


class GridMismatchError(ValueError):
    """Two time grids that must align do not."""


class InvalidStepError(ValueError):
    """A simulation step size or horizon is unusable."""


class UnstableGridError(ValueError):
    """The explicit PDE scheme would violate its monotonicity bound."""

    def __init__(self, dt: float, max_dt: float):
        self.dt = dt
        self.max_dt = max_dt
        super().__init__(
            f"time step {dt:.3e} violates the explicit stability bound; "
            f"largest admissible step is {max_dt:.6e}"
        )


class NotASuperhedgeError(ValueError):
    """A candidate (capital, strategy) pair fails pathwise domination."""
