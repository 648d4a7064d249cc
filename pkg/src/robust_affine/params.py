"""Parameter uncertainty boxes for one-dimensional affine diffusions.

The model family is the set of diffusions whose drift lies in
``b0 + b1*x`` and whose instantaneous variance lies in ``a0 + a1*max(x, 0)``
with the four coefficients ranging over a rectangle.  This module holds the
rectangle itself, the state-dependent coefficient intervals it induces, the
extremal (upper-endpoint) coefficients used by the worst-case pricing engine,
and constant-parameter corner models used as brute-force witnesses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NotConstantSlopeError


class StateSpace(Enum):
    """Admissible state space of the intensity process."""

    REAL_LINE = "real_line"
    NON_NEGATIVE = "non_negative"
    POSITIVE = "positive"

    def contains(self, x: float) -> bool:
        if self is StateSpace.REAL_LINE:
            return True
        if self is StateSpace.NON_NEGATIVE:
            return x >= 0.0
        return x > 0.0


@dataclass(frozen=True)
class ParameterBox:
    """Rectangle of admissible drift/variance coefficients.

    ``b0`` is the drift intercept (1/time), ``b1`` the drift slope (1/time),
    ``a0`` the variance intercept (state^2/time) and ``a1`` the variance
    slope (state/time).  Equal endpoints are allowed so that a classical
    single-parameter model is representable as a degenerate box.
    """

    b0_low: float
    b0_high: float
    b1_low: float
    b1_high: float
    a0_low: float
    a0_high: float
    a1_low: float
    a1_high: float

    def __post_init__(self):
        for name in ("b0", "b1", "a0", "a1"):
            lo = getattr(self, f"{name}_low")
            hi = getattr(self, f"{name}_high")
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise ValueError(f"{name} interval must be finite")
            if lo > hi:
                raise ValueError(f"{name} interval is empty: [{lo}, {hi}]")
        if self.a0_low < 0.0 or self.a1_low < 0.0:
            raise ValueError("variance coefficients must be nonnegative")

    @classmethod
    def degenerate(cls, b0: float, b1: float, a0: float, a1: float) -> "ParameterBox":
        """Box collapsed onto a single classical parameter vector."""
        return cls(b0, b0, b1, b1, a0, a0, a1, a1)

    def contains(self, theta: "CornerParameter") -> bool:
        return (
            self.b0_low <= theta.b0 <= self.b0_high
            and self.b1_low <= theta.b1 <= self.b1_high
            and self.a0_low <= theta.a0 <= self.a0_high
            and self.a1_low <= theta.a1 <= self.a1_high
        )


@dataclass(frozen=True)
class AffineInterval:
    """Closed interval of admissible values of a state-dependent quantity."""

    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"interval is empty: [{self.lower}, {self.upper}]")

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class CornerParameter:
    """A single constant-parameter model inside a box."""

    b0: float
    b1: float
    a0: float
    a1: float


def drift_interval(box: ParameterBox, x: float) -> AffineInterval:
    """Interval of admissible drifts at state ``x``.

    The endpoints swap the role of the slope bounds with the sign of ``x``
    so that the interval is ``{b0 + b1*x : (b0, b1) in box}`` exactly.
    """
    if x >= 0.0:
        return AffineInterval(
            box.b0_low + box.b1_low * x, box.b0_high + box.b1_high * x
        )
    return AffineInterval(box.b0_low + box.b1_high * x, box.b0_high + box.b1_low * x)


def diffusion_interval(box: ParameterBox, x: float) -> AffineInterval:
    """Interval of admissible instantaneous variances at state ``x``.

    The slope only acts on the positive part of the state, so the interval
    is constant for ``x <= 0`` and both endpoints are nonnegative.
    """
    xp = max(x, 0.0)
    return AffineInterval(box.a0_low + box.a1_low * xp, box.a0_high + box.a1_high * xp)


def is_proper(box: ParameterBox) -> bool:
    """Whether the box admits a nonempty model family on its state space.

    True when the variance intercept is bounded away from zero, or in the
    square-root-diffusion case (zero intercept) when the drift intercept
    dominates half the variance slope.
    """
    if box.a0_low > 0.0:
        return True
    return (
        box.a0_low == 0.0
        and box.a0_high == 0.0
        and box.a1_high > 0.0
        and box.b0_low >= box.a1_high / 2.0
    )


def upper_slope(box: ParameterBox, space: StateSpace) -> float:
    """State-independent drift slope of the extremal model.

    On nonnegative state spaces the sign indicator never switches, so the
    upper slope is ``b1_high``.  On the real line a constant slope exists
    only when the slope interval is degenerate.

    Raises
    ------
    NotConstantSlopeError
        If ``space`` is the real line and the slope interval is
        non-degenerate, in which case the constant-coefficient Riccati
        system does not apply.
    """
    if space in (StateSpace.NON_NEGATIVE, StateSpace.POSITIVE):
        return box.b1_high
    if box.b1_low == box.b1_high:
        return box.b1_high
    raise NotConstantSlopeError(
        f"slope interval [{box.b1_low}, {box.b1_high}] is state-dependent "
        "on the real line"
    )


def extremal_coefficients(box: ParameterBox, x: float) -> tuple[float, float]:
    """Upper-endpoint drift and variance at state ``x``.

    Returns ``(b0_high + B1x * x, a0_high + a1_high * max(x, 0))`` where
    ``B1x`` is ``b1_high`` for ``x >= 0`` and ``b1_low`` otherwise; these
    are exactly the upper endpoints of :func:`drift_interval` and
    :func:`diffusion_interval`.
    """
    slope = box.b1_high if x >= 0.0 else box.b1_low
    drift = box.b0_high + slope * x
    variance = box.a0_high + box.a1_high * max(x, 0.0)
    return drift, variance


def corner_grid(box: ParameterBox, resolution: int) -> list[CornerParameter]:
    """Cartesian grid of constant-parameter models spanning the box.

    Each non-degenerate axis contributes ``resolution`` equally spaced
    values including both endpoints; degenerate axes contribute their
    single value.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2 per non-degenerate axis")

    def axis(lo: float, hi: float) -> np.ndarray:
        if lo == hi:
            return np.array([lo])
        return np.linspace(lo, hi, resolution)

    axes = (
        axis(box.b0_low, box.b0_high),
        axis(box.b1_low, box.b1_high),
        axis(box.a0_low, box.a0_high),
        axis(box.a1_low, box.a1_high),
    )
    return [
        CornerParameter(float(b0), float(b1), float(a0), float(a1))
        for b0, b1, a0, a1 in itertools.product(*axes)
    ]
