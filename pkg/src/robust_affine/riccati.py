"""Generalized Riccati system for worst-case affine bond prices.

The worst-case price of a unit zero-coupon (or survival) bond over the
family of models spanned by a :class:`~robust_affine.params.ParameterBox`
has the exponential-affine form ``exp(phi(T - t, 0) + psi(T - t, 0) * x)``
where ``phi`` and ``psi`` solve

    psi'(t) = 0.5 * a1_high * psi(t)^2 + B1 * psi(t) - 1,   psi(0) = u,
    phi'(t) = 0.5 * a0_high * psi(t)^2 + b0_high * psi(t),  phi(0) = 0,

with ``B1`` the constant upper drift slope.  The system is integrated with
an adaptive Dormand-Prince 5(4) pair and exposed on its accepted step grid
with monotone cubic (PCHIP) dense output, so that bond prices and value
paths at arbitrary intermediate times never require re-solving.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import BlowUpError, OutOfRangeError, GridMismatchError
from .params import ParameterBox, StateSpace, upper_slope

# Dormand-Prince 5(4) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)

DEFAULT_BLOWUP_GUARD = 1.0e6


@dataclass(frozen=True)
class StepControl:
    """Adaptive-integrator metadata attached to a solution."""

    method: str
    max_step: float
    tol: float


@dataclass(frozen=True, eq=False)
class RiccatiSolution:
    """Gridded (phi, psi) pair with dense evaluation support.

    The first grid node carries the boundary values bitwise:
    ``phi_values[0] == 0.0`` and ``psi_values[0] == u``.
    """

    u: float
    horizon: float
    time_grid: np.ndarray
    phi_values: np.ndarray
    psi_values: np.ndarray
    box: ParameterBox
    space: StateSpace
    slope: float
    step_control: StepControl
    _phi_interp: PchipInterpolator = field(repr=False, compare=False, default=None)
    _psi_interp: PchipInterpolator = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(
            self, "_phi_interp", PchipInterpolator(self.time_grid, self.phi_values)
        )
        object.__setattr__(
            self, "_psi_interp", PchipInterpolator(self.time_grid, self.psi_values)
        )

    def _check_range(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        slack = 1e-12 * max(1.0, self.horizon)
        if np.any(s < -slack) or np.any(s > self.horizon + slack):
            raise OutOfRangeError(
                f"time {s!r} outside the solved range [0, {self.horizon}]"
            )
        return np.clip(s, 0.0, self.horizon)

    def phi(self, s):
        """phi at time-to-maturity ``s`` (PCHIP between grid nodes)."""
        return self._phi_interp(self._check_range(s))

    def psi(self, s):
        """psi at time-to-maturity ``s`` (PCHIP between grid nodes)."""
        return self._psi_interp(self._check_range(s))


def _rhs(y: np.ndarray, a1: float, slope: float, a0: float, b0: float) -> np.ndarray:
    psi, _ = y
    return np.array(
        [0.5 * a1 * psi * psi + slope * psi - 1.0, 0.5 * a0 * psi * psi + b0 * psi]
    )


def solve_riccati(
    box: ParameterBox,
    space: StateSpace,
    horizon: float,
    u: float = 0.0,
    tol: float = 1e-8,
    max_step: float | None = None,
    blowup_guard: float = DEFAULT_BLOWUP_GUARD,
) -> RiccatiSolution:
    """Integrate the generalized Riccati system on ``[0, horizon]``.

    Parameters
    ----------
    box : ParameterBox
        Coefficient rectangle; the upper endpoints drive the system.
    space : StateSpace
        State space of the intensity; fixes the constant drift slope.
    horizon : float
        Largest time-to-maturity to solve for, strictly positive.
    u : float
        Initial condition for psi.  Bond pricing uses ``u = 0``.
    tol : float
        Relative local error tolerance per step, in ``(0, 1e-3]``.
    max_step : float, optional
        Cap on the step size.  Defaults to ``horizon / 64`` so the dense
        PCHIP output stays accurate between nodes.
    blowup_guard : float
        Abort threshold on ``|psi|``; quadratic Riccati terms can explode
        in finite time for large positive ``u``.

    Raises
    ------
    NotConstantSlopeError
        If the box has no constant upper slope on ``space``.
    BlowUpError
        If ``|psi|`` exceeds ``blowup_guard`` before the horizon.
    """
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    if not 0.0 < tol <= 1e-3:
        raise ValueError("tol must lie in (0, 1e-3]")
    slope = upper_slope(box, space)
    if max_step is None:
        max_step = horizon / 64.0
    max_step = min(max_step, horizon)

    a1, a0, b0 = box.a1_high, box.a0_high, box.b0_high
    args = (a1, slope, a0, b0)

    ts = [0.0]
    psis = [u]
    phis = [0.0]

    t = 0.0
    y = np.array([u, 0.0])
    f0 = _rhs(y, *args)
    # Initial step from the RHS magnitude, clipped to the cap.
    scale = max(abs(u), 1.0)
    h = min(max_step, 0.1 * scale / max(np.max(np.abs(f0)), 1e-8))

    k = np.empty((7, 2))
    k[0] = f0
    atol = 1e-14
    h_floor = 16 * np.finfo(float).eps * horizon
    while t < horizon:
        h = min(h, horizon - t, max_step)
        if h < h_floor:
            raise BlowUpError(t, y[0], blowup_guard)
        for i in range(1, 7):
            yi = y + h * (_A[i] @ k[:i])
            k[i] = _rhs(yi, *args)
        y5 = y + h * (_B5 @ k)
        err = h * ((_B5 - _B4) @ k)
        tol_scale = atol + tol * np.maximum(np.abs(y), np.abs(y5))
        err_norm = np.max(np.abs(err) / tol_scale)

        if err_norm <= 1.0:
            t_new = horizon if horizon - t <= h * (1 + 1e-12) else t + h
            y = y5
            if abs(y[0]) > blowup_guard:
                raise BlowUpError(t_new, y[0], blowup_guard)
            ts.append(t_new)
            psis.append(y[0])
            phis.append(y[1])
            t = t_new
            k[0] = _rhs(y, *args)
        factor = 0.9 * (1.0 / max(err_norm, 1e-16)) ** 0.2
        h *= min(5.0, max(0.2, factor))

    return RiccatiSolution(
        u=u,
        horizon=horizon,
        time_grid=np.array(ts),
        phi_values=np.array(phis),
        psi_values=np.array(psis),
        box=box,
        space=space,
        slope=slope,
        step_control=StepControl(method="dormand-prince-54", max_step=max_step, tol=tol),
    )


def upper_bond_price(sol: RiccatiSolution, t: float, T: float, x: float) -> float:
    """Worst-case zero-coupon bond price ``exp(phi(T-t) + psi(T-t) * x)``.

    Requires a solution built with ``u = 0`` and ``T - t`` inside the
    solved horizon; ``x`` must lie in the solution's state space.
    """
    if sol.u != 0.0:
        raise ValueError("bond prices require a solution with u = 0")
    if t < 0.0 or T < t:
        raise OutOfRangeError(f"need 0 <= t <= T, got t={t}, T={T}")
    tau = T - t
    if tau > sol.horizon * (1 + 1e-12):
        raise OutOfRangeError(
            f"time to maturity {tau} exceeds solved horizon {sol.horizon}"
        )
    if not sol.space.contains(x):
        raise OutOfRangeError(f"state {x} outside {sol.space.value} state space")
    if tau == 0.0:
        return 1.0
    return float(np.exp(sol.phi(tau) + sol.psi(tau) * x))


def longevity_value_path(
    times: np.ndarray,
    mu: np.ndarray,
    sol: RiccatiSolution,
    T: float,
) -> np.ndarray:
    """Worst-case longevity bond values along an intensity trajectory.

    At each grid time ``r`` the value is

        exp(-integral_0^r mu ds) * exp(phi(T-r, 0) + psi(T-r, 0) * mu_r)

    with the hazard integral taken by the trapezoid rule on the path grid.
    At ``r = T`` this collapses to the survivor index.

    Parameters
    ----------
    times : array, shape (n_times,)
        Ascending grid starting at 0 and contained in ``[0, T]``.
    mu : array, shape (n_times,) or (n_paths, n_times)
        One intensity trajectory per row.
    sol : RiccatiSolution
        Solution with ``u = 0`` whose horizon covers ``T``.
    T : float
        Bond maturity.
    """
    if sol.u != 0.0:
        raise ValueError("longevity values require a solution with u = 0")
    times = np.asarray(times, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise GridMismatchError("times must be a nonempty 1-d grid")
    if np.any(np.diff(times) <= 0.0) or times[0] < 0.0:
        raise GridMismatchError("times must be strictly increasing from >= 0")
    if times[-1] > T * (1 + 1e-12):
        raise GridMismatchError(f"path grid extends past the maturity {T}")
    if mu.shape[-1] != times.size:
        raise GridMismatchError("mu and times have mismatched lengths")

    dt = np.diff(times)
    increments = 0.5 * dt * (mu[..., 1:] + mu[..., :-1])
    gamma = np.zeros_like(mu)
    np.cumsum(increments, axis=-1, out=gamma[..., 1:])

    tau = T - times
    phi_vals = sol.phi(tau)
    psi_vals = sol.psi(tau)
    return np.exp(-gamma + phi_vals + psi_vals * mu)
