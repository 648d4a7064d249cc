"""Monte Carlo simulation of intensity paths, hazards and default times.

Paths are generated with Euler-Maruyama using full truncation: the variance
coefficient acts on the positive part of the state, and on nonnegative state
spaces the post-step state is floored at zero so ensembles respect the state
space by construction.

Randomness comes from counter-based Philox streams keyed by ``(seed,
purpose)``, with one purpose tag per independent noise source (diffusion
increments, Cox uniforms, asset paths).  Each ensemble draw is a single
vectorized call in which path ``i`` consumes a fixed block of the stream, so
results are a pure function of the arguments regardless of how the caller
schedules work across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import GridMismatchError, InvalidStepError, OutOfRangeError
from .params import CornerParameter, ParameterBox, StateSpace, upper_slope

SCHEME_FULL_TRUNCATION = "euler-full-truncation"


class Purpose(IntEnum):
    """Noise-source tags; each gets an independent Philox key."""

    DIFFUSION = 1
    XI = 2
    ASSET = 3
    STRATEGY = 4


def substream(seed: int, purpose: Purpose) -> np.random.Generator:
    """Philox generator keyed by (seed, purpose), independent across tags."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(purpose)])
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class PathEnsemble:
    """Simulated intensity paths on a uniform time grid."""

    time_grid: np.ndarray
    values: np.ndarray
    x0: float
    model_tag: str
    seed: int
    scheme: str = SCHEME_FULL_TRUNCATION

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]

    @property
    def dt(self) -> float:
        return float(self.time_grid[1] - self.time_grid[0])


@dataclass(frozen=True, eq=False)
class HazardEnsemble:
    """Cumulative hazard per path, trapezoid-integrated on the grid."""

    time_grid: np.ndarray
    gamma: np.ndarray

    @property
    def n_paths(self) -> int:
        return self.gamma.shape[0]


@dataclass(frozen=True, eq=False)
class DefaultSample:
    """Cox default times and survivor indices for one hazard ensemble.

    ``tau`` holds ``inf`` on paths whose hazard never reaches the trigger
    before the horizon; ``beyond_horizon`` is the explicit marker for those
    paths.
    """

    tau: np.ndarray
    beyond_horizon: np.ndarray
    xi: np.ndarray
    survivor: np.ndarray


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error."""

    mean: float
    stderr: float
    n_paths: int


def _validate_grid(horizon: float, dt: float) -> np.ndarray:
    if dt <= 0.0 or horizon < dt:
        raise InvalidStepError(f"need 0 < dt <= horizon, got dt={dt}, horizon={horizon}")
    n_steps = round(horizon / dt)
    if abs(n_steps * dt - horizon) > 1e-9 * max(1.0, horizon):
        raise InvalidStepError(f"horizon {horizon} is not an integral number of steps of {dt}")
    return dt * np.arange(n_steps + 1)


def _euler_paths(
    drift_of,
    variance_of,
    space: StateSpace,
    x0: float,
    time_grid: np.ndarray,
    n_paths: int,
    seed: int,
) -> np.ndarray:
    """Shared stepping loop; corner and extremal models differ only in the
    coefficient callbacks, so degenerate boxes reproduce corner ensembles
    bitwise."""
    n_steps = time_grid.size - 1
    dt = float(time_grid[1] - time_grid[0])
    sqrt_dt = np.sqrt(dt)
    floor = space in (StateSpace.NON_NEGATIVE, StateSpace.POSITIVE)

    gen = substream(seed, Purpose.DIFFUSION)
    values = np.empty((n_paths, n_steps + 1))
    x = np.full(n_paths, float(x0))
    values[:, 0] = x
    for k in range(n_steps):
        z = gen.standard_normal(n_paths)
        x = x + drift_of(x) * dt + np.sqrt(variance_of(x)) * (sqrt_dt * z)
        if floor:
            np.maximum(x, 0.0, out=x)
        values[:, k + 1] = x
    return values


def simulate_corner(
    theta: CornerParameter,
    space: StateSpace,
    x0: float,
    horizon: float,
    dt: float,
    n_paths: int,
    seed: int,
) -> PathEnsemble:
    """Euler ensemble of the constant-parameter model ``theta``.

    Dynamics: ``dX = (b0 + b1 X) dt + sqrt(a0 + a1 max(X, 0)) dW``.
    """
    if not space.contains(x0):
        raise OutOfRangeError(f"x0={x0} outside {space.value} state space")
    grid = _validate_grid(horizon, dt)
    values = _euler_paths(
        lambda x: theta.b0 + theta.b1 * x,
        lambda x: theta.a0 + theta.a1 * np.maximum(x, 0.0),
        space,
        x0,
        grid,
        n_paths,
        seed,
    )
    tag = f"corner(b0={theta.b0},b1={theta.b1},a0={theta.a0},a1={theta.a1})"
    return PathEnsemble(grid, values, x0, tag, seed)


def simulate_extremal(
    box: ParameterBox,
    space: StateSpace,
    x0: float,
    horizon: float,
    dt: float,
    n_paths: int,
    seed: int,
) -> PathEnsemble:
    """Euler ensemble of the upper-endpoint (extremal) model of ``box``.

    Dynamics use the state-dependent upper coefficients: drift
    ``b0_high + B1x * x`` with the slope switching on the sign of the
    state, and variance ``a0_high + a1_high * max(X, 0)``.
    """
    upper_slope(box, space)  # raises NotConstantSlopeError if unusable
    if not space.contains(x0):
        raise OutOfRangeError(f"x0={x0} outside {space.value} state space")
    grid = _validate_grid(horizon, dt)

    def drift(x: np.ndarray) -> np.ndarray:
        slope = np.where(x >= 0.0, box.b1_high, box.b1_low)
        return box.b0_high + slope * x

    values = _euler_paths(
        drift,
        lambda x: box.a0_high + box.a1_high * np.maximum(x, 0.0),
        space,
        x0,
        grid,
        n_paths,
        seed,
    )
    return PathEnsemble(grid, values, x0, "extremal(box)", seed)


def hazard_integral(paths: PathEnsemble) -> HazardEnsemble:
    """Per-path cumulative trapezoid of the intensity; exact for piecewise
    linear intensities."""
    dt = paths.dt
    gamma = np.zeros_like(paths.values)
    increments = 0.5 * dt * (paths.values[:, 1:] + paths.values[:, :-1])
    np.cumsum(increments, axis=1, out=gamma[:, 1:])
    return HazardEnsemble(paths.time_grid, gamma)


def survivor_index(hazard: HazardEnsemble) -> np.ndarray:
    """Elementwise ``exp(-gamma)``; rows start at 1 and are nonincreasing
    whenever the source intensity is nonnegative."""
    return np.exp(-hazard.gamma)


def invert_default_times(
    hazard: HazardEnsemble, xi: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """First times the hazard reaches ``-log(xi)``, one per path.

    The hazard is piecewise linear between grid nodes, so linear
    interpolation inverts it exactly.  Returns ``(tau, beyond_horizon)``
    where ``tau`` is ``inf`` on paths that never cross.
    """
    threshold = -np.log(xi)
    n_paths = hazard.gamma.shape[0]

    crossed = hazard.gamma >= threshold[:, None]
    first = crossed.argmax(axis=1)
    beyond = ~crossed.any(axis=1)

    tau = np.full(n_paths, np.inf)
    grid = hazard.time_grid
    at_start = ~beyond & (first == 0)
    tau[at_start] = grid[0]
    interior = ~beyond & (first > 0)
    j = first[interior]
    rows = np.nonzero(interior)[0]
    g_prev = hazard.gamma[rows, j - 1]
    g_next = hazard.gamma[rows, j]
    frac = (threshold[interior] - g_prev) / (g_next - g_prev)
    tau[interior] = grid[j - 1] + frac * (grid[j] - grid[j - 1])
    return tau, beyond


def cox_default_times(hazard: HazardEnsemble, seed: int) -> DefaultSample:
    """Default times from the Cox construction.

    One uniform ``xi`` in ``(0, 1]`` is drawn per path from a stream
    independent of the diffusion noise; the default time is the first time
    the hazard reaches ``-log(xi)`` (or marked beyond-horizon if the
    hazard never gets there).
    """
    gen = substream(seed, Purpose.XI)
    n_paths = hazard.gamma.shape[0]
    # random() is uniform on [0, 1); flip to (0, 1] so -log(xi) is finite.
    xi = 1.0 - gen.random(n_paths)
    tau, beyond = invert_default_times(hazard, xi)
    return DefaultSample(
        tau=tau, beyond_horizon=beyond, xi=xi, survivor=survivor_index(hazard)
    )


def _grid_index(time_grid: np.ndarray, t: float) -> int:
    idx = int(round(t / (time_grid[1] - time_grid[0])))
    if idx < 0 or idx >= time_grid.size or abs(time_grid[idx] - t) > 1e-9:
        raise OutOfRangeError(f"time {t} is not on the simulation grid")
    return idx


def mc_bond_estimate(hazard: HazardEnsemble, t: float, T: float) -> McEstimate:
    """Monte Carlo estimate of ``E[exp(-(Gamma_T - Gamma_t))]``."""
    if t > T:
        raise OutOfRangeError(f"need t <= T, got t={t}, T={T}")
    i = _grid_index(hazard.time_grid, t)
    j = _grid_index(hazard.time_grid, T)
    disc = np.exp(-(hazard.gamma[:, j] - hazard.gamma[:, i]))
    n = disc.size
    stderr = float(disc.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return McEstimate(mean=float(disc.mean()), stderr=stderr, n_paths=n)
