"""Claim pricing: pure endowments, the sublinear G operator and its PDE.

A pure endowment paying ``Y`` at ``T`` on survival is worth
``1{no default} * Y * upper_bond_price`` for deterministic payouts.  Product
claims of the form ``exp(-int mu) * f(S_T)`` factor into the bond leg times
the value of ``f(S_T)`` under volatility uncertainty; the asset leg solves
the one-dimensional nonlinear PDE

    dv/dt + G(sigma(y)^2 v_yy + h(y) v_y) + b(y) v_y = 0,   v(T, y) = f(y),

with ``G(a) = (vol_hi * max(a, 0) - vol_lo * max(-a, 0)) / 2`` on a variance
interval ``[vol_lo, vol_hi]``.  The solver is a backward-in-time explicit
monotone finite-difference scheme with an enforced stability bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import OutOfRangeError, UnstableGridError
from .riccati import RiccatiSolution, upper_bond_price


@dataclass(frozen=True, eq=False)
class EndowmentSpec:
    """A pure endowment: pays at maturity only if no default occurred.

    The payout is either a constant amount or a tabulated deterministic
    function of the terminal intensity (piecewise-linearly interpolated).
    """

    maturity: float
    payout: float | None = None
    payout_states: np.ndarray | None = None
    payout_values: np.ndarray | None = None

    def __post_init__(self):
        if self.maturity < 0.0:
            raise ValueError("maturity must be nonnegative")
        tabulated = self.payout_states is not None and self.payout_values is not None
        if (self.payout is None) == (not tabulated):
            raise ValueError("specify exactly one of a constant or tabulated payout")
        if self.payout is not None:
            if self.payout < 0.0:
                raise ValueError("payout must be nonnegative")
        else:
            states = np.asarray(self.payout_states, dtype=float)
            values = np.asarray(self.payout_values, dtype=float)
            if states.ndim != 1 or states.shape != values.shape:
                raise ValueError("tabulated payout needs matching 1-d arrays")
            if np.any(np.diff(states) <= 0.0):
                raise ValueError("payout states must be strictly increasing")
            if np.any(values < 0.0):
                raise ValueError("payout must be nonnegative")

    def payout_at(self, x_terminal: float) -> float:
        if self.payout is not None:
            return self.payout
        return float(np.interp(x_terminal, self.payout_states, self.payout_values))


def pure_endowment_price(
    sol: RiccatiSolution,
    t: float,
    T: float,
    x: float,
    defaulted: bool,
    payout: float,
) -> float:
    """Worst-case price of a constant-payout pure endowment.

    Zero after default; otherwise ``payout`` times the worst-case bond
    price, sharing that code path exactly.
    """
    if payout < 0.0:
        raise ValueError("payout must be nonnegative")
    if defaulted:
        return 0.0
    return payout * upper_bond_price(sol, t, T, x)


def g_function(a: float, vol_bounds: tuple[float, float]) -> float:
    """Sublinear second-order operator for a variance interval.

    ``G(a) = (vol_hi * a^+ - vol_lo * a^-) / 2`` with ``vol_bounds``
    holding variance rates ``(vol_lo, vol_hi)``.
    """
    lo, hi = vol_bounds
    if lo < 0.0 or lo > hi:
        raise ValueError(f"need 0 <= vol_lo <= vol_hi, got {vol_bounds}")
    return 0.5 * (hi * max(a, 0.0) - lo * max(-a, 0.0))


def _g_array(a: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return 0.5 * (hi * np.maximum(a, 0.0) - lo * np.maximum(-a, 0.0))


@dataclass(frozen=True, eq=False)
class GPdeProblem:
    """Terminal payoff, coefficients and grid for the asset-leg PDE.

    All coefficient tables are aligned with the uniform asset grid defined
    by ``grid_lo``, ``grid_hi`` and ``n_nodes``; ``dt`` is the explicit
    time step and ``horizon`` the terminal time.
    """

    grid_lo: float
    grid_hi: float
    n_nodes: int
    dt: float
    horizon: float
    terminal_payoff: np.ndarray
    sigma: np.ndarray
    drift: np.ndarray
    load: np.ndarray
    vol_bounds: tuple[float, float]

    def __post_init__(self):
        if self.n_nodes < 3:
            raise ValueError("grid needs at least 3 nodes")
        if self.grid_lo >= self.grid_hi:
            raise ValueError("grid bounds must be increasing")
        if self.dt <= 0.0 or self.horizon <= 0.0:
            raise ValueError("dt and horizon must be positive")
        lo, hi = self.vol_bounds
        if lo < 0.0 or lo > hi:
            raise ValueError("vol_bounds must satisfy 0 <= lo <= hi")
        for name in ("terminal_payoff", "sigma", "drift", "load"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (self.n_nodes,):
                raise ValueError(f"{name} must have one value per grid node")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
            object.__setattr__(self, name, arr)

    @classmethod
    def from_functions(
        cls,
        grid_lo: float,
        grid_hi: float,
        n_nodes: int,
        dt: float,
        horizon: float,
        payoff,
        sigma,
        vol_bounds: tuple[float, float],
        drift=None,
        load=None,
    ) -> "GPdeProblem":
        """Tabulate callables (or broadcastable constants) onto the grid."""
        y = np.linspace(grid_lo, grid_hi, n_nodes)

        def tab(f, default=0.0):
            if f is None:
                return np.full(n_nodes, default)
            if callable(f):
                return np.asarray([f(v) for v in y], dtype=float)
            return np.broadcast_to(np.asarray(f, dtype=float), (n_nodes,)).copy()

        return cls(
            grid_lo=grid_lo,
            grid_hi=grid_hi,
            n_nodes=n_nodes,
            dt=dt,
            horizon=horizon,
            terminal_payoff=tab(payoff),
            sigma=tab(sigma),
            drift=tab(drift),
            load=tab(load),
            vol_bounds=vol_bounds,
        )

    @property
    def asset_grid(self) -> np.ndarray:
        return np.linspace(self.grid_lo, self.grid_hi, self.n_nodes)

    @property
    def dy(self) -> float:
        return (self.grid_hi - self.grid_lo) / (self.n_nodes - 1)

    def max_stable_dt(self) -> float:
        """Largest time step keeping the explicit scheme monotone."""
        _, vol_hi = self.vol_bounds
        peak = vol_hi * float(np.max(self.sigma**2))
        if peak == 0.0:
            return np.inf
        return self.dy**2 / peak


@dataclass(frozen=True, eq=False)
class ValueSurface:
    """Backward-solved values on the time x asset grid.

    ``values[k]`` is the layer at ``times[k]``; the last layer equals the
    terminal payoff.
    """

    times: np.ndarray
    asset_grid: np.ndarray
    values: np.ndarray

    def value_at(self, t: float, y: float) -> float:
        """Bilinear interpolation on the surface grid."""
        times, grid = self.times, self.asset_grid
        if t < times[0] - 1e-12 or t > times[-1] + 1e-12:
            raise OutOfRangeError(f"time {t} outside surface range")
        if y < grid[0] - 1e-12 or y > grid[-1] + 1e-12:
            raise OutOfRangeError(f"asset state {y} outside surface grid")
        t = min(max(t, times[0]), times[-1])
        y = min(max(y, grid[0]), grid[-1])
        k = min(int(np.searchsorted(times, t, side="right")) - 1, times.size - 2)
        k = max(k, 0)
        w = (t - times[k]) / (times[k + 1] - times[k])
        row = (1.0 - w) * self.values[k] + w * self.values[k + 1]
        return float(np.interp(y, grid, row))


def solve_g_pde(problem: GPdeProblem) -> ValueSurface:
    """Backward explicit monotone finite-difference solve of the G-PDE.

    Central second difference and central first difference feed the G
    operator; the outer drift term is discretized upwind.  Boundary nodes
    use a vanishing second difference with one-sided first differences
    (linear extrapolation), which is exact for asymptotically linear
    payoffs.  The monotone-scheme time step bound is enforced, not assumed.

    Raises
    ------
    UnstableGridError
        If ``problem.dt`` exceeds the stability bound; the error carries
        the largest admissible step.
    """
    max_dt = problem.max_stable_dt()
    if problem.dt > max_dt * (1 + 1e-12):
        raise UnstableGridError(problem.dt, max_dt)

    lo, hi = problem.vol_bounds
    dy = problem.dy
    sig2 = problem.sigma**2
    b = problem.drift
    h = problem.load
    bp = np.maximum(b, 0.0)
    bm = np.maximum(-b, 0.0)

    n_layers = int(np.ceil(problem.horizon / problem.dt - 1e-12))
    times = np.linspace(0.0, problem.horizon, n_layers + 1)

    values = np.empty((n_layers + 1, problem.n_nodes))
    values[-1] = problem.terminal_payoff
    v = problem.terminal_payoff.copy()
    d2 = np.zeros_like(v)
    d1c = np.zeros_like(v)
    up = np.zeros_like(v)

    for k in range(n_layers - 1, -1, -1):
        dt_k = times[k + 1] - times[k]
        d2[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / dy**2
        d2[0] = 0.0
        d2[-1] = 0.0
        d1c[1:-1] = (v[2:] - v[:-2]) / (2.0 * dy)
        d1c[0] = (v[1] - v[0]) / dy
        d1c[-1] = (v[-1] - v[-2]) / dy
        up[1:-1] = bp[1:-1] * (v[2:] - v[1:-1]) / dy - bm[1:-1] * (v[1:-1] - v[:-2]) / dy
        up[0] = b[0] * (v[1] - v[0]) / dy
        up[-1] = b[-1] * (v[-1] - v[-2]) / dy
        v = v + dt_k * (_g_array(sig2 * d2 + h * d1c, lo, hi) + up)
        values[k] = v

    return ValueSurface(times=times, asset_grid=problem.asset_grid, values=values)


def product_claim_value(
    t: float,
    x_mu: float,
    sol: RiccatiSolution,
    surface: ValueSurface,
    y_s: float,
    T: float,
) -> float:
    """Price of the product claim: bond leg times asset leg.

    Returns ``upper_bond_price(sol, t, T, x_mu) * surface.value_at(t, y_s)``.
    """
    return upper_bond_price(sol, t, T, x_mu) * surface.value_at(t, y_s)


def read_tabulated(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Load a two-column (state, value) table with a strictly increasing
    first column; ``#`` starts a comment."""
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-numeric entry") from exc
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least two rows")
    states = np.array([r[0] for r in rows])
    values = np.array([r[1] for r in rows])
    if np.any(np.diff(states) <= 0.0):
        raise ValueError(f"{path}: first column must be strictly increasing")
    return states, values
