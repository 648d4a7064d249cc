"""Simple-strategy wealth processes and statistical no-arbitrage checks.

A simple strategy rebalances at deterministic dates and holds constants
``(h_S, h_Y)`` per interval; its wealth is the exact discrete telescoping
sum of holdings times price increments in the traded asset ``S`` and the
claim price process ``S^Y``.  The checks in this module are desk-scale,
statistical shadows of the structural no-arbitrage conditions: admissibility
(quasi-sure nonnegativity proxied over all simulated paths and measures),
nonincreasing expected wealth, supermartingale value processes, no-short-
sale constraints, and the one-sided superhedging inequality.

The traded asset is modeled as driftless geometric paths at a constant
per-measure volatility, which is a martingale by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GridMismatchError, NotASuperhedgeError
from .simulate import Purpose, substream


@dataclass(frozen=True)
class SimpleStrategy:
    """Deterministic rebalance dates with constant holdings per interval.

    ``rebalance_times`` is ascending and starts at 0; ``holdings`` has one
    ``(h_S, h_Y)`` pair per interval, decided at the interval's left
    endpoint.
    """

    rebalance_times: tuple[float, ...]
    holdings: tuple[tuple[float, float], ...]

    def __post_init__(self):
        times = self.rebalance_times
        if len(times) < 2:
            raise ValueError("need at least one interval")
        if times[0] != 0.0:
            raise ValueError("first rebalance time must be 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("rebalance times must be strictly increasing")
        if len(self.holdings) != len(times) - 1:
            raise ValueError("need one (h_S, h_Y) pair per interval")


@dataclass(frozen=True, eq=False)
class MarketPaths:
    """Aligned simulated paths of the traded asset and the claim price."""

    time_grid: np.ndarray
    s_paths: np.ndarray
    sy_paths: np.ndarray
    measure_tag: str

    def __post_init__(self):
        if self.s_paths.shape != self.sy_paths.shape:
            raise GridMismatchError("asset and claim ensembles differ in shape")
        if self.s_paths.shape[1] != self.time_grid.size:
            raise GridMismatchError("paths do not match the time grid")

    @property
    def n_paths(self) -> int:
        return self.s_paths.shape[0]


@dataclass(frozen=True)
class Verdict:
    """Outcome of one check."""

    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True, eq=False)
class WealthReport:
    """Wealth trajectories of one strategy on one market ensemble."""

    strategy: SimpleStrategy
    measure_tag: str
    x0: float
    time_grid: np.ndarray
    wealth: np.ndarray

    @property
    def means(self) -> np.ndarray:
        return self.wealth.mean(axis=0)

    @property
    def stderrs(self) -> np.ndarray:
        n = self.wealth.shape[0]
        if n < 2:
            return np.zeros(self.wealth.shape[1])
        return self.wealth.std(axis=0, ddof=1) / np.sqrt(n)


def _grid_indices(time_grid: np.ndarray, times) -> list[int]:
    dt = time_grid[1] - time_grid[0]
    out = []
    for t in times:
        idx = int(round(t / dt))
        if idx < 0 or idx >= time_grid.size or abs(time_grid[idx] - t) > 1e-9:
            raise GridMismatchError(f"rebalance time {t} is not on the market grid")
        out.append(idx)
    return out


def wealth_process(
    strategy: SimpleStrategy, market: MarketPaths, x0: float
) -> WealthReport:
    """Exact discrete wealth ``x0 + sum h_S dS + sum h_Y dS^Y``.

    Each interval contributes ``h * (price[tau_i ^ t] - price[tau_{i-1} ^ t])``
    at every grid time ``t``, evaluated exactly (no compounding error).
    """
    idx = _grid_indices(market.time_grid, strategy.rebalance_times)
    n_paths, n_times = market.s_paths.shape

    gains_s = np.zeros((n_paths, n_times))
    gains_y = np.zeros((n_paths, n_times))
    for (h_s, h_y), a, b in zip(strategy.holdings, idx, idx[1:]):
        # Inside (tau_{i-1}, tau_i] the increment accrues against the left
        # endpoint; afterwards it is frozen at its closing value.
        for gains, paths, h in (
            (gains_s, market.s_paths, h_s),
            (gains_y, market.sy_paths, h_y),
        ):
            gains[:, a : b + 1] += h * (paths[:, a : b + 1] - paths[:, a : a + 1])
            if b + 1 < n_times:
                gains[:, b + 1 :] += (h * (paths[:, b] - paths[:, a]))[:, None]

    wealth = x0 + gains_s + gains_y
    return WealthReport(
        strategy=strategy,
        measure_tag=market.measure_tag,
        x0=x0,
        time_grid=market.time_grid,
        wealth=wealth,
    )


def check_admissible(report: WealthReport) -> Verdict:
    """Nonnegative wealth on every simulated path at every time."""
    worst = float(report.wealth.min())
    return Verdict(
        name=f"admissible[{report.measure_tag}]",
        passed=worst >= 0.0,
        detail=f"min wealth {worst:.6g}",
    )


def check_expectation_nonincrease(reports: list[WealthReport]) -> Verdict:
    """Mean wealth never exceeds the initial capital beyond noise.

    For each measure and grid time the check is
    ``mean(X_t) <= x0 + 3 * stderr(X_t)`` (one-sided statistical slack).
    """
    if not reports:
        raise ValueError("need at least one measure")
    worst_excess = -np.inf
    worst_tag = ""
    for rep in reports:
        excess = rep.means - rep.x0 - 3.0 * rep.stderrs
        peak = float(excess.max())
        if peak > worst_excess:
            worst_excess = peak
            worst_tag = rep.measure_tag
    return Verdict(
        name="expectation_nonincrease",
        passed=worst_excess <= 0.0,
        detail=f"worst excess {worst_excess:.3e} under {worst_tag}",
    )


def check_supermartingale(
    value_paths: np.ndarray,
    time_grid: np.ndarray,
    measure_tag: str,
    n_checkpoints: int = 8,
    two_sided: bool = False,
) -> Verdict:
    """Means of a value process are nonincreasing up to 3 standard errors.

    Consecutive checkpoint times are compared with paired per-path
    differences, which cancels path-level variance.  ``two_sided`` asserts
    flatness (martingale behaviour) instead of decrease.
    """
    n_times = value_paths.shape[1]
    n_checkpoints = min(n_checkpoints, n_times)
    checkpoints = np.unique(
        np.linspace(0, n_times - 1, n_checkpoints).round().astype(int)
    )
    worst = -np.inf
    worst_pair = None
    n = value_paths.shape[0]
    for a, b in zip(checkpoints, checkpoints[1:]):
        diff = value_paths[:, b] - value_paths[:, a]
        mean = float(diff.mean())
        se = float(diff.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        stat = abs(mean) - 3.0 * se if two_sided else mean - 3.0 * se
        if stat > worst:
            worst = stat
            worst_pair = (float(time_grid[a]), float(time_grid[b]))
    mode = "flat" if two_sided else "nonincreasing"
    return Verdict(
        name=f"supermartingale[{measure_tag},{mode}]",
        passed=worst <= 0.0,
        detail=f"worst statistic {worst:.3e} on interval {worst_pair}",
    )


def check_no_short_sale(strategy: SimpleStrategy, which: set[str]) -> Verdict:
    """All selected holdings are nonnegative; ``which`` subsets {'S', 'Y'}."""
    unknown = which - {"S", "Y"}
    if unknown:
        raise ValueError(f"unknown asset selector(s): {sorted(unknown)}")
    violations = []
    for i, (h_s, h_y) in enumerate(strategy.holdings):
        if "S" in which and h_s < 0.0:
            violations.append(f"h_S[{i}]={h_s}")
        if "Y" in which and h_y < 0.0:
            violations.append(f"h_Y[{i}]={h_y}")
    return Verdict(
        name="no_short_sale",
        passed=not violations,
        detail="; ".join(violations) if violations else "all selected holdings >= 0",
    )


def check_superhedge_dominates(
    price: float,
    initial_capital: float,
    strategy: SimpleStrategy,
    markets: list[MarketPaths],
    payoff_paths: list[np.ndarray],
) -> Verdict:
    """One-sided superhedging inequality: operator price <= hedge cost.

    The candidate must first superhedge pathwise on every simulated
    measure (``v`` plus terminal gains covers the claim payoff on each
    path); otherwise it is rejected as not being a superhedge at all.
    """
    slack = 1e-10
    for market, payoff in zip(markets, payoff_paths):
        report = wealth_process(strategy, market, initial_capital)
        shortfall = float((report.wealth[:, -1] - payoff).min())
        if shortfall < -slack:
            raise NotASuperhedgeError(
                f"candidate misses the payoff by {-shortfall:.6g} under "
                f"{market.measure_tag}"
            )
    return Verdict(
        name="superhedge_dominates",
        passed=price <= initial_capital + slack,
        detail=f"price {price:.6g} vs hedge cost {initial_capital:.6g}",
    )


def geometric_asset_paths(
    s0: float,
    sigma: float,
    horizon: float,
    dt: float,
    n_paths: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Driftless geometric paths ``S_t = S_0 exp(sigma W_t - sigma^2 t / 2)``.

    Exact exponential stepping makes each increment a martingale in
    distribution.  Returns ``(time_grid, paths)``.
    """
    if s0 <= 0.0:
        raise ValueError("s0 must be positive")
    n_steps = round(horizon / dt)
    if n_steps < 1 or abs(n_steps * dt - horizon) > 1e-9 * max(1.0, horizon):
        raise GridMismatchError("horizon must be an integral number of steps")
    grid = dt * np.arange(n_steps + 1)
    gen = substream(seed, Purpose.ASSET)
    paths = np.empty((n_paths, n_steps + 1))
    paths[:, 0] = s0
    log_s = np.full(n_paths, np.log(s0))
    drift = -0.5 * sigma * sigma * dt
    scale = sigma * np.sqrt(dt)
    for k in range(n_steps):
        log_s = log_s + drift + scale * gen.standard_normal(n_paths)
        paths[:, k + 1] = np.exp(log_s)
    return grid, paths


def random_strategy_family(
    n_strategies: int,
    rebalance_times: tuple[float, ...],
    seed: int,
    max_units: float = 2.0,
    nonnegative: bool = True,
) -> list[SimpleStrategy]:
    """Randomized simple strategies for statistical probing."""
    gen = substream(seed, Purpose.STRATEGY)
    n_intervals = len(rebalance_times) - 1
    out = []
    for _ in range(n_strategies):
        h = gen.uniform(0.0 if nonnegative else -max_units, max_units, size=(n_intervals, 2))
        out.append(
            SimpleStrategy(
                rebalance_times=tuple(rebalance_times),
                holdings=tuple((float(a), float(b)) for a, b in h),
            )
        )
    return out


def probe_na1(
    strategies: list[SimpleStrategy],
    markets: list[MarketPaths],
) -> Verdict:
    """Search for first-kind arbitrage over a strategy family at zero cost.

    A strategy counts as an arbitrage candidate if, started from zero
    wealth, it stays nonnegative on every path under every measure and its
    terminal wealth is strictly positive with positive frequency under
    every measure.  Passing means no candidate was found; this certifies
    the searched family only, never the model.
    """
    found = []
    for s_idx, strategy in enumerate(strategies):
        admissible = True
        positive_everywhere = True
        for market in markets:
            report = wealth_process(strategy, market, 0.0)
            if float(report.wealth.min()) < 0.0:
                admissible = False
                break
            if not np.any(report.wealth[:, -1] > 0.0):
                positive_everywhere = False
        if admissible and positive_everywhere:
            found.append(s_idx)
    return Verdict(
        name="na1_probe",
        passed=not found,
        detail=(
            f"arbitrage candidates at indices {found}"
            if found
            else f"no candidate among {len(strategies)} strategies"
        ),
    )


def read_strategy_file(path: str | Path) -> SimpleStrategy:
    """Parse a strategy file: one row per interval, columns
    ``tau_left tau_right h_S h_Y``; ``#`` starts a comment.

    Rows must tile ``[0, horizon]`` contiguously.
    """
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(
                    f"{path}:{lineno}: expected 4 columns (tau_left tau_right h_S h_Y)"
                )
            try:
                rows.append(tuple(float(p) for p in parts))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-numeric entry") from exc
    if not rows:
        raise ValueError(f"{path}: no strategy rows")
    times = [rows[0][0]]
    holdings = []
    for lineno_offset, (left, right, h_s, h_y) in enumerate(rows):
        if left != times[-1]:
            raise ValueError(
                f"{path}: interval starting at {left} does not continue from {times[-1]}"
            )
        times.append(right)
        holdings.append((h_s, h_y))
    return SimpleStrategy(rebalance_times=tuple(times), holdings=tuple(holdings))
