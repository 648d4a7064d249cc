"""Batch command-line front door.

Four commands share one JSON configuration document:

* ``price-bond``     -- worst-case bond prices on a maturity x state lattice
* ``simulate``       -- path ensemble, survivor index and Cox comparison
* ``check``          -- the statistical no-arbitrage check suite
* ``price-product``  -- bond leg x asset leg product claim values

Every command writes CSV tables plus a ``report.json`` into the output
directory.  CSV floats use shortest round-trip formatting and each file
carries the config hash on a leading comment line.

Exit codes: 0 success, 2 configuration error, 3 numeric/solver error,
4 check failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import arbitrage, pricing, simulate
from .errors import (
    BlowUpError,
    InvalidBoxError,
    OutOfRangeError,
    UnstableGridError,
)
from .params import ParameterBox, StateSpace, corner_grid
from .riccati import longevity_value_path, solve_riccati, upper_bond_price

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_CHECK_FAILED = 4

THREADS_ENV_VAR = "ROBUST_AFFINE_THREADS"

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Configuration document failed validation."""


@dataclass
class McSettings:
    n_paths: int = 20_000
    dt: float = 2e-3
    seed: int = 1
    corner_resolution: int = 2


@dataclass
class PdeSettings:
    grid_lo: float
    grid_hi: float
    n_nodes: int
    dt: float
    vol_bounds: tuple[float, float]
    payoff_file: str
    sigma_file: str | None = None
    drift_file: str | None = None
    load_file: str | None = None


@dataclass
class AssetSettings:
    s0: float = 1.0
    sigma: float = 0.2


@dataclass
class RunConfig:
    """Validated configuration for one CLI run."""

    box: ParameterBox
    state_space: StateSpace
    horizon: float
    x0: float = 0.0
    riccati_tol: float = 1e-8
    mc: McSettings = field(default_factory=McSettings)
    pde: PdeSettings | None = None
    asset: AssetSettings = field(default_factory=AssetSettings)
    strategy_files: list[str] = field(default_factory=list)
    maturities: list[float] = field(default_factory=list)
    states: list[float] = field(default_factory=list)
    product_points: list[tuple[float, float, float]] = field(default_factory=list)
    output_dir: str = "out"

    def to_dict(self) -> dict:
        """Reconstruct the JSON document; parse(to_dict()) is the identity."""
        doc = {
            "schema_version": SCHEMA_VERSION,
            "box": {
                "b0": [self.box.b0_low, self.box.b0_high],
                "b1": [self.box.b1_low, self.box.b1_high],
                "a0": [self.box.a0_low, self.box.a0_high],
                "a1": [self.box.a1_low, self.box.a1_high],
            },
            "state_space": self.state_space.value,
            "horizon": self.horizon,
            "x0": self.x0,
            "riccati_tol": self.riccati_tol,
            "mc": {
                "n_paths": self.mc.n_paths,
                "dt": self.mc.dt,
                "seed": self.mc.seed,
                "corner_resolution": self.mc.corner_resolution,
            },
            "asset": {"s0": self.asset.s0, "sigma": self.asset.sigma},
            "strategy_files": list(self.strategy_files),
            "maturities": list(self.maturities),
            "states": list(self.states),
            "product_points": [list(p) for p in self.product_points],
            "output_dir": self.output_dir,
        }
        if self.pde is not None:
            doc["pde"] = {
                "grid_lo": self.pde.grid_lo,
                "grid_hi": self.pde.grid_hi,
                "n_nodes": self.pde.n_nodes,
                "dt": self.pde.dt,
                "vol_bounds": list(self.pde.vol_bounds),
                "payoff_file": self.pde.payoff_file,
                "sigma_file": self.pde.sigma_file,
                "drift_file": self.pde.drift_file,
                "load_file": self.pde.load_file,
            }
        return doc

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _interval(doc: dict, key: str) -> tuple[float, float]:
    _require(key in doc, f"box is missing the '{key}' interval")
    pair = doc[key]
    _require(
        isinstance(pair, list) and len(pair) == 2,
        f"box entry '{key}' must be a [low, high] pair",
    )
    return float(pair[0]), float(pair[1])


def parse_config(doc: dict, base_dir: Path | None = None) -> RunConfig:
    """Validate a parsed JSON document into a :class:`RunConfig`.

    Relative file references are resolved against ``base_dir``.
    """
    _require(isinstance(doc, dict), "config must be a JSON object")
    version = doc.get("schema_version")
    _require(
        version == SCHEMA_VERSION,
        f"schema_version must be {SCHEMA_VERSION}, got {version!r}",
    )
    _require("box" in doc, "config is missing 'box'")
    b0 = _interval(doc["box"], "b0")
    b1 = _interval(doc["box"], "b1")
    a0 = _interval(doc["box"], "a0")
    a1 = _interval(doc["box"], "a1")
    try:
        box = ParameterBox(*b0, *b1, *a0, *a1)
    except ValueError as exc:
        raise ConfigError(f"invalid box: {exc}") from exc

    space_name = doc.get("state_space", "real_line")
    try:
        space = StateSpace(space_name)
    except ValueError as exc:
        raise ConfigError(f"unknown state_space {space_name!r}") from exc

    horizon = float(doc.get("horizon", 0.0))
    _require(horizon > 0.0, "horizon must be positive")
    x0 = float(doc.get("x0", 0.0))
    _require(space.contains(x0), f"x0={x0} outside state space {space.value}")
    tol = float(doc.get("riccati_tol", 1e-8))
    _require(0.0 < tol <= 1e-3, "riccati_tol must lie in (0, 1e-3]")

    mc_doc = doc.get("mc", {})
    mc = McSettings(
        n_paths=int(mc_doc.get("n_paths", 20_000)),
        dt=float(mc_doc.get("dt", 2e-3)),
        seed=int(mc_doc.get("seed", 1)),
        corner_resolution=int(mc_doc.get("corner_resolution", 2)),
    )
    _require(mc.n_paths >= 2, "mc.n_paths must be at least 2")
    _require(0.0 < mc.dt <= horizon, "mc.dt must lie in (0, horizon]")
    steps = mc.dt and round(horizon / mc.dt)
    _require(
        abs(steps * mc.dt - horizon) <= 1e-9 * max(1.0, horizon),
        "horizon must be an integral number of mc.dt steps",
    )
    _require(mc.corner_resolution >= 2, "mc.corner_resolution must be >= 2")

    asset_doc = doc.get("asset", {})
    asset = AssetSettings(
        s0=float(asset_doc.get("s0", 1.0)), sigma=float(asset_doc.get("sigma", 0.2))
    )
    _require(asset.s0 > 0.0, "asset.s0 must be positive")
    _require(asset.sigma > 0.0, "asset.sigma must be positive")

    def resolve(name: str) -> str:
        p = Path(name)
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        _require(p.exists(), f"referenced file does not exist: {p}")
        return str(p)

    pde = None
    if "pde" in doc:
        p = doc["pde"]
        for req in ("grid_lo", "grid_hi", "n_nodes", "dt", "vol_bounds", "payoff_file"):
            _require(req in p, f"pde settings missing '{req}'")
        vb = p["vol_bounds"]
        _require(
            isinstance(vb, list) and len(vb) == 2 and 0.0 <= vb[0] <= vb[1],
            "pde.vol_bounds must be [low, high] with 0 <= low <= high",
        )
        pde = PdeSettings(
            grid_lo=float(p["grid_lo"]),
            grid_hi=float(p["grid_hi"]),
            n_nodes=int(p["n_nodes"]),
            dt=float(p["dt"]),
            vol_bounds=(float(vb[0]), float(vb[1])),
            payoff_file=resolve(p["payoff_file"]),
            sigma_file=resolve(p["sigma_file"]) if p.get("sigma_file") else None,
            drift_file=resolve(p["drift_file"]) if p.get("drift_file") else None,
            load_file=resolve(p["load_file"]) if p.get("load_file") else None,
        )
        _require(pde.n_nodes >= 3, "pde.n_nodes must be at least 3")
        _require(pde.grid_lo < pde.grid_hi, "pde grid bounds must be increasing")
        _require(pde.dt > 0.0, "pde.dt must be positive")

    strategy_files = [resolve(s) for s in doc.get("strategy_files", [])]

    maturities = [float(m) for m in doc.get("maturities", [])]
    _require(
        all(0.0 < m <= horizon for m in maturities),
        "maturities must lie in (0, horizon]",
    )
    states = [float(s) for s in doc.get("states", [])]
    _require(all(space.contains(s) for s in states), "states must lie in the state space")

    points = []
    for entry in doc.get("product_points", []):
        _require(
            isinstance(entry, list) and len(entry) == 3,
            "product_points entries must be [t, x_mu, y_s] triples",
        )
        t, x_mu, y_s = (float(v) for v in entry)
        _require(0.0 <= t <= horizon, f"product point time {t} outside [0, horizon]")
        points.append((t, x_mu, y_s))

    return RunConfig(
        box=box,
        state_space=space,
        horizon=horizon,
        x0=x0,
        riccati_tol=tol,
        mc=mc,
        pde=pde,
        asset=asset,
        strategy_files=strategy_files,
        maturities=maturities,
        states=states,
        product_points=points,
        output_dir=str(doc.get("output_dir", "out")),
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file does not exist: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return parse_config(doc, base_dir=path.parent)


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header: list[str], rows: list[list], config_hash: str):
    """CSV with a config-hash comment line and round-trip float formatting."""
    lines = [f"# config_hash={config_hash}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


@dataclass
class RunReport:
    command: str
    config: dict
    config_hash: str
    verdicts: list[dict] = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def add_verdict(self, verdict: arbitrage.Verdict, asserted: bool = True):
        self.verdicts.append(
            {
                "name": verdict.name,
                "passed": verdict.passed,
                "asserted": asserted,
                "detail": verdict.detail,
            }
        )

    def asserted_failures(self) -> list[str]:
        return [v["name"] for v in self.verdicts if v["asserted"] and not v["passed"]]

    def write(self, out_dir: Path):
        path = out_dir / "report.json"
        path.write_text(json.dumps(self.__dict__, indent=2, default=str) + "\n")


class _Timer:
    def __init__(self, report: RunReport, name: str):
        self.report = report
        self.name = name

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.report.timings[self.name] = round(time.perf_counter() - self.t0, 6)
        return False


def _new_report(command: str, config: RunConfig) -> RunReport:
    return RunReport(command=command, config=config.to_dict(), config_hash=config.config_hash())


def cmd_price_bond(config: RunConfig, out_dir: Path) -> RunReport:
    """Upper bond prices on the maturity x state lattice."""
    if not config.maturities:
        raise ConfigError("price-bond needs a non-empty 'maturities' list")
    if not config.states:
        raise ConfigError("price-bond needs a non-empty 'states' list")
    report = _new_report("price-bond", config)
    with _Timer(report, "solve_riccati"):
        sol = solve_riccati(
            config.box, config.state_space, config.horizon, u=0.0, tol=config.riccati_tol
        )
    rows = []
    with _Timer(report, "evaluate"):
        for maturity in config.maturities:
            for state in config.states:
                price = upper_bond_price(sol, 0.0, maturity, state)
                rows.append([maturity, state, price])
    write_csv(
        out_dir / "bond_prices.csv",
        ["maturity", "state", "price"],
        rows,
        report.config_hash,
    )
    report.tables["bond_prices"] = str(out_dir / "bond_prices.csv")
    return report


def _checkpoint_indices(n_times: int, count: int = 9) -> np.ndarray:
    return np.unique(np.linspace(0, n_times - 1, min(count, n_times)).round().astype(int))


def cmd_simulate(config: RunConfig, out_dir: Path) -> RunReport:
    """Extremal-model ensemble summary and Cox consistency table."""
    report = _new_report("simulate", config)
    mc = config.mc
    with _Timer(report, "simulate"):
        paths = simulate.simulate_extremal(
            config.box,
            config.state_space,
            config.x0,
            config.horizon,
            mc.dt,
            mc.n_paths,
            mc.seed,
        )
    with _Timer(report, "hazard"):
        hazard = simulate.hazard_integral(paths)
        survivor = simulate.survivor_index(hazard)
        sample = simulate.cox_default_times(hazard, mc.seed)

    idx = _checkpoint_indices(paths.time_grid.size)
    summary_rows = []
    for j in idx:
        t = paths.time_grid[j]
        col = paths.values[:, j]
        surv = survivor[:, j]
        summary_rows.append(
            [t, col.mean(), col.std(ddof=1), surv.mean(), surv.std(ddof=1) / np.sqrt(mc.n_paths)]
        )
    write_csv(
        out_dir / "ensemble_summary.csv",
        ["time", "mean_intensity", "std_intensity", "mean_survivor", "survivor_stderr"],
        summary_rows,
        report.config_hash,
    )
    report.tables["ensemble_summary"] = str(out_dir / "ensemble_summary.csv")

    cox_rows = []
    all_within = True
    for j in idx[1:]:
        t = paths.time_grid[j]
        alive = float(np.mean(sample.tau > t))
        surv = survivor[:, j]
        mean_surv = float(surv.mean())
        # Binomial noise evaluated at the model's survival probability, so
        # it stays positive when the observed fraction saturates at 1.
        binom_se = float(np.sqrt(max(mean_surv * (1.0 - mean_surv), 0.0) / mc.n_paths))
        surv_se = float(surv.std(ddof=1) / np.sqrt(mc.n_paths))
        within = abs(alive - mean_surv) <= 3.0 * (binom_se + surv_se)
        all_within = all_within and within
        cox_rows.append([t, alive, mean_surv, binom_se, surv_se, int(within)])
    write_csv(
        out_dir / "cox_consistency.csv",
        ["time", "frac_alive", "mean_survivor", "binomial_se", "survivor_se", "within_3se"],
        cox_rows,
        report.config_hash,
    )
    report.tables["cox_consistency"] = str(out_dir / "cox_consistency.csv")
    report.add_verdict(
        arbitrage.Verdict(
            name="cox_consistency",
            passed=all_within,
            detail=f"{len(cox_rows)} checkpoint times compared",
        )
    )
    return report


def cmd_check(config: RunConfig, out_dir: Path, threads: int) -> RunReport:
    """Full statistical check suite over the corner grid and extremal model."""
    if not config.strategy_files:
        raise ConfigError("check needs at least one strategy file")
    strategies = []
    for path in config.strategy_files:
        try:
            strategies.append(arbitrage.read_strategy_file(path))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    report = _new_report("check", config)
    mc = config.mc
    with _Timer(report, "solve_riccati"):
        sol = solve_riccati(
            config.box, config.state_space, config.horizon, u=0.0, tol=config.riccati_tol
        )
    riccati_price = upper_bond_price(sol, 0.0, config.horizon, config.x0)

    corners = corner_grid(config.box, mc.corner_resolution)
    measures = [("extremal", None)] + [
        (f"corner{i}", theta) for i, theta in enumerate(corners)
    ]

    def run_measure(entry):
        tag, theta = entry
        seed = mc.seed if theta is None else mc.seed + 7919 * (corners.index(theta) + 1)
        if theta is None:
            paths = simulate.simulate_extremal(
                config.box, config.state_space, config.x0, config.horizon,
                mc.dt, mc.n_paths, seed,
            )
        else:
            paths = simulate.simulate_corner(
                theta, config.state_space, config.x0, config.horizon,
                mc.dt, mc.n_paths, seed,
            )
        hazard = simulate.hazard_integral(paths)
        estimate = simulate.mc_bond_estimate(hazard, 0.0, config.horizon)
        sl_values = longevity_value_path(
            paths.time_grid, paths.values, sol, config.horizon
        )
        return tag, paths, estimate, sl_values

    with _Timer(report, "simulate_measures"):
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            results = list(pool.map(run_measure, measures))

    # Corner dominance against the Riccati upper price.
    dominance_rows = []
    dominance_ok = True
    for tag, _, estimate, _ in results:
        bound = riccati_price + 3.0 * estimate.stderr
        ok = estimate.mean <= bound
        if tag != "extremal":
            dominance_ok = dominance_ok and ok
        dominance_rows.append([tag, estimate.mean, estimate.stderr, riccati_price, int(ok)])
    write_csv(
        out_dir / "corner_dominance.csv",
        ["measure", "mc_price", "stderr", "riccati_price", "dominated"],
        dominance_rows,
        report.config_hash,
    )
    report.tables["corner_dominance"] = str(out_dir / "corner_dominance.csv")
    report.add_verdict(
        arbitrage.Verdict(
            "corner_dominance", dominance_ok, f"{len(corners)} corner measures"
        )
    )

    # Supermartingale suite: flat under the extremal measure, nonincreasing
    # under the corners.
    time_grid = results[0][1].time_grid
    for tag, paths, _, sl_values in results:
        verdict = arbitrage.check_supermartingale(
            sl_values, time_grid, tag, two_sided=(tag == "extremal")
        )
        report.add_verdict(verdict)

    # Strategy checks on the extremal market plus every corner market.
    s_grid, s_paths = arbitrage.geometric_asset_paths(
        config.asset.s0, config.asset.sigma, config.horizon, mc.dt, mc.n_paths, mc.seed
    )
    markets = [
        arbitrage.MarketPaths(time_grid=s_grid, s_paths=s_paths, sy_paths=sl, measure_tag=tag)
        for tag, _, _, sl in results
    ]

    strategy_rows = []
    with _Timer(report, "strategy_checks"):
        for i, strategy in enumerate(strategies):
            name = Path(config.strategy_files[i]).name
            no_short = arbitrage.check_no_short_sale(strategy, {"S", "Y"})
            reports_per_measure = [
                arbitrage.wealth_process(strategy, market, x0=1.0) for market in markets
            ]
            expectation = arbitrage.check_expectation_nonincrease(reports_per_measure)
            # The nonincreasing-expectation condition is structural only
            # for no-short-sale strategies; shorting strategies are
            # reported, not asserted.
            report.add_verdict(
                arbitrage.Verdict(
                    f"no_short_sale[{name}]", no_short.passed, no_short.detail
                ),
                asserted=False,
            )
            report.add_verdict(
                arbitrage.Verdict(
                    f"expectation_nonincrease[{name}]",
                    expectation.passed,
                    expectation.detail,
                ),
                asserted=no_short.passed,
            )
            strategy_rows.append([name, int(no_short.passed), int(expectation.passed)])
    write_csv(
        out_dir / "strategy_checks.csv",
        ["strategy", "no_short_sale", "expectation_nonincrease"],
        strategy_rows,
        report.config_hash,
    )
    report.tables["strategy_checks"] = str(out_dir / "strategy_checks.csv")

    # Cox consistency under the extremal measure (nonnegative spaces only;
    # on the real line the survival identity needs a nonnegative intensity).
    if config.state_space in (StateSpace.NON_NEGATIVE, StateSpace.POSITIVE):
        extremal_paths = results[0][1]
        hazard = simulate.hazard_integral(extremal_paths)
        sample = simulate.cox_default_times(hazard, mc.seed)
        survivor = sample.survivor
        ok = True
        for j in _checkpoint_indices(extremal_paths.time_grid.size, 5)[1:]:
            t = extremal_paths.time_grid[j]
            alive = float(np.mean(sample.tau > t))
            surv = survivor[:, j]
            mean_surv = float(surv.mean())
            binom_se = float(np.sqrt(max(mean_surv * (1 - mean_surv), 0.0) / mc.n_paths))
            surv_se = float(surv.std(ddof=1) / np.sqrt(mc.n_paths))
            ok = ok and abs(alive - mean_surv) <= 3.0 * (binom_se + surv_se)
        report.add_verdict(arbitrage.Verdict("cox_consistency", ok))

    # First-kind arbitrage probe over a randomized admissible family.
    with _Timer(report, "na1_probe"):
        probe_times = tuple(
            float(time_grid[j]) for j in _checkpoint_indices(time_grid.size, 5)
        )
        family = arbitrage.random_strategy_family(100, probe_times, seed=mc.seed)
        report.add_verdict(arbitrage.probe_na1(family, markets))

    return report


def cmd_price_product(config: RunConfig, out_dir: Path) -> RunReport:
    """Bond leg, asset leg and their product at the requested points."""
    if config.pde is None:
        raise ConfigError("price-product needs 'pde' settings")
    if not config.product_points:
        raise ConfigError("price-product needs a non-empty 'product_points' list")

    report = _new_report("price-product", config)
    with _Timer(report, "solve_riccati"):
        sol = solve_riccati(
            config.box, config.state_space, config.horizon, u=0.0, tol=config.riccati_tol
        )

    pde = config.pde
    states, values = pricing.read_tabulated(pde.payoff_file)
    grid = np.linspace(pde.grid_lo, pde.grid_hi, pde.n_nodes)
    payoff = np.interp(grid, states, values)

    def coeff(path: str | None, default):
        if path is None:
            return default
        cs, cv = pricing.read_tabulated(path)
        return np.interp(grid, cs, cv)

    problem = pricing.GPdeProblem(
        grid_lo=pde.grid_lo,
        grid_hi=pde.grid_hi,
        n_nodes=pde.n_nodes,
        dt=pde.dt,
        horizon=config.horizon,
        terminal_payoff=payoff,
        sigma=coeff(pde.sigma_file, grid.copy()),
        drift=coeff(pde.drift_file, np.zeros(pde.n_nodes)),
        load=coeff(pde.load_file, np.zeros(pde.n_nodes)),
        vol_bounds=pde.vol_bounds,
    )
    with _Timer(report, "solve_g_pde"):
        surface = pricing.solve_g_pde(problem)

    rows = []
    with _Timer(report, "evaluate"):
        for t, x_mu, y_s in config.product_points:
            bond_leg = upper_bond_price(sol, t, config.horizon, x_mu)
            asset_leg = surface.value_at(t, y_s)
            rows.append([t, x_mu, y_s, bond_leg, asset_leg, bond_leg * asset_leg])
    write_csv(
        out_dir / "product_values.csv",
        ["t", "x_mu", "y_s", "bond_leg", "asset_leg", "product"],
        rows,
        report.config_hash,
    )
    report.tables["product_values"] = str(out_dir / "product_values.csv")
    return report


def _resolve_threads(flag_value: int | None) -> int:
    if flag_value is not None:
        return max(1, flag_value)
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV_VAR} must be an integer, got {env!r}") from exc
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robust-affine",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "price-bond": "worst-case bond prices; writes bond_prices.csv "
        "(maturity,state,price)",
        "simulate": "extremal-model ensemble; writes ensemble_summary.csv "
        "(time,mean_intensity,std_intensity,mean_survivor,survivor_stderr) "
        "and cox_consistency.csv "
        "(time,frac_alive,mean_survivor,binomial_se,survivor_se,within_3se)",
        "check": "no-arbitrage check suite; writes corner_dominance.csv "
        "(measure,mc_price,stderr,riccati_price,dominated) and "
        "strategy_checks.csv (strategy,no_short_sale,expectation_nonincrease)",
        "price-product": "product claim values; writes product_values.csv "
        "(t,x_mu,y_s,bond_leg,asset_leg,product)",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument(
            "--out",
            default=None,
            help="output directory (default: config output_dir, else ./out)",
        )
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument(
            "--threads",
            type=int,
            default=None,
            help=f"worker threads (default: {THREADS_ENV_VAR} or all cores)",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config.mc.seed = args.seed
        threads = _resolve_threads(args.threads)
        out_dir = Path(args.out) if args.out is not None else Path(config.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "price-bond":
            report = cmd_price_bond(config, out_dir)
        elif args.command == "simulate":
            report = cmd_simulate(config, out_dir)
        elif args.command == "check":
            report = cmd_check(config, out_dir, threads)
        else:
            report = cmd_price_product(config, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnstableGridError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (BlowUpError, InvalidBoxError, OutOfRangeError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    report.timings["threads"] = threads
    report.write(out_dir)
    failures = report.asserted_failures()
    for v in report.verdicts:
        status = "PASS" if v["passed"] else "FAIL"
        print(f"[{status}] {v['name']}: {v['detail']}")
    if failures:
        print(f"{len(failures)} asserted check(s) failed: {failures}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
