"""Worst-case pricing of longevity and credit-linked claims under
affine parameter uncertainty."""

from .errors import (
    BlowUpError,
    GridMismatchError,
    InvalidBoxError,
    InvalidStepError,
    NotASuperhedgeError,
    NotConstantSlopeError,
    OutOfRangeError,
    UnstableGridError,
)
from .params import (
    AffineInterval,
    CornerParameter,
    ParameterBox,
    StateSpace,
    corner_grid,
    diffusion_interval,
    drift_interval,
    extremal_coefficients,
    is_proper,
    upper_slope,
)
from .riccati import (
    RiccatiSolution,
    StepControl,
    longevity_value_path,
    solve_riccati,
    upper_bond_price,
)
from .simulate import (
    DefaultSample,
    HazardEnsemble,
    McEstimate,
    PathEnsemble,
    cox_default_times,
    hazard_integral,
    invert_default_times,
    mc_bond_estimate,
    simulate_corner,
    simulate_extremal,
    survivor_index,
)
from .pricing import (
    EndowmentSpec,
    GPdeProblem,
    ValueSurface,
    g_function,
    product_claim_value,
    pure_endowment_price,
    read_tabulated,
    solve_g_pde,
)
from .arbitrage import (
    MarketPaths,
    SimpleStrategy,
    Verdict,
    WealthReport,
    check_admissible,
    check_expectation_nonincrease,
    check_no_short_sale,
    check_superhedge_dominates,
    check_supermartingale,
    geometric_asset_paths,
    probe_na1,
    random_strategy_family,
    read_strategy_file,
    wealth_process,
)

__version__ = "0.1.0"
