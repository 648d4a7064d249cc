import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from robust_affine import (
    BlowUpError,
    GridMismatchError,
    NotConstantSlopeError,
    OutOfRangeError,
    ParameterBox,
    StateSpace,
    longevity_value_path,
    solve_riccati,
    upper_bond_price,
)

# Non-linear Vasicek configuration: real line, degenerate slope, no
# variance slope.  Closed forms below are the independent oracles.
VASICEK_BOX = ParameterBox(0.01, 0.04, -0.3, -0.3, 0.01, 0.02, 0.0, 0.0)
VAS_SLOPE = -0.3
VAS_A0 = 0.02
VAS_B0 = 0.04

# Non-linear CIR configuration: positive state space, zero variance
# intercept, drift intercept above half the variance slope.
CIR_BOX = ParameterBox(0.03, 0.05, -0.4, -0.3, 0.0, 0.0, 0.01, 0.02)
CIR_KAPPA = 0.3  # minus the upper slope
CIR_A1 = 0.02

ZERO_BOX = ParameterBox.degenerate(0.0, 0.0, 0.0, 0.0)


def vasicek_psi(t):
    """Linear-ODE solution of psi' = slope*psi - 1, psi(0) = 0."""
    return (1.0 - np.exp(VAS_SLOPE * t)) / VAS_SLOPE


def vasicek_phi(t):
    """Independent quadrature of the phi integrand along the closed-form psi."""
    val, _ = quad(
        lambda s: 0.5 * VAS_A0 * vasicek_psi(s) ** 2 + VAS_B0 * vasicek_psi(s),
        0.0,
        t,
        epsabs=1e-14,
        epsrel=1e-14,
    )
    return val


def cir_bond_coefficient(t):
    """Classical CIR bond coefficient B(t); psi(t, 0) = -B(t)."""
    gamma = np.sqrt(CIR_KAPPA**2 + 2.0 * CIR_A1)
    e = np.exp(gamma * t) - 1.0
    return 2.0 * e / ((gamma + CIR_KAPPA) * e + 2.0 * gamma)


@pytest.fixture(scope="module")
def vasicek_sol():
    return solve_riccati(VASICEK_BOX, StateSpace.REAL_LINE, 1.0, u=0.0, tol=1e-9)


@pytest.fixture(scope="module")
def cir_sol():
    return solve_riccati(CIR_BOX, StateSpace.POSITIVE, 1.0, u=0.0, tol=1e-9)


class TestSolveRiccati:
    def test_zero_box_constant_rhs(self):
        sol = solve_riccati(ZERO_BOX, StateSpace.REAL_LINE, 1.0, u=0.0, tol=1e-9)
        assert sol.psi(1.0) == pytest.approx(-1.0, rel=1e-12)
        assert sol.phi(1.0) == 0.0  # phi rhs is identically zero

    def test_vasicek_psi_against_closed_form(self, vasicek_sol):
        expected = vasicek_psi(1.0)
        assert expected == pytest.approx(-0.8639392643942738)
        assert abs(vasicek_sol.psi(1.0) - expected) / abs(expected) < 1e-8

    def test_vasicek_phi_against_quadrature(self, vasicek_sol):
        expected = vasicek_phi(1.0)
        assert expected == pytest.approx(-0.015463422778384785)
        assert abs(vasicek_sol.phi(1.0) - expected) / abs(expected) < 1e-8

    def test_cir_psi_against_closed_form(self, cir_sol):
        expected = -cir_bond_coefficient(1.0)
        assert abs(cir_sol.psi(1.0) - expected) / abs(expected) < 1e-8

    def test_boundary_values_bitwise(self, vasicek_sol):
        assert vasicek_sol.psi_values[0] == 0.0
        assert vasicek_sol.phi_values[0] == 0.0

    @given(st.floats(min_value=-2.0, max_value=0.5))
    @settings(max_examples=20, deadline=None)
    def test_boundary_exact_for_general_u(self, u):
        sol = solve_riccati(VASICEK_BOX, StateSpace.REAL_LINE, 0.5, u=u, tol=1e-6)
        assert sol.psi_values[0] == u
        assert sol.phi_values[0] == 0.0

    def test_grid_well_formed(self, vasicek_sol):
        grid = vasicek_sol.time_grid
        assert grid[0] == 0.0
        assert grid[-1] == 1.0
        assert np.all(np.diff(grid) > 0.0)

    def test_blow_up_guard(self):
        box = ParameterBox(0, 0, 0, 0, 0, 0, 2.0, 2.0)
        with pytest.raises(BlowUpError):
            solve_riccati(box, StateSpace.NON_NEGATIVE, 1.0, u=10.0, tol=1e-6)

    def test_invalid_box_rejected(self):
        box = ParameterBox(0.01, 0.04, -0.3, -0.1, 0.01, 0.02, 0.0, 0.0)
        with pytest.raises(NotConstantSlopeError):
            solve_riccati(box, StateSpace.REAL_LINE, 1.0)

    def test_tol_validation(self):
        with pytest.raises(ValueError):
            solve_riccati(VASICEK_BOX, StateSpace.REAL_LINE, 1.0, tol=1e-2)
        with pytest.raises(ValueError):
            solve_riccati(VASICEK_BOX, StateSpace.REAL_LINE, -1.0)

    def test_halving_tol_improves_accuracy(self):
        # Lift the dense-output step cap so accuracy is tolerance-driven.
        expected = vasicek_psi(1.0)
        errors = []
        for tol in (1e-4, 1e-6, 1e-8):
            sol = solve_riccati(
                VASICEK_BOX, StateSpace.REAL_LINE, 1.0, tol=tol, max_step=1.0
            )
            errors.append(abs(sol.psi(1.0) - expected))
        assert errors[0] > errors[1] > errors[2]

    def test_psi_nonpositive_for_zero_u(self, vasicek_sol, cir_sol):
        for sol in (vasicek_sol, cir_sol):
            assert np.all(sol.psi_values <= 0.0)
            samples = np.linspace(0.0, 1.0, 257)
            assert np.all(sol.psi(samples) <= 1e-15)


class TestUpperBondPrice:
    def test_zero_maturity_is_one(self, vasicek_sol):
        assert upper_bond_price(vasicek_sol, 0.7, 0.7, 0.123) == 1.0

    def test_zero_box_deterministic_intensity(self):
        sol = solve_riccati(ZERO_BOX, StateSpace.REAL_LINE, 1.0, tol=1e-9)
        price = upper_bond_price(sol, 0.0, 1.0, 0.02)
        assert price == pytest.approx(np.exp(-0.02), rel=1e-12)

    def test_vasicek_derived_value(self, vasicek_sol):
        price = upper_bond_price(vasicek_sol, 0.0, 1.0, 0.05)
        expected = np.exp(vasicek_phi(1.0) + vasicek_psi(1.0) * 0.05)
        assert expected == pytest.approx(0.9430269799465489)
        assert price == pytest.approx(expected, rel=1e-8)

    def test_requires_zero_u(self):
        sol = solve_riccati(VASICEK_BOX, StateSpace.REAL_LINE, 1.0, u=-1.0)
        with pytest.raises(ValueError):
            upper_bond_price(sol, 0.0, 1.0, 0.05)

    def test_out_of_range_maturity(self, vasicek_sol):
        with pytest.raises(OutOfRangeError):
            upper_bond_price(vasicek_sol, 0.0, 1.5, 0.05)
        with pytest.raises(OutOfRangeError):
            upper_bond_price(vasicek_sol, 0.5, 0.4, 0.05)

    def test_state_space_enforced(self, cir_sol):
        with pytest.raises(OutOfRangeError):
            upper_bond_price(cir_sol, 0.0, 1.0, -0.1)

    def test_monotone_in_maturity(self, vasicek_sol, cir_sol):
        for sol, x in ((vasicek_sol, 0.05), (cir_sol, 0.05)):
            taus = np.linspace(0.0, 1.0, 41)
            prices = [upper_bond_price(sol, 0.0, t, x) for t in taus]
            assert np.all(np.diff(prices) <= 1e-12)

    def test_monotone_in_state(self, vasicek_sol):
        xs = np.linspace(0.0, 0.2, 21)
        prices = [upper_bond_price(vasicek_sol, 0.0, 1.0, x) for x in xs]
        assert np.all(np.diff(prices) < 0.0)

    def test_dominates_corner_models(self):
        # Volatility-uncertainty box: corner Riccati prices never exceed
        # the upper price on a (maturity, state) lattice.
        box = ParameterBox(0.04, 0.04, -0.3, -0.3, 0.005, 0.02, 0.0, 0.0)
        upper = solve_riccati(box, StateSpace.REAL_LINE, 1.0, tol=1e-9)
        from robust_affine import corner_grid

        for theta in corner_grid(box, 3):
            corner_box = ParameterBox.degenerate(theta.b0, theta.b1, theta.a0, theta.a1)
            corner_sol = solve_riccati(corner_box, StateSpace.REAL_LINE, 1.0, tol=1e-9)
            for tau in (0.25, 0.5, 1.0):
                for x in (0.0, 0.05, 0.15):
                    assert upper_bond_price(corner_sol, 0.0, tau, x) <= (
                        upper_bond_price(upper, 0.0, tau, x) + 1e-10
                    )


class TestLongevityValuePath:
    def test_zero_intensity_with_zero_box(self):
        sol = solve_riccati(ZERO_BOX, StateSpace.REAL_LINE, 1.0, tol=1e-9)
        times = np.linspace(0.0, 1.0, 11)
        mu = np.zeros(11)
        values = longevity_value_path(times, mu, sol, 1.0)
        # psi(tau)*0 kills the state term but phi is identically zero too.
        np.testing.assert_allclose(values, 1.0, rtol=1e-12)

    def test_constant_intensity_is_flat(self):
        sol = solve_riccati(ZERO_BOX, StateSpace.REAL_LINE, 1.0, tol=1e-9)
        times = np.array([0.0, 0.5, 1.0])
        mu = np.full(3, 0.02)
        values = longevity_value_path(times, mu, sol, 1.0)
        # At r: exp(-0.02 r) * exp(-(1 - r) * 0.02) = exp(-0.02) for all r.
        np.testing.assert_allclose(values, np.exp(-0.02), rtol=1e-12)

    def test_three_point_hand_path(self, vasicek_sol):
        times = np.array([0.0, 0.5, 1.0])
        mu = np.array([0.01, 0.02, 0.03])
        values = longevity_value_path(times, mu, vasicek_sol, 1.0)
        y0 = np.exp(vasicek_phi(1.0) + vasicek_psi(1.0) * 0.01)
        gamma_half = 0.5 * 0.5 * (0.01 + 0.02)
        y_half = np.exp(-gamma_half) * np.exp(vasicek_phi(0.5) + vasicek_psi(0.5) * 0.02)
        gamma_full = gamma_half + 0.5 * 0.5 * (0.02 + 0.03)
        y_full = np.exp(-gamma_full)
        np.testing.assert_allclose(values, [y0, y_half, y_full], rtol=1e-7)

    def test_terminal_value_is_survivor_index(self, vasicek_sol):
        times = np.linspace(0.0, 1.0, 101)
        rng = np.random.default_rng(3)
        mu = 0.02 + 0.01 * rng.standard_normal((5, 101)).cumsum(axis=1) * 0.05
        values = longevity_value_path(times, mu, vasicek_sol, 1.0)
        dt = times[1] - times[0]
        gamma_T = np.sum(0.5 * dt * (mu[:, 1:] + mu[:, :-1]), axis=1)
        np.testing.assert_allclose(values[:, -1], np.exp(-gamma_T), rtol=1e-10)

    def test_grid_past_maturity_rejected(self, vasicek_sol):
        times = np.array([0.0, 0.6, 1.2])
        with pytest.raises(GridMismatchError):
            longevity_value_path(times, np.zeros(3), vasicek_sol, 1.0)

    def test_matrix_and_row_agree(self, vasicek_sol):
        times = np.linspace(0.0, 1.0, 21)
        rng = np.random.default_rng(11)
        mu = np.abs(0.02 + 0.005 * rng.standard_normal((4, 21)))
        stacked = longevity_value_path(times, mu, vasicek_sol, 1.0)
        for i in range(4):
            row = longevity_value_path(times, mu[i], vasicek_sol, 1.0)
            np.testing.assert_array_equal(stacked[i], row)
