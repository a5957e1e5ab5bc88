import math

import numpy as np
import pytest

import config
from datasets.registry import delta0_scenario, delta1_scenario
from models.characteristics import SolverConfig, solve
from models.curve import CharCurve
from models.eventdriven import solve_oracle
from models.measure import Measure
from models.semiflow import Solution
from models.weak_form import (
    BumpSpec,
    ConvergenceReport,
    fitted_order,
    residual_convergence,
    residual_terms,
    separable_family,
    separable_test,
    transported_family,
    transported_test,
    weak_residual,
    weak_residuals,
)

RESIDUAL_TOL = 1e-4


def test_bump_is_c1_with_compact_support():
    spline = BumpSpec(0.3, 0.5).spline()
    assert spline(0.4) == pytest.approx(1.)
    assert spline(0.3) == pytest.approx(0.)
    assert spline.derivative()(0.5) == pytest.approx(0.)
    with pytest.raises(ValueError):
        BumpSpec(0., 0.5).spline()


def test_separable_pairing_is_exact():
    tf = separable_test((1.,), (1.,))
    assert tf.pair(Measure.space(density=[(0., 1., 1.)]), 0.) == pytest.approx(0.5)
    assert tf.pair(Measure.space(atoms=[(0.25, 2.)]), 0.) == pytest.approx(1.5)
    assert tf.pair(Measure.space(density=[(0., 1., 1.)]), 0., "dx") == pytest.approx(-1.)
    assert tf(0., 1.) == 0.


def test_test_function_algebra():
    f, g = separable_test((1.,), (1.,)), separable_test((0., 1.), (1.,))
    combined = 2. * f - g
    assert combined(0.5, 0.25) == pytest.approx(2. * 0.75 - 0.5 * 0.75)
    assert combined.dt(0.5, 0.25) == pytest.approx(-0.75)


def test_transported_test_is_constant_along_characteristics(delta0_solution):
    tf = transported_test(BumpSpec(0.3, 0.5), 1., delta0_solution.curve)
    assert tf(1., 0.4) == pytest.approx(1.)
    assert tf(0.2, 0.) == pytest.approx(1.)
    assert tf(0., 0.) == 0.
    with pytest.raises(ValueError):
        transported_test(BumpSpec(0.3, 0.5), 5., delta0_solution.curve)


def test_families():
    bumps = transported_family(3., 8)
    assert len(bumps) == 8
    assert bumps[-1].tau == pytest.approx(3.)
    assert all(0 < spec.bump.lower < spec.bump.upper < 1 for spec in bumps)
    assert len(separable_family(3.)) == 4


def test_residual_of_a_unit_atom(delta0_solution):
    terms = residual_terms(delta0_solution, [separable_test((1.,), (1.,), 3.)])[0]
    assert terms.initial == pytest.approx(1.)
    assert terms.terminal == pytest.approx(0.)
    assert terms.transport == pytest.approx(-1., abs=1e-9)
    assert abs(terms.residual) < 1e-9


@pytest.mark.parametrize("name", ["delta0", "delta1", "lebesgue", "two-atom"])
def test_worked_examples_are_weak_solutions(worked_solutions, name):
    sol = worked_solutions[name]
    specs = transported_family(sol.horizon, 8) + separable_family(sol.horizon)
    residuals = weak_residuals(sol, [spec.build(sol) for spec in specs], [spec.tau for spec in specs])
    assert np.max(np.abs(residuals)) < RESIDUAL_TOL


def test_wrong_curve_leaves_a_residual():
    scenario = delta0_scenario()
    wrong = Solution(scenario, CharCurve.straight(1., np.linspace(0., 3., 301), scenario.v_min))
    assert abs(weak_residual(wrong, separable_test((1.,), (1.,), 3.))) > 0.1


def test_influx_enters_the_identity(delta1_solution):
    terms = residual_terms(delta1_solution, [separable_test((0., 1.), (1.,), 4.)])[0]
    assert terms.influx == pytest.approx(1.)
    assert abs(terms.residual) < RESIDUAL_TOL


def test_residual_needs_an_end_time(delta0_solution):
    with pytest.raises(ValueError):
        residual_terms(delta0_solution, [separable_test((1.,), (1.,))])


def test_fitted_order():
    assert fitted_order([1e-3, 5e-4], [4e-6, 1e-6]) == pytest.approx(2.)
    assert math.isinf(fitted_order([1e-3, 5e-4], [1e-6, 1e-14]))
    assert math.isnan(fitted_order([1e-3, 5e-4], [1e-11, 1e-6]))
    report = ConvergenceReport([1e-3, 5e-4], [1e-6, 1e-14], math.inf)
    assert report.exact and report.passed(RESIDUAL_TOL, 0.9)


def test_delta0_transported_residuals_sit_at_the_floor(delta0_solution):
    report = residual_convergence(delta0_solution, transported_family(3., 8), levels=2)
    assert report.exact
    assert max(report.max_residual) <= config.RESIDUAL_FLOOR


def test_delta0_separable_residuals_converge(delta0_solution):
    report = residual_convergence(delta0_solution, separable_family(3.), levels=2)
    assert report.passed(RESIDUAL_TOL, 0.9)


def test_convergence_needs_two_levels(delta0_solution):
    with pytest.raises(ValueError):
        residual_convergence(delta0_solution, separable_family(3.), levels=1)


@pytest.mark.slow
def test_lebesgue_residuals_converge():
    from datasets.registry import lebesgue_scenario

    sol = solve(lebesgue_scenario(SolverConfig(dt_max=1e-3)))
    family = transported_family(3., 8) + separable_family(3.)
    report = residual_convergence(sol, family, levels=3)
    assert report.max_residual[0] < RESIDUAL_TOL
    assert report.order >= 0.9


def test_residual_is_linear_in_the_test_function(delta1_solution):
    f = separable_test((1., -0.25), (1., 2.), 2.)
    g = transported_test(BumpSpec(0.2, 0.6), 2., delta1_solution.curve)
    combined = 3. * f - 0.5 * g
    expected = 3. * weak_residual(delta1_solution, f) - 0.5 * weak_residual(delta1_solution, g)
    assert weak_residual(delta1_solution, combined) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("name", ["delta0", "delta1"])
def test_transported_tests_see_no_transport(worked_solutions, name):
    sol = worked_solutions[name]
    specs = transported_family(sol.horizon, 8)
    for terms in residual_terms(sol, [spec.build(sol) for spec in specs]):
        assert abs(terms.transport) < 1e-8


def test_oracle_and_contraction_residuals_agree(delta1_solution):
    oracle = solve_oracle(delta1_scenario())
    specs = transported_family(4., 8) + separable_family(4.)
    taus = [spec.tau for spec in specs]
    contraction = weak_residuals(delta1_solution, [spec.build(delta1_solution) for spec in specs], taus)
    integrated = weak_residuals(oracle, [spec.build(oracle) for spec in specs], taus)
    assert np.max(np.abs(integrated)) < RESIDUAL_TOL
    assert np.max(np.abs(integrated - contraction)) < RESIDUAL_TOL


@pytest.mark.parametrize("name", ["delta1", "two-atom"])
def test_atom_residuals_converge(worked_solutions, name):
    sol = worked_solutions[name]
    family = transported_family(sol.horizon, 8) + separable_family(sol.horizon)
    report = residual_convergence(sol, family, levels=2)
    assert report.passed(RESIDUAL_TOL, 0.9)
