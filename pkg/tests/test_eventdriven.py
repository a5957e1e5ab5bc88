import numpy as np
import pytest

from datasets.registry import (
    delta0_scenario,
    delta1_scenario,
    lebesgue_scenario,
    lebesgue_xi,
    random_scenario,
    two_atom_scenario,
)
from datasets.scenario import Scenario
from models.characteristics import SolverConfig, solve
from models.eventdriven import solve_eventdriven, solve_oracle
from models.losses.flat import MetricConfig
from models.measure import Measure
from models.velocity import reciprocal

RANDOM_SCENARIOS = 50


def test_delta0_events():
    curve = solve_eventdriven(delta0_scenario())
    assert curve(1.) == pytest.approx(0.5, abs=1e-9)
    assert curve.inverse(1.) == pytest.approx(2., abs=1e-6)
    assert curve(3.) == pytest.approx(2., abs=1e-6)


def test_delta1_events():
    sol = solve_oracle(delta1_scenario())
    assert sol.solver == "eventdriven"
    assert sol.state_at(2.).atom_positions.tolist() == pytest.approx([0.5], abs=1e-6)
    assert sol.exit_times()[0].exit_time == pytest.approx(3., abs=1e-6)


def test_lebesgue_closed_form():
    curve = solve_eventdriven(lebesgue_scenario())
    times = np.linspace(0., 1.5, 151)
    # chords of dt_max on a curve with xi'' <= 1
    assert np.max(np.abs(curve(times) - np.array([lebesgue_xi(t) for t in times]))) < 1e-6


def test_curve_is_sampled_at_dt_max():
    scenario = lebesgue_scenario(SolverConfig(dt_max=2e-3))
    curve = solve_eventdriven(scenario)
    assert np.diff(curve.node_times).max() <= 2e-3 * (1. + 1e-9)
    assert curve.horizon == scenario.horizon


def test_thin_cells_are_not_stepped_over():
    rho0 = Measure.space(density=[(0.4, 0.403, 20.)])
    mu = Measure.time(2., density=[(0.7, 0.702, 30.)])
    scenario = Scenario(rho0, mu, reciprocal(), 2., SolverConfig(), MetricConfig(), "thin-cells")
    gap = solve(scenario).curve.sup_distance(solve_eventdriven(scenario))
    assert gap < 10. * scenario.solver.dt_max


@pytest.mark.parametrize("build", [delta0_scenario, delta1_scenario, two_atom_scenario, lebesgue_scenario])
def test_oracle_agrees_with_contraction(build):
    scenario = build()
    gap = solve(scenario).curve.sup_distance(solve_eventdriven(scenario))
    assert gap < 10. * scenario.solver.dt_max


@pytest.mark.slow
def test_random_scenarios_agree_with_the_oracle():
    rng = np.random.default_rng(2024)
    for k in range(RANDOM_SCENARIOS):
        scenario = random_scenario(rng, name="random-%d" % k)
        gap = solve(scenario).curve.sup_distance(solve_eventdriven(scenario))
        assert gap < 10. * scenario.solver.dt_max, scenario.name
