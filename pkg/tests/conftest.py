import os

import pytest

from datasets.registry import delta0_scenario, delta1_scenario, lebesgue_scenario, two_atom_scenario
from models.characteristics import SolverConfig, solve

SCENARIO_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "experiments", "scenarios")


@pytest.fixture(scope="session")
def scenario_dir():
    return SCENARIO_DIR


@pytest.fixture(scope="session")
def delta0_solution():
    return solve(delta0_scenario())


@pytest.fixture(scope="session")
def delta1_solution():
    return solve(delta1_scenario())


@pytest.fixture(scope="session")
def lebesgue_solution():
    return solve(lebesgue_scenario(SolverConfig(dt_max=1e-4)))


@pytest.fixture(scope="session")
def two_atom_solution():
    return solve(two_atom_scenario())


@pytest.fixture(scope="session")
def worked_solutions(delta0_solution, delta1_solution, lebesgue_solution, two_atom_solution):
    return {
        "delta0": delta0_solution,
        "delta1": delta1_solution,
        "lebesgue": lebesgue_solution,
        "two-atom": two_atom_solution,
    }
