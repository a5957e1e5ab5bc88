import math

import numpy as np
import pytest

from datasets.registry import build_registry, random_examples, random_scenario


def _examples():
    return {example.name: example for example in build_registry()}


def test_registry_names():
    names = [example.name for example in build_registry()]
    assert names == ["delta0", "delta1", "lebesgue", "two-atom", "psi-atoms", "phi-initial"]
    assert len(set(names)) == len(names)


@pytest.mark.parametrize("name", ["delta0", "delta1", "two-atom", "psi-atoms", "phi-initial"])
def test_example_checks_pass(name, worked_solutions):
    example = _examples()[name]
    sol = worked_solutions.get(name)
    if sol is None:
        from models.characteristics import solve

        sol = solve(example.scenario)
    for check in example.checks:
        value, ok = check.evaluate(sol)
        assert ok, (check.name, value, check.expected)


def test_lebesgue_checks_pass(lebesgue_solution):
    for check in _examples()["lebesgue"].checks:
        value, ok = check.evaluate(lebesgue_solution)
        assert ok, (check.name, value, check.expected)


def test_check_names_fit_in_a_csv_field():
    for example in build_registry():
        for check in example.checks:
            assert "," not in check.name


def test_random_scenarios_respect_the_limits():
    rng = np.random.default_rng(0)
    for _ in range(50):
        scenario = random_scenario(rng)
        assert scenario.rho0.atom_positions.size + scenario.mu.atom_positions.size <= 10
        assert scenario.rho0.total_mass() + scenario.mu.total_mass() <= 5. + 1e-9
        assert scenario.horizon == 2.


def test_random_examples_are_seeded():
    first, second = random_examples(3, seed=11), random_examples(3, seed=11)
    for a, b in zip(first, second):
        assert a.scenario.rho0.allclose(b.scenario.rho0)
        assert a.scenario.mu.allclose(b.scenario.mu)
    assert [e.name for e in first] == ["random-0", "random-1", "random-2"]
    assert not math.isnan(first[0].checks[0].tol)
