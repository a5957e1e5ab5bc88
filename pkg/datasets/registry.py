"""
Built-in worked examples with their known answers
"""

import math
from typing import Callable, List, NamedTuple

import numpy as np

from datasets.scenario import Scenario
from models.characteristics import SolverConfig, solve
from models.eventdriven import solve_oracle
from models.losses.flat import MetricConfig, WeightKind, weighted_flat_distance
from models.measure import Measure
from models.semiflow import Solution
from models.velocity import reciprocal


class Check(NamedTuple):
    name: str
    compute: Callable[[Solution], float]
    expected: float
    tol: float

    def evaluate(self, sol: Solution):
        value = float(self.compute(sol))
        return value, abs(value - self.expected) <= self.tol


class Example(NamedTuple):
    name: str
    scenario: Scenario
    checks: List[Check]
    description: str = ""


def delta0_scenario(solver=None, metric=None):
    return Scenario(Measure.space(atoms=[(0., 1.)]), Measure.time(3.), reciprocal(), 3.,
                    solver or SolverConfig(), metric or MetricConfig(), "delta0")


def delta1_scenario(solver=None, metric=None):
    return Scenario(Measure.space(), Measure.time(4., atoms=[(1., 1.)]), reciprocal(), 4.,
                    solver or SolverConfig(), metric or MetricConfig(), "delta1")


def lebesgue_scenario(solver=None, metric=None):
    return Scenario(Measure.space(density=[(0., 1., 1.)]), Measure.time(3.), reciprocal(), 3.,
                    solver or SolverConfig(), metric or MetricConfig(), "lebesgue")


def two_atom_scenario(solver=None, metric=None):
    return Scenario(Measure.space(atoms=[(0.25, 1.), (0.75, 1.)]), Measure.time(3.), reciprocal(), 3.,
                    solver or SolverConfig(), metric or MetricConfig(), "two-atom")


def empty_scenario(horizon=2., solver=None, metric=None):
    return Scenario(Measure.space(), Measure.time(horizon), reciprocal(), horizon,
                    solver or SolverConfig(), metric or MetricConfig(), "empty")


def lebesgue_xi(t):
    """xi' = 1 / (2 - xi), xi(0) = 0, while mass is left (t <= 3/2)"""
    return 2. - math.sqrt(4. - 2. * t) if t <= 1.5 else 1. + (t - 1.5)


def psi_atoms_value(big_m, m, a, b):
    """psi(m delta_b - M delta_a) for M >= m >= 1, a <= b < 1/2"""
    return big_m * (1 - a) - m * (1 - b) + m * (1 - b) * (b - a)


PSI_ATOM_CASES = [(1.2, 1., 0.1, 0.3), (2., 1., 0., 0.4), (1., 1., 0.2, 0.25)]


def _single_atom(sol, t):
    state = sol.state_at(t)
    if state.atom_positions.size != 1 or state.ac_total() > 0:
        return math.nan
    return float(state.atom_positions[0])


def _exit_time(source, index):
    def compute(sol):
        record = [r for r in sol.exit_times() if r.source == source][index]
        return math.nan if record.exit_time is None else record.exit_time
    return compute


def _distance_to_state(t, s, weight):
    def compute(sol):
        return weighted_flat_distance(sol.state_at(t), sol.state_at(s), weight, sol.scenario.metric)
    return compute


def _psi_check(big_m, m, a, b):
    def compute(sol):
        return weighted_flat_distance(Measure.space(atoms=[(b, m)]), Measure.space(atoms=[(a, big_m)]),
                                      WeightKind.ONE_MINUS_X, sol.scenario.metric)
    return Check("psi(%g d_%g - %g d_%g)" % (m, b, big_m, a), compute, psi_atoms_value(big_m, m, a, b), 1e-4)


def _lebesgue_sup_error(sol):
    times = [1.5 * k / 300 for k in range(301)]
    return max(abs(sol.curve(t) - lebesgue_xi(t)) for t in times)


def _phi_after_perturbation(x0, horizon):
    """phi distance at T between the solutions from 0 and from a unit atom at x0"""
    def compute(sol):
        scenario = sol.scenario
        perturbed = scenario.with_initial(Measure.space(atoms=[(x0, 1.)]), name="phi-initial-perturbed")
        zero = scenario.with_initial(Measure.space(), name="phi-initial-zero")
        return weighted_flat_distance(solve(perturbed).state_at(horizon), solve(zero).state_at(horizon),
                                      WeightKind.HAT, scenario.metric)
    return compute


def build_registry(solver=None, metric=None) -> List[Example]:
    examples = []

    checks = [
        Check("atom position at t=1", lambda sol: _single_atom(sol, 1.), 0.5, 1e-9),
        Check("W(1)", lambda sol: sol.load(1.), 1., 1e-12),
        Check("W(2)", lambda sol: sol.load(2.), 0., 1e-12),
        Check("Y(2)", lambda sol: sol.cumulative_outflux(2.), 1., 1e-12),
        Check("exit time", _exit_time("rho0", 0), 2., 1e-6),
    ]
    for t in (0.5, 1., 1.5):
        checks.append(Check("phi(rho_%g - rho_2)" % t, _distance_to_state(t, 2., WeightKind.HAT),
                            0.5 - abs(0.5 - t / 2.), 1e-3))
    for t in (1.5, 1.9, 1.99):
        checks.append(Check("flat(rho_%g - rho_2)" % t, _distance_to_state(t, 2., WeightKind.UNIT), 1., 1e-3))
    examples.append(Example("delta0", delta0_scenario(solver, metric), checks, "unit atom at x=0"))

    checks = [Check("atom position at t=%g" % t, lambda sol, t=t: _single_atom(sol, t), (t - 1.) / 2., 1e-6)
              for t in (1.5, 2., 2.9)]
    checks.append(Check("exit time", _exit_time("mu", 0), 3., 1e-6))
    examples.append(Example("delta1", delta1_scenario(solver, metric), checks, "unit atom entering at t=1"))

    checks = [
        Check("sup |xi - (2 - sqrt(4 - 2t))| up to t=1.5", _lebesgue_sup_error, 0., 1e-5),
        Check("W(1)", lambda sol: sol.load(1.), math.sqrt(2.) - 1., 1e-5),
        Check("Y(1)", lambda sol: sol.cumulative_outflux(1.), 2. - math.sqrt(2.), 1e-5),
    ]
    examples.append(Example("lebesgue", lebesgue_scenario(solver, metric), checks, "density 1 on [0, 1)"))

    checks = [
        Check("first exit", _exit_time("rho0", 0), 0.75, 1e-6),
        Check("second exit", _exit_time("rho0", 1), 1.75, 1e-6),
        Check("restarts", lambda sol: len(sol.trace.exit_events), 2., 0.),
    ]
    examples.append(Example("two-atom", two_atom_scenario(solver, metric), checks, "unit atoms at 0.25 and 0.75"))

    checks = [_psi_check(*case) for case in PSI_ATOM_CASES]
    examples.append(Example("psi-atoms", empty_scenario(1., solver, metric), checks, "psi between two atoms"))

    x0, horizon = 0.05, 0.8
    checks = [Check("phi(rho_T) from an atom at %g" % x0, _phi_after_perturbation(x0, horizon),
                    x0 + horizon / 2., 1e-6)]
    examples.append(Example("phi-initial", empty_scenario(horizon, solver, metric), checks,
                            "phi is not continuous in the initial data"))
    return examples


def random_scenario(rng: np.random.Generator, horizon=2., max_atoms=10, max_cells=4, max_mass=5.,
                    solver=None, metric=None, name="random"):
    """Random atoms and density cells split between rho0 and mu, total mass at most max_mass"""
    n_atoms = int(rng.integers(0, max_atoms + 1))
    n_cells = int(rng.integers(0, max_cells + 1))
    weights = rng.random(n_atoms + n_cells)
    masses = weights / max(weights.sum(), 1.) * rng.uniform(0., max_mass) if weights.size else weights
    in_space = rng.random(n_atoms + n_cells) < 0.5

    rho_atoms, mu_atoms, rho_cells, mu_cells = [], [], [], []
    for k in range(n_atoms):
        if in_space[k]:
            rho_atoms.append((float(rng.uniform(0., 1.)), float(masses[k])))
        else:
            mu_atoms.append((float(rng.uniform(0., horizon)) or horizon, float(masses[k])))
    for k in range(n_atoms, n_atoms + n_cells):
        upper = 1. if in_space[k] else horizon
        a, b = np.sort(rng.uniform(0., upper, 2))
        if b - a < 1e-3:
            continue
        cell = (float(a), float(b), float(masses[k] / (b - a)))
        (rho_cells if in_space[k] else mu_cells).append(cell)
    return Scenario(Measure.space(density=rho_cells, atoms=rho_atoms),
                    Measure.time(horizon, density=mu_cells, atoms=mu_atoms), reciprocal(), horizon,
                    solver or SolverConfig(), metric or MetricConfig(), name)


def _oracle_gap(sol):
    return sol.curve.sup_distance(solve_oracle(sol.scenario).curve)


def random_examples(count, seed=0, solver=None, metric=None) -> List[Example]:
    """Contraction solver against the event-driven integrator on seeded random scenarios"""
    rng = np.random.default_rng(seed)
    solver = solver or SolverConfig()
    examples = []
    for k in range(count):
        scenario = random_scenario(rng, solver=solver, metric=metric, name="random-%d" % k)
        checks = [Check("sup |xi - xi_oracle|", _oracle_gap, 0., 10. * solver.dt_max)]
        examples.append(Example(scenario.name, scenario, checks, "seed %d" % seed))
    return examples
