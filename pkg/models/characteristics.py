"""
Characteristic curve by contraction mapping

On a short window the curve is the fixed point of

    F(eta)(t) = int_0^t alpha(rho([0, 1 - eta(s))) + mu((0, s])) ds

over strictly increasing eta with slopes in [v_min, 1]. Windows are short enough that the absolutely
continuous mass swept in one window is below v_min / (4L), and large atoms of rho are moved to x = 0 so
they cannot jump the load inside the window. A window is cut short when the large atom nearest to the exit
leaves; the next window restarts from the pushed-forward state.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, List, NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq

import config
from models.curve import CharCurve
from models.measure import Measure, PiecewiseDensity, classify_large_atoms
from models.semiflow import Solution, pushforward
from models.velocity import VelocityLaw
from utils.grid import merge_nodes, midpoints, uniform_nodes

if TYPE_CHECKING:
    from datasets.scenario import Scenario

logger = logging.getLogger(__name__)

# a window ending this close (relative) to T ends the run
END_TOL = 1e-12


class ConvergenceError(RuntimeError):
    def __init__(self, iterations, defect):
        super(ConvergenceError, self).__init__(
            "fixed-point iteration did not converge after %d iterations, last defect %.3e" % (iterations, defect))
        self.iterations = iterations
        self.defect = defect


class WindowLimitError(RuntimeError):
    pass


@dataclass
class SolverConfig:
    fixpoint_tol: float = 1e-10
    max_iter: int = 60
    dt_max: float = 1e-3
    window_margin: float = 1e-9

    def __post_init__(self):
        for name in ("fixpoint_tol", "max_iter", "dt_max", "window_margin"):
            if not getattr(self, name) > 0:
                raise ValueError("solver.%s must be positive, got %s" % (name, getattr(self, name)))

    @classmethod
    def from_options(cls, solver_options):
        return cls(fixpoint_tol=float(solver_options.fixpoint_tol), max_iter=int(solver_options.max_iter),
                   dt_max=float(solver_options.dt_max), window_margin=float(solver_options.window_margin))

    def refined(self, level):
        return SolverConfig(self.fixpoint_tol, self.max_iter, self.dt_max / 2 ** level, self.window_margin)

    def to_dict(self):
        return {"fixpoint_tol": self.fixpoint_tol, "max_iter": self.max_iter,
                "dt_max": self.dt_max, "window_margin": self.window_margin}


class ExitEvent(NamedTuple):
    position: float
    mass: float
    time: float


class WindowResult(NamedTuple):
    xi_window: CharCurve
    tau: float
    exit_event: Optional[ExitEvent]
    t00: float
    defects: List[float]
    large_rho: int
    large_mu: int


@dataclass
class WindowRecord:
    start: float
    tau: float
    t00: float
    v_min: float
    defects: List[float]
    exit_event: Optional[ExitEvent]


@dataclass
class SolverTrace:
    windows: List[WindowRecord] = field(default_factory=list)
    window_cap: int = 0

    @property
    def exit_events(self):
        """(global exit time, position at window start, mass) for every window cut short by a large atom"""
        return [(w.start + w.exit_event.time, w.exit_event.position, w.exit_event.mass)
                for w in self.windows if w.exit_event is not None]

    def all_ratios(self):
        return [r for w in self.windows for r in contraction_ratios(w.defects)]


def contraction_ratios(defects, floor=config.DEFECT_FLOOR):
    """Ratios of successive fixed-point defects, skipping the first step and anything at roundoff level"""
    ratios = []
    for k in range(1, len(defects) - 1):
        if defects[k] > floor and defects[k + 1] > floor:
            ratios.append(defects[k + 1] / defects[k])
    return ratios


def _root_of_window_mass(window_max, threshold, span):
    """Smallest h with window_max(h) = threshold; inf when even the whole span stays below it"""
    if window_max(span) < threshold:
        return math.inf
    return brentq(lambda h: window_max(h) - threshold, 0., span, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def window_length(rho0: Measure, mu_shifted: Measure, v_min, lipschitz, remaining, window_margin=1e-9):
    """Largest admissible window: every space interval shorter than it, and every time interval shorter than
    it divided by v_min, carries absolutely continuous mass below v_min / (4L). Atoms never constrain it.

    Only influx arriving before the window could end is looked at.
    """
    if not (v_min > 0 and lipschitz > 0):
        raise ValueError("v_min and L must be positive")
    threshold = v_min / (4. * lipschitz)
    h_space = _root_of_window_mass(rho0.density.window_max, threshold, 1.)
    reach = min(remaining, 1. - window_margin, h_space, mu_shifted.upper)
    bp = mu_shifted.density.breakpoints
    reachable = PiecewiseDensity.from_cells(0., reach, bp[:-1], bp[1:], mu_shifted.density.values)
    h_time = v_min * _root_of_window_mass(reachable.window_max, threshold, reach)
    return min(remaining, 1. - window_margin, h_space, h_time)


def crossing_times(eta: CharCurve, positions):
    """Times s with 1 - eta(s) = x for the given atom positions, where eta reaches them"""
    targets = 1. - np.asarray(positions, dtype=float)
    targets = targets[(targets > 0) & (targets < eta.end_value)]
    return eta.inverse(targets) if targets.size else np.zeros(0)


def apply_F(eta: CharCurve, rho0_mod: Measure, mu_window: Measure, law: VelocityLaw, base_nodes=None):
    """One application of F on the window [0, eta.horizon]

    Composite midpoint on base_nodes refined at every time 1 - eta crosses an atom of rho0_mod and every
    atom time of mu_window, so the integrand never jumps inside a cell.
    """
    tau = eta.horizon
    if base_nodes is None:
        base_nodes = eta.node_times
    nodes = merge_nodes(base_nodes, mu_window.atom_positions, crossing_times(eta, rho0_mod.atom_positions),
                        lower=0., upper=tau)
    mids = midpoints(nodes)
    load = rho0_mod.mass_below(1. - eta(mids)) + mu_window.mass_upto(mids)
    values = np.concatenate(([0.], np.cumsum(law.speed(load) * np.diff(nodes))))
    return CharCurve(nodes, values, eta.v_min, check=False)


def _relocate_large(rho: Measure, large_atoms):
    """Large atoms moved to x = 0, everything else untouched"""
    large_positions = {a.position for a in large_atoms}
    atoms = [(0. if x in large_positions else x, m) for x, m in rho.atoms]
    return rho.with_atoms(atoms)


def solve_window(rho_i: Measure, mu_i: Measure, law: VelocityLaw, cfg: SolverConfig, remaining=math.inf,
                 v_min=None) -> WindowResult:
    if v_min is None:
        v_min = law.v_min(rho_i.total_mass(), mu_i.total_mass())
    threshold = law.large_mass_threshold(v_min)
    large = classify_large_atoms(rho_i, mu_i, threshold)
    t00 = window_length(rho_i, mu_i, v_min, law.lipschitz, remaining, cfg.window_margin)
    rho_mod = _relocate_large(rho_i, large.rho)

    base = merge_nodes(uniform_nodes(0., t00, cfg.dt_max), mu_i.atom_positions, lower=0., upper=t00)
    eta = CharCurve.straight(v_min, base, v_min)
    defects = []
    for it in range(cfg.max_iter):
        new_eta = apply_F(eta, rho_mod, mu_i, law, base)
        defect = new_eta.sup_distance(eta)
        defects.append(defect)
        eta = new_eta
        if defect < cfg.fixpoint_tol:
            break
    else:
        raise ConvergenceError(cfg.max_iter, defects[-1])
    logger.debug("window of length %.6g converged in %d iterations, defect %.3e", t00, len(defects), defects[-1])

    eta = eta.with_v_min(v_min)
    exit_event = None
    tau = t00
    if large.rho:
        nearest = large.rho[0]
        target = 1. - nearest.position
        if eta.end_value >= target - config.POSITION_TOL:
            tau = min(eta.inverse(min(target, eta.end_value)), t00)
            exit_event = ExitEvent(nearest.position, nearest.mass, tau)
            if tau < t00:
                eta = eta.truncated(tau)
    return WindowResult(eta, tau, exit_event, t00, defects, len(large.rho), len(large.mu))


def _window_cap(scenario: "Scenario", cfg: SolverConfig):
    """Safety cap on the number of windows

    Window lengths are bounded from below by the first-window data with the mass threshold halved, taken over
    the whole influx: the state density is the sum of a translated initial part and an influx part whose
    slopes are at least v_min. Every atom can cut at most one window short.
    """
    law = scenario.law
    v_min = law.v_min(scenario.rho0.total_mass(), scenario.mu.total_mass())
    threshold = v_min / (8. * law.lipschitz)
    h_space = _root_of_window_mass(scenario.rho0.density.window_max, threshold, 1.)
    h_time = v_min * _root_of_window_mass(scenario.mu.density.window_max, threshold, scenario.horizon)
    t00 = min(scenario.horizon, 1. - cfg.window_margin, h_space, h_time)
    n_atoms = scenario.rho0.atom_positions.size + scenario.mu.atom_positions.size
    return int(math.ceil(scenario.horizon / t00)) + n_atoms + config.WINDOW_CAP_SLACK


def solve_global_traced(scenario: "Scenario", cfg: SolverConfig = None):
    cfg = scenario.solver if cfg is None else cfg
    law, horizon = scenario.law, scenario.horizon
    v_min = law.v_min(scenario.rho0.total_mass(), scenario.mu.total_mass())
    trace = SolverTrace(window_cap=_window_cap(scenario, cfg))

    curve = CharCurve([0.], [0.], v_min)
    rho, mu = scenario.rho0, scenario.mu
    t = 0.
    while t < horizon:
        if len(trace.windows) >= trace.window_cap:
            raise WindowLimitError("more than %d windows before reaching T=%g (stuck at t=%.17g)"
                                   % (trace.window_cap, horizon, t))
        remaining = horizon - t
        result = solve_window(rho, mu, law, cfg, remaining)
        trace.windows.append(WindowRecord(t, result.tau, result.t00, result.xi_window.v_min, result.defects,
                                          result.exit_event))
        curve = curve.extended(result.xi_window, t)
        if result.exit_event is not None:
            logger.info("large atom of mass %.6g leaves at t=%.17g", result.exit_event.mass, t + result.tau)
        if remaining - result.tau <= END_TOL * max(1., horizon):
            break
        rho = pushforward(rho, mu, result.xi_window, result.tau)
        mu = mu.time_shift(result.tau)
        t = curve.horizon

    # the last window ends on T up to roundoff in the accumulated window starts
    times, values = curve.node_times.copy(), curve.node_values.copy()
    values[-1] += curve.slopes()[-1] * (horizon - times[-1])
    times[-1] = horizon
    curve = CharCurve(times, values, v_min, check=False)
    logger.debug("characteristic curve built from %d windows", len(trace.windows))
    return curve, trace


def solve_global(scenario: "Scenario", cfg: SolverConfig = None) -> CharCurve:
    curve, _ = solve_global_traced(scenario, cfg)
    return curve


def solve(scenario: "Scenario", cfg: SolverConfig = None) -> Solution:
    curve, trace = solve_global_traced(scenario, cfg)
    return Solution(scenario, curve, trace=trace, solver="contraction")
