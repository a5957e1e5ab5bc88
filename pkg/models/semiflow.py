"""
Lagrangian solution of the load-dependent transport problem

All particles move with the same speed, so every trajectory is a translate of the characteristic curve xi:
X(t; r, x) = x + xi(t) - xi(r). The state at time t is the pushforward of the initial measure by X(t; 0, .)
plus the pushforward of the influx by s -> X(t; s, 0), restricted to [0, 1).
"""

from typing import TYPE_CHECKING, List, NamedTuple, Optional

import numpy as np

import config
from models.curve import CharCurve
from models.measure import Measure, PiecewiseDensity
from utils.grid import merge_nodes

if TYPE_CHECKING:
    from datasets.scenario import Scenario

RHO0 = "rho0"
MU = "mu"


def pushed_influx(mu: Measure, curve: CharCurve, t) -> Measure:
    """Influx entered during (0, t], transported to time t and restricted to [0, 1)"""
    xi_t = curve(t)
    tj = mu.atom_positions
    inside = tj <= t
    positions = np.maximum(xi_t - curve(tj[inside]), 0.)
    masses = mu.atom_masses[inside]
    keep = positions < 1. - config.POSITION_TOL
    atoms = zip(positions[keep], masses[keep])

    density = None
    upper = min(t, mu.upper)
    if upper > 0 and mu.ac_total() > 0:
        bp, values = mu.density.breakpoints, mu.density.values
        nodes = merge_nodes(bp, curve.node_times, lower=0., upper=upper)
        s0, s1 = nodes[:-1], nodes[1:]
        cell = np.clip(np.searchsorted(bp, 0.5 * (s0 + s1), side="right") - 1, 0, values.size - 1)
        u = values[cell]
        keep = u > 0
        s0, s1, u = s0[keep], s1[keep], u[keep]
        # each [s0, s1] sits inside one linear piece of xi, so the image density is u / slope exactly
        x0, x1 = xi_t - curve(s1), xi_t - curve(s0)
        slope = (x1 - x0) / (s1 - s0)
        density = PiecewiseDensity.from_cells(0., 1., x0, x1, u / slope)
    return Measure(config.SPACE, 1.0, density, atoms)


def pushforward(rho0: Measure, mu: Measure, curve: CharCurve, t) -> Measure:
    """State at time t started from rho0 with influx mu, both transported along curve"""
    transported = rho0.translate_restrict(curve(t), exit_tol=config.POSITION_TOL)
    return transported + pushed_influx(mu, curve, t)


class ExitRecord(NamedTuple):
    source: str
    index: int
    position: float
    entry_time: float
    exit_time: Optional[float]
    mass: float

    @property
    def exited(self):
        return self.exit_time is not None


class ExitLedger(object):
    """One record per atom of the initial measure and of the influx"""

    def __init__(self, records: List[ExitRecord]):
        self.records = list(records)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, item):
        return self.records[item]

    def exit_times(self, source=None):
        return [r.exit_time for r in self.records if source is None or r.source == source]

    def to_rows(self):
        return [[r.source, r.index, r.position, r.entry_time,
                 np.nan if r.exit_time is None else r.exit_time, r.mass] for r in self.records]


class Solution(object):
    def __init__(self, scenario: "Scenario", curve: CharCurve, trace=None, solver="contraction"):
        if curve.horizon < scenario.horizon - 1e-12:
            raise ValueError("curve ends at %g before the horizon %g" % (curve.horizon, scenario.horizon))
        self.scenario = scenario
        self.curve = curve
        self.trace = trace
        self.solver = solver

    @property
    def horizon(self):
        return self.scenario.horizon

    @property
    def rho0(self):
        return self.scenario.rho0

    @property
    def mu(self):
        return self.scenario.mu

    def _check_time(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0) or np.any(t_arr > self.horizon * (1 + 1e-12)):
            raise ValueError("time must lie in [0, %g], got %s" % (self.horizon, t))

    def flow(self, t, r, x):
        """X(t; r, x) = x + xi(t) - xi(r)"""
        if not 0 <= r <= t <= self.horizon * (1 + 1e-12):
            raise ValueError("flow needs 0 <= r <= t <= T, got r=%g t=%g" % (r, t))
        if x < 0:
            raise ValueError("flow needs x >= 0, got %g" % x)
        return x + self.curve(t) - self.curve(r)

    def _atom_load(self, t):
        """Mass and count of atoms still inside at times t (1-d array)"""
        xi_t = self.curve(t)[:, None]
        rho_in = self.rho0.atom_positions[None, :] + xi_t < 1. - config.POSITION_TOL
        tj = self.mu.atom_positions
        mu_in = (tj[None, :] <= t[:, None]) & (xi_t - self.curve(tj)[None, :] < 1. - config.POSITION_TOL)
        mass = rho_in @ self.rho0.atom_masses + mu_in @ self.mu.atom_masses
        return mass, rho_in.sum(axis=1) + mu_in.sum(axis=1)

    def load(self, t):
        """W(t) = mu((max{0, xi^-1(xi(t) - 1)}, t]) + rho0([0, 1 - xi(t)))"""
        self._check_time(t)
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        xi_t = self.curve(t_arr)
        s_star = np.zeros_like(t_arr)
        old = xi_t >= 1.
        if np.any(old):
            s_star[old] = self.curve.inverse(np.minimum(xi_t[old] - 1., self.curve.end_value))
        ac = self.rho0.density.cdf(1. - xi_t) + np.maximum(self.mu.density.cdf(t_arr) - self.mu.density.cdf(s_star), 0.)
        atoms, _ = self._atom_load(t_arr)
        result = ac + atoms
        return float(result[0]) if np.ndim(t) == 0 else result

    def atoms_inside(self, t):
        self._check_time(t)
        _, count = self._atom_load(np.atleast_1d(np.asarray(t, dtype=float)))
        return int(count[0]) if np.ndim(t) == 0 else count

    def state_at(self, t) -> Measure:
        self._check_time(t)
        return pushforward(self.rho0, self.mu, self.curve, min(t, self.curve.horizon))

    def cumulative_outflux(self, t):
        """Y(t): mass that has left through x = 1 by time t"""
        self._check_time(t)
        return self.rho0.total_mass() + self.mu.mass_upto(t) - self.load(t)

    def _exit_time(self, target):
        end = self.curve(self.horizon)
        if target > end + config.POSITION_TOL:
            return None
        return min(self.curve.inverse(min(target, end)), self.horizon)

    def exit_times(self) -> ExitLedger:
        records = []
        order = np.argsort(-self.rho0.atom_positions, kind="stable")
        for rank, i in enumerate(order):
            x = float(self.rho0.atom_positions[i])
            records.append(ExitRecord(RHO0, rank, x, 0., self._exit_time(1. - x), float(self.rho0.atom_masses[i])))
        for j, (tj, m) in enumerate(zip(self.mu.atom_positions, self.mu.atom_masses)):
            records.append(ExitRecord(MU, j, 0., float(tj), self._exit_time(self.curve(tj) + 1.), float(m)))
        return ExitLedger(records)

    def __repr__(self):
        return "Solution(%s, %r)" % (self.solver, self.curve)


def exit_times(sol: Solution) -> ExitLedger:
    return sol.exit_times()
