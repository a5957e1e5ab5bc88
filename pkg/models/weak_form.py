"""
Weak-formulation residuals

For a test function phi vanishing at x = 1,

    R = int_(0,tau] int_[0,1) (d_t phi + alpha(W(t)) d_x phi) d rho_t dt + int_(0,tau] phi(t, 0) d mu(t)
        - int phi(tau, .) d rho_tau + int phi(0, .) d rho_0

is zero for a weak solution. Space integrals are exact (atoms pointwise, density cells through an
antiderivative in x); the time integral is composite midpoint on the solver nodes.
"""

import logging
import math
from typing import Callable, List, NamedTuple, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import CubicHermiteSpline

import config
from models.characteristics import solve
from models.curve import CharCurve
from models.eventdriven import solve_oracle
from models.measure import Measure, PiecewiseDensity
from models.semiflow import Solution
from utils.grid import merge_nodes

logger = logging.getLogger(__name__)

TRANSPORTED = "transported-bump"
SEPARABLE = "separable"
COMBINED = "combined"


class BumpSpec(NamedTuple):
    lower: float
    upper: float
    height: float = 1.

    def spline(self):
        if not 0 < self.lower < self.upper < 1:
            raise ValueError("bump support [%g, %g] must sit strictly inside (0, 1)" % (self.lower, self.upper))
        center = 0.5 * (self.lower + self.upper)
        return CubicHermiteSpline([self.lower, center, self.upper], [0., self.height, 0.], [0., 0., 0.])


class TestFunction(object):
    """phi(t, x) with d_t phi, d_x phi and x-antiderivatives of phi and d_t phi, all broadcasting"""

    __test__ = False  # not a pytest class

    def __init__(self, kind, value, dt, dx, value_int, dt_int, tau=None):
        self.kind = kind
        self.value = value
        self.dt = dt
        self.dx = dx
        self.value_int = value_int
        self.dt_int = dt_int
        self.tau = tau

    def __call__(self, t, x):
        return self.value(t, x)

    def pair(self, nu: Measure, t, part="value"):
        """int part(t, x) d nu(x), exact on atoms and on density cells"""
        f = getattr(self, part)
        antiderivative = {"value": self.value_int, "dt": self.dt_int, "dx": self.value}[part]
        total = 0.
        if nu.atom_positions.size:
            total += float(np.sum(nu.atom_masses * f(t, nu.atom_positions)))
        values = nu.density.values
        if np.any(values):
            bp = nu.density.breakpoints
            nonzero = values > 0
            total += float(np.sum(values[nonzero] * (antiderivative(t, bp[1:][nonzero])
                                                     - antiderivative(t, bp[:-1][nonzero]))))
        return total

    def __add__(self, other):
        return _combine(self, other)

    def __mul__(self, scalar):
        scalar = float(scalar)
        return TestFunction(COMBINED, *[_scaled(fn, scalar) for fn in self._parts()], tau=self.tau)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-1.) * other

    def _parts(self):
        return self.value, self.dt, self.dx, self.value_int, self.dt_int


def _scaled(fn, scalar):
    return lambda t, x: scalar * fn(t, x)


def _summed(f, g):
    return lambda t, x: f(t, x) + g(t, x)


def _combine(a: TestFunction, b: TestFunction):
    tau = a.tau if a.tau == b.tau else None
    return TestFunction(COMBINED, *[_summed(f, g) for f, g in zip(a._parts(), b._parts())], tau=tau)


def transported_test(bump: BumpSpec, tau, curve: CharCurve) -> TestFunction:
    """phi(t, x) = phi0(xi(tau) - xi(t) + x): constant along every characteristic, equal to phi0 at t = tau"""
    if not 0 <= tau <= curve.horizon:
        raise ValueError("tau must lie in [0, %g], got %g" % (curve.horizon, tau))
    spline = bump.spline()
    derivative, antiderivative = spline.derivative(), spline.antiderivative()
    lo, hi = bump.lower, bump.upper
    xi_tau = curve(tau)

    def phi0(y):
        y = np.asarray(y, dtype=float)
        return np.where((y > lo) & (y < hi), spline(np.clip(y, lo, hi)), 0.)

    def dphi0(y):
        y = np.asarray(y, dtype=float)
        return np.where((y > lo) & (y < hi), derivative(np.clip(y, lo, hi)), 0.)

    def int_phi0(y):
        return antiderivative(np.clip(np.asarray(y, dtype=float), lo, hi)) - antiderivative(lo)

    def shift(t):
        return xi_tau - curve(t)

    def slope(t):
        return curve.slope_at(t)

    return TestFunction(
        TRANSPORTED,
        value=lambda t, x: phi0(shift(t) + x),
        dt=lambda t, x: -slope(t) * dphi0(shift(t) + x),
        dx=lambda t, x: dphi0(shift(t) + x),
        value_int=lambda t, x: int_phi0(shift(t) + x),
        dt_int=lambda t, x: -slope(t) * phi0(shift(t) + x),
        tau=tau,
    )


def separable_test(p_coeffs: Sequence[float], r_coeffs: Sequence[float], tau=None) -> TestFunction:
    """phi(t, x) = p(t) (1 - x) r(x) with polynomial p and r"""
    p = Polynomial(p_coeffs)
    q = Polynomial([1., -1.]) * Polynomial(r_coeffs)
    dp, dq, big_q = p.deriv(), q.deriv(), q.integ()
    return TestFunction(
        SEPARABLE,
        value=lambda t, x: p(t) * q(x),
        dt=lambda t, x: dp(t) * q(x),
        dx=lambda t, x: p(t) * dq(x),
        value_int=lambda t, x: p(t) * big_q(x),
        dt_int=lambda t, x: dp(t) * big_q(x),
        tau=tau,
    )


class ResidualTerms(NamedTuple):
    transport: float
    influx: float
    terminal: float
    initial: float

    @property
    def residual(self):
        return self.transport + self.influx - self.terminal + self.initial


def _influx_upto(mu: Measure, tau):
    """mu restricted to (0, tau]"""
    bp = mu.density.breakpoints
    density = PiecewiseDensity.from_cells(0., tau, bp[:-1], bp[1:], mu.density.values)
    keep = mu.atom_positions <= tau
    return Measure(config.TIME, tau, density, zip(mu.atom_positions[keep], mu.atom_masses[keep]))


def residual_terms(sol: Solution, tests: List[TestFunction], taus: Optional[Sequence[float]] = None,
                   dt_max=None) -> List[ResidualTerms]:
    """The four terms of the weak identity for each test, sweeping the solver nodes once"""
    taus = [tf.tau for tf in tests] if taus is None else list(taus)
    if any(tau is None or not 0 <= tau <= sol.horizon for tau in taus):
        raise ValueError("every test needs a tau in [0, %g]" % sol.horizon)
    if dt_max is None:
        dt_max = float(np.max(np.diff(sol.curve.node_times))) if sol.curve.node_times.size > 1 else sol.horizon
    nodes = merge_nodes(sol.curve.node_times, sol.mu.atom_positions, lower=0., upper=sol.horizon)
    taus_arr = np.array(taus, dtype=float)
    transport = np.zeros(len(tests))

    def accumulate(lo, hi, which):
        m = 0.5 * (lo + hi)
        state = sol.state_at(m)
        speed = sol.scenario.law.speed(sol.load(m))
        for k in which:
            tf = tests[k]
            transport[k] += (hi - lo) * (tf.pair(state, m, "dt") + speed * tf.pair(state, m, "dx"))

    for lo, hi in zip(nodes[:-1], nodes[1:]):
        full = np.nonzero(taus_arr >= hi)[0]
        if full.size:
            accumulate(lo, hi, full)
        partial = np.nonzero((taus_arr > lo) & (taus_arr < hi))[0]
        for k in partial:
            accumulate(lo, taus_arr[k], [k])

    terms = []
    for k, (tf, tau) in enumerate(zip(tests, taus)):
        influx = 0.
        if tau > 0:
            entered = _influx_upto(sol.mu, tau)
            influx = entered.integrate(lambda t, tf=tf: tf.value(t, 0.), dt_max)
        terminal = tf.pair(sol.state_at(tau), tau)
        initial = tf.pair(sol.rho0, 0.)
        terms.append(ResidualTerms(float(transport[k]), influx, terminal, initial))
    return terms


def weak_residuals(sol: Solution, tests: List[TestFunction], taus=None):
    return np.array([t.residual for t in residual_terms(sol, tests, taus)])


def weak_residual(sol: Solution, tf: TestFunction, tau=None):
    tau = tf.tau if tau is None else tau
    return float(weak_residuals(sol, [tf], [tau])[0])


class TransportedSpec(NamedTuple):
    bump: BumpSpec
    tau: float

    def build(self, sol: Solution):
        return transported_test(self.bump, self.tau, sol.curve)


class SeparableSpec(NamedTuple):
    p_coeffs: tuple
    r_coeffs: tuple
    tau: float

    def build(self, sol: Solution):
        return separable_test(self.p_coeffs, self.r_coeffs, self.tau)


def transported_family(horizon, num_bumps=8):
    """Bumps with supports spread over (0.1, 0.9) and end times spread over (0, T]"""
    specs = []
    for k in range(num_bumps):
        center = 0.2 + 0.6 * k / max(num_bumps - 1, 1)
        tau = horizon * (k + 1) / num_bumps
        specs.append(TransportedSpec(BumpSpec(center - 0.1, center + 0.1), tau))
    return specs


def separable_family(horizon):
    half = 0.5 * horizon
    return [
        SeparableSpec((1.,), (1.,), horizon),
        SeparableSpec((0., 1.), (1.,), horizon),
        SeparableSpec((1.,), (0., 1.), half),
        SeparableSpec((horizon, -1.), (1., 1.), horizon),
    ]


class ConvergenceReport(NamedTuple):
    dt: List[float]
    max_residual: List[float]
    order: float

    @property
    def exact(self):
        return math.isinf(self.order)

    def passed(self, residual_tol, min_order):
        return self.max_residual[0] < residual_tol and self.order >= min_order


def fitted_order(dts, residuals, floor=config.RESIDUAL_FLOOR):
    """Slope of log|R| against log dt; inf when the finest level is already at the floor"""
    dts, residuals = np.asarray(dts, dtype=float), np.asarray(residuals, dtype=float)
    if residuals[-1] <= floor:
        return math.inf
    above = residuals > floor
    if above.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(dts[above]), np.log(residuals[above]), 1)[0])


def residual_convergence(sol: Solution, family, levels, cfg=None,
                         resolve: Optional[Callable] = None, writer=None) -> ConvergenceReport:
    """Max |R| over the family on geometrically refined solver grids, with the fitted order

    Level 0 is sol itself (assumed solved with cfg); level k re-solves with dt_max / 2^k.
    """
    if levels < 2:
        raise ValueError("a convergence study needs at least two levels, got %d" % levels)
    cfg = sol.scenario.solver if cfg is None else cfg
    if resolve is None:
        resolve = _default_resolver(sol.solver)
    dts, maxima = [], []
    for level in range(levels):
        level_cfg = cfg.refined(level)
        level_sol = sol if level == 0 else resolve(sol.scenario, level_cfg)
        tests = [spec.build(level_sol) for spec in family]
        residuals = weak_residuals(level_sol, tests, [spec.tau for spec in family])
        largest = float(np.max(np.abs(residuals))) if residuals.size else 0.
        dts.append(level_cfg.dt_max)
        maxima.append(largest)
        logger.info("level %d, dt_max %.3e: max |R| = %.3e", level, level_cfg.dt_max, largest)
        if writer is not None:
            writer.add_scalar("verify/max_residual", largest, level)
    return ConvergenceReport(dts, maxima, fitted_order(dts, maxima))


def _default_resolver(solver_name):
    return solve_oracle if solver_name == "eventdriven" else solve
