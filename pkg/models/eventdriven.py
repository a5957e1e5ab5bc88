"""
Event-driven integration of the closed-loop equation

    xi'(t) = alpha(mu((max{0, xi^-1(xi(t) - 1)}, t]) + rho0([0, 1 - xi(t))))

Atom entries (influx atoms) cut the integration into segments; atom exits (xi crossing 1 - x_i, or
xi(t) - xi(t_j) crossing 1) are terminal events. Between stops the right-hand side is continuous.
Used as an independent check of the contraction solver.
"""

import logging
import math

import numpy as np
from scipy.integrate import solve_ivp

from models.curve import CharCurve
from models.semiflow import Solution
from utils.grid import merge_nodes, uniform_nodes

logger = logging.getLogger(__name__)

# atoms this close to their exit when integration stops are counted as gone
EVENT_TOL = 1e-12
# segments longer than this would need history the segment itself produces
MAX_SEGMENT = 0.5


class EventAccumulationError(RuntimeError):
    pass


def _event(fn):
    fn.terminal = True
    fn.direction = 1
    return fn


def _max_step(rho0, mu, v_min, dt_max):
    """Longest RK step that cannot jump over a density cell

    xi crosses a space cell of width w in time >= w; the oldest influx still inside sweeps a time cell of
    width w in time >= v_min w.
    """
    widths = [MAX_SEGMENT]
    for nu, rate in ((rho0, 1.), (mu, v_min)):
        cells = np.diff(nu.density.breakpoints)[nu.density.values > 0]
        if cells.size:
            widths.append(rate * float(cells.min()))
    return max(dt_max, min(widths))


def solve_eventdriven(scenario, cfg=None) -> CharCurve:
    cfg = scenario.solver if cfg is None else cfg
    rho0, mu, law, horizon = scenario.rho0, scenario.mu, scenario.law, scenario.horizon
    v_min = law.v_min(rho0.total_mass(), mu.total_mass())

    rho_x, rho_m = rho0.atom_positions, rho0.atom_masses
    rho_inside = np.ones(rho_x.size, dtype=bool)
    mu_t, mu_m = mu.atom_positions, mu.atom_masses
    mu_state = np.zeros(mu_t.size, dtype=int)  # 0 waiting, 1 inside, 2 gone
    mu_entry_xi = np.zeros(mu_t.size)

    stops = np.unique(np.concatenate((mu_t, mu.density.breakpoints)))
    stops = stops[(stops > 0) & (stops < horizon)]
    max_segments = 10 * (rho_x.size + mu_t.size + stops.size + int(math.ceil(horizon / MAX_SEGMENT))) + 100
    max_step = _max_step(rho0, mu, v_min, cfg.dt_max)

    hist_t, hist_xi = [0.], [0.]
    t, xi = 0., 0.
    segments = 0
    while t < horizon:
        segments += 1
        if segments > max_segments:
            raise EventAccumulationError("more than %d integration segments before T=%g (stuck at t=%.17g)"
                                         % (max_segments, horizon, t))
        upcoming = stops[stops > t]
        seg_end = min(horizon, t + MAX_SEGMENT, upcoming[0] if upcoming.size else horizon)

        times_arr, xi_arr = np.array(hist_t), np.array(hist_xi)
        pp_load = float(rho_m[rho_inside].sum() + mu_m[mu_state == 1].sum())

        def rhs(s, y, times_arr=times_arr, xi_arr=xi_arr, pp_load=pp_load):
            position = y[0]
            oldest = np.interp(position - 1., xi_arr, times_arr) if position >= 1. else 0.
            load = (rho0.density.cdf(1. - position) + max(mu.density.cdf(s) - mu.density.cdf(oldest), 0.)
                    + pp_load)
            return [law.speed(max(load, 0.))]

        events = []
        if rho_inside.any():
            exit_at = 1. - rho_x[rho_inside].max()
            events.append(_event(lambda s, y, exit_at=exit_at: y[0] - exit_at))
        if (mu_state == 1).any():
            exit_at = mu_entry_xi[mu_state == 1].min() + 1.
            events.append(_event(lambda s, y, exit_at=exit_at: y[0] - exit_at))

        sol = solve_ivp(rhs, (t, seg_end), [xi], method="RK45", max_step=max_step, rtol=1e-10, atol=1e-13,
                        events=events or None, dense_output=True)
        if sol.status == -1:
            raise EventAccumulationError("integration failed at t=%.17g: %s" % (t, sol.message))
        # steps are long between stops, the history is read back at dt_max spacing
        samples = merge_nodes(uniform_nodes(t, sol.t[-1], cfg.dt_max), sol.t, lower=t, upper=sol.t[-1])[1:]
        for s, y in zip(samples, sol.sol(samples)[0]):
            if s > hist_t[-1]:
                hist_t.append(float(s))
                hist_xi.append(max(float(y), hist_xi[-1]))
        t, xi = hist_t[-1], hist_xi[-1]

        # exits first, then entries at the same time stamp
        leaving = rho_inside & (rho_x + xi >= 1. - EVENT_TOL)
        if leaving.any():
            logger.debug("initial atoms at %s leave at t=%.17g", rho_x[leaving].tolist(), t)
        rho_inside &= ~leaving
        leaving = (mu_state == 1) & (xi - mu_entry_xi >= 1. - EVENT_TOL)
        mu_state[leaving] = 2
        entering = (mu_state == 0) & (mu_t <= t)
        mu_state[entering] = 1
        mu_entry_xi[entering] = xi

    times, values = np.array(hist_t), np.array(hist_xi)
    times[-1] = horizon
    logger.debug("event-driven curve built from %d segments", segments)
    return CharCurve(times, values, v_min, check=False)


def solve_oracle(scenario, cfg=None) -> Solution:
    return Solution(scenario, solve_eventdriven(scenario, cfg), solver="eventdriven")
