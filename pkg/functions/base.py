import time
from datetime import timedelta
from logging import Logger

from tensorboardX import SummaryWriter

from datasets.scenario import Scenario, load_scenario
from functions.saver import ResultSaver
from models.characteristics import SolverConfig, solve
from models.eventdriven import solve_oracle
from models.losses.flat import MetricConfig


def _solver_block(options):
    return {k: options.solver[k] for k in ("fixpoint_tol", "max_iter", "dt_max", "window_margin")}


class ScenarioRunner(object):
    def __init__(self, options, logger: Logger, summary_writer: SummaryWriter, scenario=None, overrides=None):
        self.options = options
        self.logger = logger

        # initialize summary writer
        self.summary_writer = summary_writer

        # flags given on the command line win over the scenario's own solver / metric blocks
        self.overrides = overrides or {}
        self.scenario = self.load_scenario(scenario) if scenario is not None else None

        self.saver = ResultSaver(self.logger, self.options.output_dir)
        self.time_start = time.time()

        # override this function to set up runner-specific state
        self.init_fn()

    def load_scenario(self, scenario):
        if isinstance(scenario, Scenario):
            loaded = scenario
        else:
            self.logger.info("Loading scenario: %s" % scenario)
            loaded = load_scenario(scenario, solver_defaults=_solver_block(self.options),
                                   metric_defaults=dict(self.options.metric))
        solver = dict(loaded.solver.to_dict(), **self.overrides.get("solver", {}))
        metric = dict(loaded.metric.to_dict(), **self.overrides.get("metric", {}))
        loaded = Scenario(loaded.rho0, loaded.mu, loaded.law, loaded.horizon, SolverConfig(**solver),
                          MetricConfig(**metric), loaded.name)
        self.logger.info("Scenario %s: T=%g, rho0 %r, mu %r, law %r" % (loaded.name, loaded.horizon, loaded.rho0,
                                                                        loaded.mu, loaded.law))
        return loaded

    def init_fn(self, **kwargs):
        pass

    def solve(self, scenario=None):
        scenario = self.scenario if scenario is None else scenario
        tic = time.time()
        if self.options.solver.oracle:
            sol = solve_oracle(scenario)
        else:
            sol = solve(scenario)
        self.logger.info("Solved %s with the %s solver in %.3fs: %r" % (scenario.name, sol.solver,
                                                                        time.time() - tic, sol.curve))
        if sol.trace is not None:
            self.logger.info("%d windows, %d exit restarts" % (len(sol.trace.windows), len(sol.trace.exit_events)))
            ratios = sol.trace.all_ratios()
            if ratios:
                self.logger.info("largest contraction ratio %.3g" % max(ratios))
        return sol

    @property
    def time_elapsed(self):
        return timedelta(seconds=time.time() - self.time_start)
