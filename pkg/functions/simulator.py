import math

import numpy as np

from functions.base import ScenarioRunner

SIMULATE_HEADER = ["t", "xi", "W", "Y", "atoms_inside"]
LEDGER_HEADER = ["source", "index", "position", "entry_time", "exit_time", "mass"]
LEDGER_FMT = ["%s", "%d", "%.17g", "%.17g", "%.17g", "%.17g"]


class Simulator(ScenarioRunner):

    # noinspection PyAttributeOutsideInit
    def init_fn(self, **kwargs):
        self.solution = None

    def ensure_solution(self):
        if self.solution is None:
            self.solution = self.solve()
        return self.solution

    def sample_times(self):
        horizon = self.scenario.horizon
        n = max(int(math.ceil(horizon / self.options.simulate.sample_dt - 1e-9)), 1)
        return np.array([i * horizon / n for i in range(n + 1)])

    def simulate(self, out=None):
        sol = self.ensure_solution()
        times = self.sample_times()
        xi = sol.curve(times)
        load = sol.load(times)
        outflux = np.array([sol.cumulative_outflux(t) for t in times])
        inside = sol.atoms_inside(times)
        rows = np.column_stack([times, xi, load, outflux, inside])

        for step, (t, x, w, y) in enumerate(zip(times, xi, load, outflux)):
            self.summary_writer.add_scalar("simulate/xi", x, step)
            self.summary_writer.add_scalar("simulate/W", w, step)
            self.summary_writer.add_scalar("simulate/Y", y, step)
        self.logger.info("Simulated %s: xi(T)=%.6g, W(T)=%.6g, Y(T)=%.6g" % (self.scenario.name, xi[-1], load[-1],
                                                                            outflux[-1]))
        return self.saver.save_csv(out or "%s_simulate.csv" % self.scenario.name, SIMULATE_HEADER, rows)

    def state(self, t, out=None):
        sol = self.ensure_solution()
        state = sol.state_at(t)
        self.logger.info("State of %s at t=%g: %r, W=%.17g" % (self.scenario.name, t, state, sol.load(t)))
        snapshot = self.saver.snapshot(state, t)
        snapshot["load"] = sol.load(t)
        return self.saver.save_json(out or "%s_state_%g.json" % (self.scenario.name, t), snapshot)

    def exit_times(self, out=None):
        sol = self.ensure_solution()
        ledger = sol.exit_times()
        for record in ledger:
            if record.exited:
                self.logger.info("%s atom %d (mass %.6g) leaves at t=%.17g" % (record.source, record.index,
                                                                              record.mass, record.exit_time))
            else:
                self.logger.info("%s atom %d (mass %.6g) is still inside at T" % (record.source, record.index,
                                                                                 record.mass))
        return self.saver.save_csv(out or "%s_exit_times.csv" % self.scenario.name, LEDGER_HEADER,
                                   ledger.to_rows(), fmt=LEDGER_FMT)
