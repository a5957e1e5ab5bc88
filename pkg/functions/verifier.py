import math

from functions.base import ScenarioRunner
from models.weak_form import residual_convergence, separable_family, transported_family
from utils.average_meter import AverageMeter


class Verifier(ScenarioRunner):

    # noinspection PyAttributeOutsideInit
    def init_fn(self, **kwargs):
        self.residual_meter = AverageMeter()

    def families(self):
        horizon = self.scenario.horizon
        return {
            "transported": transported_family(horizon, int(self.options.verify.num_bumps)),
            "separable": separable_family(horizon),
        }

    def verify(self, out=None):
        sol = self.solve()
        levels = int(self.options.verify.levels)
        tol, min_order = float(self.options.verify.residual_tol), float(self.options.verify.min_order)
        report = {"scenario": self.scenario.name, "solver": sol.solver, "families": {}}
        passed = True
        for name, family in self.families().items():
            result = residual_convergence(sol, family, levels, cfg=self.scenario.solver, writer=self.summary_writer)
            self.residual_meter.update(result.max_residual)
            ok = result.passed(tol, min_order)
            passed = passed and ok
            self.logger.info("%s family: max |R| %s, order %s -> %s"
                             % (name, ", ".join("%.3e" % r for r in result.max_residual),
                                "exact" if result.exact else "%.3f" % result.order, "pass" if ok else "FAIL"))
            report["families"][name] = {
                "dt_max": result.dt,
                "max_residual": result.max_residual,
                "order": "inf" if result.exact else (None if math.isnan(result.order) else result.order),
                "passed": ok,
            }
        report["passed"] = passed
        self.logger.info("Residuals over all levels: %s" % self.residual_meter)
        path = self.saver.save_json(out or "%s_verify.json" % self.scenario.name, report)
        return passed, path
