from logging import Logger

from tqdm import tqdm

from datasets.registry import build_registry, random_examples
from functions.base import ScenarioRunner
from models.characteristics import SolverConfig
from models.losses.flat import MetricConfig


class ExampleRunner(ScenarioRunner):
    """Solves every built-in example and compares against its known answers"""

    def __init__(self, options, logger: Logger, writer, overrides=None):
        super(ExampleRunner, self).__init__(options, logger, writer, overrides=overrides)

    def configs(self):
        solver = dict(SolverConfig.from_options(self.options.solver).to_dict(), **self.overrides.get("solver", {}))
        metric = dict(MetricConfig.from_options(self.options.metric).to_dict(), **self.overrides.get("metric", {}))
        return SolverConfig(**solver), MetricConfig(**metric)

    def registry(self, names=None, random=0):
        solver, metric = self.configs()
        examples = [e for e in build_registry(solver, metric) if not names or e.name in names]
        if names and len(examples) < len(set(names)):
            unknown = sorted(set(names) - {e.name for e in examples})
            raise ValueError("unknown example: %s" % ", ".join(unknown))
        if random:
            examples += random_examples(random, int(self.options.random.seed), solver, metric)
        return examples

    def run(self, names=None, out=None, random=0):
        rows, failed = [], 0
        examples = self.registry(names, random)
        for example in tqdm(examples, desc="examples"):
            sol = self.solve(example.scenario)
            for check in example.checks:
                value, ok = check.evaluate(sol)
                failed += not ok
                rows.append([example.name, check.name, value, check.expected, check.tol, int(ok)])
                self.logger.info("[%s] %s %s: %.17g (expected %.17g +- %g)"
                                 % ("PASS" if ok else "FAIL", example.name, check.name, value, check.expected,
                                    check.tol))
        self.summary_writer.add_scalar("examples/failed", failed, 0)
        self.logger.info("%d of %d checks passed in %s" % (len(rows) - failed, len(rows), self.time_elapsed))
        path = self.saver.save_csv(out or "examples.csv", ["example", "check", "value", "expected", "tol", "passed"],
                                   rows, fmt=["%s", "%s", "%.17g", "%.17g", "%g", "%d"])
        return failed == 0, path
