import json
from logging import Logger

from functions.base import ScenarioRunner
from models.losses.flat import MetricConfig, WeightKind, weighted_flat_distance


class DistanceEvaluator(ScenarioRunner):
    """Weighted flat distance between two measures, each a snapshot file or a scenario solved up to t"""

    def __init__(self, options, logger: Logger, writer, overrides=None):
        super(DistanceEvaluator, self).__init__(options, logger, writer, overrides=overrides)

    def load_measure(self, path, t=None):
        with open(path) as f:
            doc = json.load(f)
        if "T" not in doc:
            return self.saver.load_snapshot(path)
        scenario = self.load_scenario(path)
        if not t:
            return scenario.rho0
        return self.solve(scenario).state_at(t)

    def evaluate(self, path_a, path_b, weight=WeightKind.UNIT, t=None):
        nu_a, nu_b = self.load_measure(path_a, t), self.load_measure(path_b, t)
        metric = dict(MetricConfig.from_options(self.options.metric).to_dict(), **self.overrides.get("metric", {}))
        value = weighted_flat_distance(nu_a, nu_b, WeightKind(weight), MetricConfig(**metric))
        self.logger.info("%s distance between %s and %s: %.17g" % (WeightKind(weight).value, path_a, path_b, value))
        self.summary_writer.add_scalar("distance/%s" % WeightKind(weight).value, value, 0)
        return value
