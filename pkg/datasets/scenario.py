"""
Scenario documents

    {
      "velocity": {"kind": "reciprocal" | "affine-floor" | "table", "params": {...}},
      "T": 3.0,
      "rho0": {"density": [[a, b, value], ...], "atoms": [[x, m], ...]},
      "mu":   {"density": [[a, b, value], ...], "atoms": [[t, M], ...]},
      "solver": {"fixpoint_tol": ..., "max_iter": ..., "dt_max": ..., "window_margin": ...},
      "metric": {"grid_n": ...}
    }

Only "T" is required; missing measures are zero, the law defaults to reciprocal.
"""

import json
import os
from dataclasses import dataclass, field

import config
from models.characteristics import SolverConfig
from models.losses.flat import MetricConfig
from models.measure import Measure
from models.velocity import LAW_KINDS, VelocityLaw, reciprocal


class ScenarioError(ValueError):
    def __init__(self, field_name, message):
        super(ScenarioError, self).__init__("%s: %s" % (field_name, message))
        self.field = field_name
        self.message = message


@dataclass
class Scenario:
    rho0: Measure
    mu: Measure
    law: VelocityLaw
    horizon: float
    solver: SolverConfig = field(default_factory=SolverConfig)
    metric: MetricConfig = field(default_factory=MetricConfig)
    name: str = "scenario"

    def __post_init__(self):
        if not self.horizon > 0:
            raise ScenarioError("T", "horizon must be positive, got %s" % self.horizon)
        if not self.rho0.is_space:
            raise ScenarioError("rho0", "initial measure must live on [0, 1)")
        if self.mu.is_space or abs(self.mu.upper - self.horizon) > 0:
            raise ScenarioError("mu", "influx must live on (0, T]")

    @property
    def v_min(self):
        return self.law.v_min(self.rho0.total_mass(), self.mu.total_mass())

    def with_initial(self, rho0: Measure, mu: Measure = None, horizon=None, name=None):
        """Same law and configs, new data"""
        return Scenario(rho0, self.mu if mu is None else mu, self.law, self.horizon if horizon is None else horizon,
                        self.solver, self.metric, self.name if name is None else name)


def _check_number(field_name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(field_name, "expected a number, got %r" % (value,))
    return float(value)


def _parse_measure(field_name, doc, domain, upper):
    if doc is None:
        return Measure(domain, upper)
    if not isinstance(doc, dict):
        raise ScenarioError(field_name, "expected an object with 'density' and 'atoms'")
    unknown = set(doc) - {"density", "atoms"}
    if unknown:
        raise ScenarioError(field_name, "unknown keys %s" % sorted(unknown))
    lower_ok = (lambda x: 0 <= x < 1) if domain == config.SPACE else (lambda t: 0 < t <= upper)
    atoms = []
    for k, atom in enumerate(doc.get("atoms", [])):
        where = "%s.atoms[%d]" % (field_name, k)
        if not isinstance(atom, (list, tuple)) or len(atom) != 2:
            raise ScenarioError(where, "atoms are [position, mass] pairs")
        position, mass = _check_number(where, atom[0]), _check_number(where, atom[1])
        if mass < 0:
            raise ScenarioError(where, "negative mass %g" % mass)
        if not lower_ok(position):
            raise ScenarioError(where, "atom out of domain: position %g" % position)
        atoms.append((position, mass))
    cells = []
    for k, cell in enumerate(doc.get("density", [])):
        where = "%s.density[%d]" % (field_name, k)
        if not isinstance(cell, (list, tuple)) or len(cell) != 3:
            raise ScenarioError(where, "malformed density cell, expected [a, b, value]")
        a, b, value = (_check_number(where, v) for v in cell)
        if value < 0:
            raise ScenarioError(where, "negative mass: density value %g" % value)
        if not 0 <= a < b <= upper:
            raise ScenarioError(where, "malformed density cell [%g, %g] outside [0, %g]" % (a, b, upper))
        cells.append((a, b, value))
    if domain == config.SPACE:
        return Measure.space(cells, atoms)
    return Measure.time(upper, cells, atoms)


def _parse_law(doc):
    if doc is None:
        return reciprocal()
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ScenarioError("velocity", "expected an object with a 'kind'")
    kind = doc["kind"]
    if kind not in LAW_KINDS:
        raise ScenarioError("velocity.kind", "unknown law kind %r, expected one of %s" % (kind, list(LAW_KINDS)))
    try:
        return VelocityLaw(kind, doc.get("params"))
    except ValueError as e:
        raise ScenarioError("velocity.params", str(e))


def _parse_block(field_name, doc, factory, defaults):
    merged = dict(defaults)
    if doc:
        unknown = set(doc) - set(defaults)
        if unknown:
            raise ScenarioError(field_name, "unknown keys %s" % sorted(unknown))
        merged.update(doc)
    try:
        return factory(**merged)
    except (TypeError, ValueError) as e:
        raise ScenarioError(field_name, str(e))


def parse_scenario(text, name="scenario", solver_defaults=None, metric_defaults=None) -> Scenario:
    """Scenario from a JSON string or an already-decoded dict

    solver_defaults / metric_defaults fill whatever the document's own blocks leave out.
    """
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScenarioError("document", "invalid JSON: %s" % e)
    else:
        doc = text
    if not isinstance(doc, dict):
        raise ScenarioError("document", "expected a JSON object")
    unknown = set(doc) - {"velocity", "T", "rho0", "mu", "solver", "metric", "name"}
    if unknown:
        raise ScenarioError("document", "unknown keys %s" % sorted(unknown))
    if "T" not in doc:
        raise ScenarioError("T", "missing horizon")
    horizon = _check_number("T", doc["T"])
    if not horizon > 0:
        raise ScenarioError("T", "horizon must be positive, got %g" % horizon)

    law = _parse_law(doc.get("velocity"))
    rho0 = _parse_measure("rho0", doc.get("rho0"), config.SPACE, 1.0)
    mu = _parse_measure("mu", doc.get("mu"), config.TIME, horizon)
    solver = _parse_block("solver", doc.get("solver"), SolverConfig, solver_defaults or SolverConfig().to_dict())
    metric = _parse_block("metric", doc.get("metric"), MetricConfig, metric_defaults or MetricConfig().to_dict())
    return Scenario(rho0, mu, law, horizon, solver, metric, doc.get("name", name))


def serialize_scenario(scenario: Scenario):
    return {
        "name": scenario.name,
        "velocity": scenario.law.to_dict(),
        "T": scenario.horizon,
        "rho0": scenario.rho0.to_dict(),
        "mu": scenario.mu.to_dict(),
        "solver": scenario.solver.to_dict(),
        "metric": scenario.metric.to_dict(),
    }


def load_scenario(path, **kwargs) -> Scenario:
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise ScenarioError("file", "cannot read %s: %s" % (path, e.strerror))
    kwargs.setdefault("name", os.path.splitext(os.path.basename(path))[0])
    return parse_scenario(text, **kwargs)
