"""
Flat norm and its weighted modifications between two measures on [0, 1)

    d_w(nu1, nu2) = sup { |int f w d(nu1 - nu2)| : 0 <= f <= 1, f 1-Lipschitz }

with w = 1 (flat norm), the hat h(x) = 1/2 - |1/2 - x|, or g(x) = 1 - x. The sup is taken over f sampled
on a grid carrying every atom and density breakpoint of both inputs; density differences are lumped at
cell midpoints. Lipschitz bounds act on f only, the weight enters through the objective.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from models.layers.chain_lp import chain_lp_max
from models.measure import Measure
from utils.grid import merge_nodes, midpoints


class WeightKind(str, Enum):
    UNIT = "unit"
    HAT = "hat"
    ONE_MINUS_X = "one-minus-x"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self is WeightKind.UNIT:
            return np.ones_like(x)
        if self is WeightKind.HAT:
            return 0.5 - np.abs(0.5 - x)
        return 1. - x


@dataclass
class MetricConfig:
    grid_n: int = 4001

    def __post_init__(self):
        if int(self.grid_n) < 2:
            raise ValueError("metric.grid_n must be at least 2, got %s" % self.grid_n)
        self.grid_n = int(self.grid_n)

    @classmethod
    def from_options(cls, metric_options):
        return cls(grid_n=int(metric_options.grid_n))

    def to_dict(self):
        return {"grid_n": self.grid_n}


def _nearest(nodes, points):
    idx = np.clip(np.searchsorted(nodes, points), 1, nodes.size - 1)
    return np.where(points - nodes[idx - 1] <= nodes[idx] - points, idx - 1, idx)


def signed_coefficients(nu1: Measure, nu2: Measure, cfg: MetricConfig):
    """Points and signed masses of nu1 - nu2: atoms at their nodes, density cells at cell midpoints"""
    nodes = merge_nodes(np.linspace(0., 1., cfg.grid_n), nu1.atom_positions, nu2.atom_positions,
                        nu1.density.breakpoints, nu2.density.breakpoints, lower=0., upper=1.)
    node_mass = np.zeros(nodes.size)
    np.add.at(node_mass, _nearest(nodes, nu1.atom_positions), nu1.atom_masses)
    np.add.at(node_mass, _nearest(nodes, nu2.atom_positions), -nu2.atom_masses)
    cell_mass = np.diff(nu1.density.cdf(nodes) - nu2.density.cdf(nodes))

    points = np.empty(2 * nodes.size - 1)
    points[0::2], points[1::2] = nodes, midpoints(nodes)
    masses = np.empty_like(points)
    masses[0::2], masses[1::2] = node_mass, cell_mass
    return points, masses


def weighted_flat_distance(nu1: Measure, nu2: Measure, weight=WeightKind.UNIT, cfg: MetricConfig = None):
    if not (nu1.is_space and nu2.is_space):
        raise ValueError("distances are defined between space measures, got %s and %s" % (nu1.domain, nu2.domain))
    cfg = MetricConfig() if cfg is None else cfg
    weight = WeightKind(weight)
    points, masses = signed_coefficients(nu1, nu2, cfg)
    coeffs = weight(points) * masses
    # points without mass only relay the Lipschitz bound, so they can be folded into the steps
    keep = coeffs != 0
    if not keep.any():
        return 0.
    points, coeffs = points[keep], coeffs[keep]
    steps = np.diff(points)
    return max(chain_lp_max(coeffs, steps), chain_lp_max(-coeffs, steps))


def flat_distance(nu1, nu2, cfg=None):
    return weighted_flat_distance(nu1, nu2, WeightKind.UNIT, cfg)


def phi_distance(nu1, nu2, cfg=None):
    return weighted_flat_distance(nu1, nu2, WeightKind.HAT, cfg)


def psi_distance(nu1, nu2, cfg=None):
    return weighted_flat_distance(nu1, nu2, WeightKind.ONE_MINUS_X, cfg)


def continuity_delta(eps, rho0_total, mu_total):
    """phi(rho_t1 - rho_t2) < eps whenever |t1 - t2| < delta"""
    total = 2. * rho0_total + 2. * mu_total
    return math.inf if total == 0 else eps / total


def _finite_ratio(eps, denominator):
    return math.inf if denominator == 0 else eps / denominator


def perturbation_horizon(eps, sol1, sol2):
    """Time up to which phi(rho0^1 - rho0^2) < eps / 5 keeps phi(rho_t^1 - rho_t^2) < eps

    sol1 and sol2 share the influx and the velocity law; t_k is where xi_k reaches 1/2.
    """
    rho1, rho2 = sol1.rho0.total_mass(), sol2.rho0.total_mass()
    mu = sol1.mu.total_mass()
    t_half = [sol.curve.inverse(0.5) if sol.curve.end_value >= 0.5 else math.inf for sol in (sol1, sol2)]
    return min(1., t_half[0], t_half[1], _finite_ratio(eps, 15. * (rho1 + rho2)), _finite_ratio(eps, 10. * rho2),
               _finite_ratio(eps, 20. * mu))
