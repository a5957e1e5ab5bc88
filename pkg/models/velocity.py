"""
Velocity laws alpha(W): the common speed of all products as a function of the total load W
"""

import numpy as np

RECIPROCAL = "reciprocal"
AFFINE_FLOOR = "affine-floor"
TABLE = "table"

LAW_KINDS = (RECIPROCAL, AFFINE_FLOOR, TABLE)


class VelocityLaw(object):
    """alpha with alpha(0) = 1, alpha > 0 and Lipschitz constant `lipschitz`

    reciprocal:    alpha(W) = 1 / (1 + W)
    affine-floor:  alpha(W) = max(floor, 1 - W / w0)
    table:         piecewise-linear through `points` [[W, alpha], ...], constant past the last point
    """

    def __init__(self, kind, params=None):
        params = dict(params or {})
        self.kind = kind
        self.params = params
        if kind == RECIPROCAL:
            self.lipschitz = 1.
        elif kind == AFFINE_FLOOR:
            w0, floor = float(_require(params, "w0")), float(_require(params, "floor"))
            if not w0 > 0:
                raise ValueError("affine-floor law needs w0 > 0, got %g" % w0)
            if not 0 < floor < 1:
                raise ValueError("affine-floor law needs 0 < floor < 1, got %g" % floor)
            self.params = {"w0": w0, "floor": floor}
            self.lipschitz = 1. / w0
        elif kind == TABLE:
            points = np.array(_require(params, "points"), dtype=float)
            if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 2:
                raise ValueError("table law needs at least two [W, alpha] points")
            w, a = points[:, 0], points[:, 1]
            if w[0] != 0 or a[0] != 1:
                raise ValueError("table law must start at [0, 1]")
            if np.any(np.diff(w) <= 0):
                raise ValueError("table law loads must be strictly increasing")
            if np.any(np.diff(a) >= 0) or np.any(a <= 0):
                raise ValueError("table law speeds must be positive and strictly decreasing")
            self._w, self._a = w, a
            self.params = {"points": points.tolist()}
            self.lipschitz = float(np.max(np.abs(np.diff(a) / np.diff(w))))
        else:
            raise ValueError("unknown law kind: %s" % kind)

    def speed(self, w):
        w = np.asarray(w, dtype=float)
        if np.any(w < 0):
            raise ValueError("load must be nonnegative, got %s" % np.min(w))
        if self.kind == RECIPROCAL:
            result = 1. / (1. + w)
        elif self.kind == AFFINE_FLOOR:
            result = np.maximum(self.params["floor"], 1. - w / self.params["w0"])
        else:
            result = np.interp(w, self._w, self._a)
        return float(result) if result.ndim == 0 else result

    __call__ = speed

    def v_min(self, rho0_total, mu_total):
        """alpha(1 + rho0([0,1)) + mu((0,T])), a lower bound for every speed the solution can see"""
        if rho0_total < 0 or mu_total < 0:
            raise ValueError("masses must be nonnegative")
        return self.speed(1. + rho0_total + mu_total)

    def large_mass_threshold(self, v_min):
        return v_min / (4. * self.lipschitz)

    def to_dict(self):
        return {"kind": self.kind, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], d.get("params"))

    def __eq__(self, other):
        return isinstance(other, VelocityLaw) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return "VelocityLaw(%s, %s)" % (self.kind, self.params)


def _require(params, key):
    if key not in params:
        raise ValueError("missing param: %s" % key)
    return params[key]


def reciprocal():
    return VelocityLaw(RECIPROCAL)
