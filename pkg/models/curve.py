import numpy as np

# slope bounds are checked with this much slack for roundoff in accumulated sums
SLOPE_SLACK = 1e-9


class CharCurve(object):
    """Piecewise-linear characteristic curve xi on [0, horizon], xi(0) = 0, slopes in [v_min, 1]"""

    def __init__(self, node_times, node_values, v_min, check=True):
        times = np.array(node_times, dtype=float)
        values = np.array(node_values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or times.size < 1:
            raise ValueError("curve needs matching 1-d node arrays")
        if times[0] != 0 or values[0] != 0:
            raise ValueError("curve must start at xi(0) = 0")
        if not v_min > 0:
            raise ValueError("v_min must be positive, got %g" % v_min)
        if np.any(np.diff(times) <= 0):
            raise ValueError("curve node times must be strictly increasing")
        self.node_times = times
        self.node_values = values
        self.v_min = float(v_min)
        if check and times.size > 1:
            slopes = self.slopes()
            if slopes.min() < self.v_min * (1 - SLOPE_SLACK) or slopes.max() > 1 + SLOPE_SLACK:
                raise ValueError("curve slopes [%.17g, %.17g] leave [v_min=%.17g, 1]"
                                 % (slopes.min(), slopes.max(), self.v_min))
        times.setflags(write=False)
        values.setflags(write=False)

    @classmethod
    def straight(cls, slope, nodes, v_min):
        times = np.asarray(nodes, dtype=float)
        return cls(times, slope * times, v_min)

    @property
    def horizon(self):
        return float(self.node_times[-1])

    @property
    def end_value(self):
        return float(self.node_values[-1])

    def __call__(self, t):
        result = np.interp(t, self.node_times, self.node_values)
        return float(result) if np.ndim(result) == 0 else result

    def inverse(self, y):
        """The unique t with xi(t) = y"""
        y_arr = np.asarray(y, dtype=float)
        if np.any(y_arr < -SLOPE_SLACK) or np.any(y_arr > self.end_value * (1 + SLOPE_SLACK) + SLOPE_SLACK):
            raise ValueError("xi^-1 undefined outside [0, %.17g], got %s" % (self.end_value, y))
        result = np.interp(y_arr, self.node_values, self.node_times)
        return float(result) if result.ndim == 0 else result

    def slopes(self):
        return np.diff(self.node_values) / np.diff(self.node_times)

    def slope_at(self, t):
        """Slope of the segment starting at or before t (right-continuous)"""
        if self.node_times.size == 1:
            return np.ones_like(np.asarray(t, dtype=float))
        idx = np.clip(np.searchsorted(self.node_times, t, side="right") - 1, 0, self.node_times.size - 2)
        return self.slopes()[idx]

    def truncated(self, tau):
        """The curve restricted to [0, tau]"""
        if not 0 < tau <= self.horizon:
            raise ValueError("cannot truncate a curve on [0, %g] at %g" % (self.horizon, tau))
        keep = self.node_times < tau
        times = np.append(self.node_times[keep], tau)
        values = np.append(self.node_values[keep], self(tau))
        if times.size >= 3 and tau - times[-2] < 1e-14:
            times, values = np.delete(times, -2), np.delete(values, -2)
        return CharCurve(times, values, self.v_min, check=False)

    def extended(self, piece, start):
        """xi(start + s) = xi(start) + piece(s), glued onto the curve at time start (= its horizon)"""
        if abs(start - self.horizon) > 1e-12:
            raise ValueError("can only extend at the curve end %g, got %g" % (self.horizon, start))
        times = np.concatenate((self.node_times, start + piece.node_times[1:]))
        values = np.concatenate((self.node_values, self.end_value + piece.node_values[1:]))
        return CharCurve(times, values, min(self.v_min, piece.v_min), check=False)

    def with_v_min(self, v_min):
        return CharCurve(self.node_times, self.node_values, v_min, check=False)

    def sup_distance(self, other):
        grid = np.union1d(self.node_times, other.node_times)
        grid = grid[grid <= min(self.horizon, other.horizon)]
        return float(np.max(np.abs(self(grid) - other(grid))))

    def to_dict(self):
        return {"times": self.node_times.tolist(), "values": self.node_values.tolist(), "v_min": self.v_min}

    def __repr__(self):
        return "CharCurve(%d nodes on [0, %g], xi(T)=%.6g)" % (self.node_times.size, self.horizon, self.end_value)


def xi_inverse(curve: CharCurve, y):
    return curve.inverse(y)
