import numpy as np
import scipy.sparse
from scipy.optimize import linprog


def chain_lp_max(coeffs, steps):
    """
    max sum_k c_k f_k  subject to  0 <= f_k <= 1,  |f_{k+1} - f_k| <= steps_k

    The constraint matrix is an interval (difference) structure, so the LP optimum is exact.
    Shape: coeffs.shape=[n], steps.shape=[n - 1]
    """
    coeffs = np.asarray(coeffs, dtype=float).ravel()
    steps = np.asarray(steps, dtype=float).ravel()
    n = coeffs.size
    if n == 0:
        raise ValueError("need at least one coefficient")
    if steps.size != n - 1:
        raise ValueError("need %d steps for %d coefficients, got %d" % (n - 1, n, steps.size))
    if np.any(steps < 0):
        raise ValueError("steps must be nonnegative")
    if not np.any(coeffs):
        return 0.
    if n == 1:
        return max(float(coeffs[0]), 0.)

    # rows: f_{k+1} - f_k <= s_k, then f_k - f_{k+1} <= s_k
    diff = scipy.sparse.diags([-np.ones(n - 1), np.ones(n - 1)], [0, 1], shape=(n - 1, n), format="csr")
    A_ub = scipy.sparse.vstack([diff, -diff], format="csr")
    b_ub = np.concatenate([steps, steps])
    result = linprog(-coeffs, A_ub=A_ub, b_ub=b_ub, bounds=(0, 1), method="highs")
    if result.status != 0:
        raise RuntimeError("chain LP failed: %s" % result.message)
    return max(-float(result.fun), 0.)
