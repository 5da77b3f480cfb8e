"""Pure-Python float kernels; same contract as the compiled ``_ckernels``."""
import math

import numpy as np


def iterate_float(coeffs, x0, steps, rel_tol):
    """Iterate x -> (a x + b)/(c x + d) cycling through the rows of ``coeffs``.

    Returns (values, pole_at).  ``values`` holds x_0 .. x_m where m is the
    last defined step; pole_at is m + 1 if the next step hits a pole, else -1.
    """
    rows = [tuple(float(v) for v in row) for row in np.asarray(coeffs, dtype=np.float64)]
    k = len(rows)
    out = np.empty(steps + 1, dtype=np.float64)
    x = float(x0)
    out[0] = x
    for n in range(steps):
        a, b, c, d = rows[n % k]
        cx = c * x
        den = cx + d
        if abs(den) <= rel_tol * max(abs(cx), abs(d), 1.0):
            return out[: n + 1], n + 1
        x = (a * x + b) / den
        out[n + 1] = x
    return out, -1


def angle_histogram(values, bins):
    """Counts of the angles 2*atan(x) in ``bins`` equal arcs of (-pi, pi]."""
    counts = np.zeros(bins, dtype=np.int64)
    width = 2.0 * math.pi / bins
    for x in np.asarray(values, dtype=np.float64):
        j = int((2.0 * math.atan(x) + math.pi) / width)
        if j >= bins:
            j = bins - 1
        counts[j] += 1
    return counts
