"""Bracketed scalar root finding: sign scan plus safeguarded refinement."""

import numpy as np

from .. import constants


def refine_bracket(f, lo, hi, flo, fhi, rtol=constants.ROOT_RTOL, max_iter=200):
    """Safeguarded bisection/secant on a sign-change bracket."""
    for _ in range(max_iter):
        if hi - lo <= rtol * max(1.0, abs(lo), abs(hi)):
            break
        # secant candidate, fall back to the midpoint when it escapes
        denom = fhi - flo
        mid = 0.5 * (lo + hi)
        x = mid if denom == 0.0 else hi - fhi * (hi - lo) / denom
        if not (lo < x < hi):
            x = mid
        fx = f(x)
        if fx == 0.0:
            return x
        if np.sign(fx) == np.sign(flo):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
    return 0.5 * (lo + hi)


def find_roots_bracketed(f, interval, scan_points=None):
    """All sign-change roots of f on the interval, ascending.

    The scan grid is the anti-missed-root knob: tangential roots between
    nodes are not detected (documented limitation).
    """
    a, b = float(interval[0]), float(interval[1])
    if scan_points is None:
        scan_points = max(2, int(constants.ROOT_SCAN_PER_UNIT * (b - a)))
    if scan_points < 2:
        raise ValueError("scan_points must be at least 2")
    grid = np.linspace(a, b, int(scan_points))
    vals = np.array([f(x) for x in grid], dtype=float)
    roots = []
    for i in range(len(grid) - 1):
        v0, v1 = vals[i], vals[i + 1]
        if v0 == 0.0:
            if not roots or abs(grid[i] - roots[-1]) > constants.ROOT_RTOL:
                roots.append(grid[i])
            continue
        if v0 * v1 < 0.0:
            roots.append(refine_bracket(f, grid[i], grid[i + 1], v0, v1))
    if len(vals) and vals[-1] == 0.0:
        if not roots or abs(grid[-1] - roots[-1]) > constants.ROOT_RTOL:
            roots.append(grid[-1])
    return np.array(sorted(roots))
