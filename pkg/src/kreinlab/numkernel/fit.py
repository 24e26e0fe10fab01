"""Least-squares power-law fitting on log-log axes."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual_rms: float
    window: tuple


def loglog_fit(t, y, window=None) -> FitResult:
    """Fit log y = slope * log t + intercept over t inside the window.

    Requires at least 3 usable points with y > 0 inside the window.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is None:
        window = (float(np.min(t)), float(np.max(t)))
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError("fit window is empty")
    mask = (t >= lo) & (t <= hi)
    if np.any(y[mask] <= 0):
        raise ValueError("loglog_fit needs positive y values in the window")
    if np.count_nonzero(mask) < 3:
        raise ValueError("loglog_fit needs at least 3 points in the window")
    lt = np.log(t[mask])
    ly = np.log(y[mask])
    design = np.column_stack([lt, np.ones_like(lt)])
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - design @ np.array([slope, intercept])
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return FitResult(float(slope), float(intercept), rms, (lo, hi))
