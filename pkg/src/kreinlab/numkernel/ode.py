"""Linear ODE initial-value integration.

``solve_ode_ivp`` is the public entry point: classical fixed-step RK4 with
Richardson step-halving until the endpoint is stable to the requested
relative tolerance.  ``rk4_linear`` is the batched workhorse shared with
the interval engines; coefficient callbacks may return arrays with leading
batch axes, and everything broadcasts.
"""

from dataclasses import dataclass, field

import numpy as np

from .. import constants
from ..errors import ConvergenceError


@dataclass
class SampledFunction:
    """Values (and optionally first derivatives) on an increasing grid.

    values/deriv have shape (npts,) for scalar functions or (npts, d) for
    vector-valued ones.  Evaluation uses cubic Hermite interpolation when
    derivatives are stored, piecewise-linear otherwise.
    """

    grid: np.ndarray
    values: np.ndarray
    deriv: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.deriv is not None:
            self.deriv = np.asarray(self.deriv, dtype=float)
        if self.grid.ndim != 1 or len(self.grid) < 2:
            raise ValueError("grid must be 1D with at least two points")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if self.values.shape[0] != len(self.grid):
            raise ValueError("values do not match grid")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.grid, x) - 1, 0, len(self.grid) - 2)
        x0 = self.grid[idx]
        h = self.grid[idx + 1] - x0
        s = (x - x0) / h
        y0 = self.values[idx]
        y1 = self.values[idx + 1]
        if self.deriv is None:
            out = y0 + (y1 - y0) * _expand(s, y0)
        else:
            d0 = self.deriv[idx]
            d1 = self.deriv[idx + 1]
            se = _expand(s, y0)
            he = _expand(h, y0)
            h00 = (1 + 2 * se) * (1 - se) ** 2
            h10 = se * (1 - se) ** 2
            h01 = se * se * (3 - 2 * se)
            h11 = se * se * (se - 1)
            out = h00 * y0 + h10 * he * d0 + h01 * y1 + h11 * he * d1
        return out

    @property
    def x0(self):
        return float(self.grid[0])

    @property
    def x1(self):
        return float(self.grid[-1])

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))


def _expand(s, template):
    s = np.asarray(s, float)
    if np.ndim(template) > np.ndim(s):
        return s[..., None]
    return s


def rk4_linear(cfun, x0, x1, nsteps, y0, source=None, record=False):
    """Integrate Y' = C(x) Y + g(x) with fixed-step classical RK4.

    cfun(x) -> (..., d, d); y0 has shape (..., d) or (..., d, k).
    Returns the endpoint state, or (grid, states) when record is set.
    """
    y = np.array(y0, dtype=float)
    vec = y.ndim >= 1 and (y.ndim == 1 or cfun(x0).shape[-1] != y.shape[-2])
    h = (x1 - x0) / nsteps
    if record:
        states = np.empty((nsteps + 1,) + y.shape)
        states[0] = y
    x = x0
    for i in range(nsteps):
        c0 = cfun(x)
        ch = cfun(x + 0.5 * h)
        c1 = cfun(x + h)
        if source is None:
            g0 = gh = g1 = 0.0
        else:
            g0 = source(x)
            gh = source(x + 0.5 * h)
            g1 = source(x + h)
        k1 = _apply(c0, y, vec) + g0
        k2 = _apply(ch, y + 0.5 * h * k1, vec) + gh
        k3 = _apply(ch, y + 0.5 * h * k2, vec) + gh
        k4 = _apply(c1, y + h * k3, vec) + g1
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        x = x0 + (i + 1) * h
        if record:
            states[i + 1] = y
    if record:
        return np.linspace(x0, x1, nsteps + 1), states
    return y


def _apply(c, y, vec):
    if vec:
        return np.einsum("...ij,...j->...i", c, y)
    return c @ y


def solve_ode_ivp(coeffs, dim, init, interval, source=None,
                  rel_tol=constants.ODE_REL_TOL, nsteps0=64,
                  record=True) -> SampledFunction:
    """First-order linear IVP y' = C(x) y + g(x), y(x0) = init.

    Fixed-step RK4; the step is halved until the endpoint moves by less
    than rel_tol (relative).  Raises ConvergenceError when the refinement
    budget is exhausted.
    """
    x0, x1 = float(interval[0]), float(interval[1])
    y0 = np.asarray(init, dtype=float).reshape(dim)
    n = int(nsteps0)
    prev = rk4_linear(coeffs, x0, x1, n, y0, source=source)
    while True:
        n *= 2
        if n > constants.ODE_MAX_STEPS:
            raise ConvergenceError("step-refinement budget exceeded")
        cur = rk4_linear(coeffs, x0, x1, n, y0, source=source)
        scale = max(float(np.max(np.abs(cur))), 1.0)
        if float(np.max(np.abs(cur - prev))) < rel_tol * scale:
            break
        prev = cur
    grid, states = rk4_linear(coeffs, x0, x1, n, y0, source=source, record=True)
    deriv = np.empty_like(states)
    for i, x in enumerate(grid):
        g = source(x) if source is not None else 0.0
        deriv[i] = coeffs(x) @ states[i] + g
    if not record:
        grid = grid[[0, -1]]
        states = states[[0, -1]]
        deriv = deriv[[0, -1]]
    return SampledFunction(grid, states, deriv)
