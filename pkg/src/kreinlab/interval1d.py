"""Exact 1D continuum testbed: A u = -(p u')' + q u on a finite interval.

Trace conventions (interior normal): gamma u = (u(x0), u(x1)) and
chi u = ((p u')(x0), -(p u')(x1)).  With these signs the surface pairing in
the Green identity is the plain dot product on R^2, the flat-Laplacian
boundary map at spectral parameter 0 is [[-1, 1], [1, -1]], and the
difference map Q^mu grows as mu decreases.

The propagation engine integrates the first-order system for (y, p y')
with a fourth-order commutator-corrected midpoint (Magnus) step.  Its
error constant is governed by the variation of the coefficients, not by
the spectral parameter, so step counts stay flat across large windows;
step-halving verification picks the count.
"""

from dataclasses import dataclass

import numpy as np

from . import constants
from .errors import ConvergenceError, NumericError, SingularSolveError
from .numkernel import SampledFunction, simpson_grid
from .numkernel.eigen import SymMatrix
from .numkernel.propagate import magnus_sl

_SQRT3_6 = np.sqrt(3.0) / 6.0
_RENORM_EVERY = 16


# ----------------------------------------------------------------------
# propagation engine


class _SLEngine:
    """Batched fundamental-matrix propagation for -(p y')' + (q - lam) y = 0."""

    def __init__(self, p, q, x0, x1):
        self.p = p
        self.q = q
        self.x0 = float(x0)
        self.x1 = float(x1)
        self._node_cache = {}

    def _nodes(self, nsteps, backward):
        key = (nsteps, backward)
        hit = self._node_cache.get(key)
        if hit is not None:
            return hit
        a, b = (self.x1, self.x0) if backward else (self.x0, self.x1)
        h = (b - a) / nsteps
        i = np.arange(nsteps)
        g1 = a + h * (i + 0.5 - _SQRT3_6)
        g2 = a + h * (i + 0.5 + _SQRT3_6)
        grid = a + h * np.arange(nsteps + 1)
        vals = (
            h,
            np.ascontiguousarray(1.0 / (np.asarray(self.p(g1), float) * np.ones_like(g1))),
            np.ascontiguousarray(1.0 / (np.asarray(self.p(g2), float) * np.ones_like(g2))),
            np.ascontiguousarray(np.asarray(self.q(g1), float) * np.ones_like(g1)),
            np.ascontiguousarray(np.asarray(self.q(g2), float) * np.ones_like(g2)),
            grid,
        )
        if len(self._node_cache) < 64:
            self._node_cache[key] = vals
        return vals

    def propagate(self, lams, nsteps, y0, backward=False, record=False,
                  renorm=False):
        """Propagate states y0 (B, 2, k) across the interval.

        Returns (Y, logscale) or, when record is set,
        (grid_ascending, states (n+1, B, 2, k), logscale (n+1, B)).
        """
        h, b1, b2, q1, q2, grid = self._nodes(nsteps, backward)
        lams = np.atleast_1d(np.asarray(lams, dtype=float)).ravel()
        y = np.broadcast_to(np.asarray(y0, float),
                            lams.shape + np.shape(y0)[-2:]).copy()
        logs = np.zeros(lams.shape)
        states = logtrail = None
        if record:
            states = np.empty((nsteps + 1,) + y.shape)
            states[0] = y
            logtrail = np.zeros((nsteps + 1,) + lams.shape)
        magnus_sl(b1, b2, q1, q2, h, np.ascontiguousarray(lams), y, logs,
                  _RENORM_EVERY if renorm else 0, states, logtrail)
        if record:
            if backward:
                return grid[::-1].copy(), states[::-1].copy(), logtrail[::-1].copy()
            return grid, states, logtrail
        return y, logs

    def fundamental_matrices(self, lams, nsteps):
        """Endpoint fundamental matrix columns [(1,0), (0, p(x0))] states (y, py')."""
        y0 = np.array([[1.0, 0.0], [0.0, float(self.p(self.x0))]])
        y, _ = self.propagate(lams, nsteps, y0)
        return y

    def verified_nsteps(self, lam_extreme, tol=constants.ODE_REL_TOL,
                        renorm=True):
        """Step count whose halving no longer moves the endpoint (relative).

        The commutator-corrected step is exact for constant coefficients,
        so the count stays at its floor there and climbs only with
        coefficient variation.  Results are cached per lambda decade.
        """
        lam = float(lam_extreme)
        key = ("vn", int(np.ceil(np.log2(abs(lam) + 2.0))), np.sign(lam))
        hit = self._node_cache.get(key)
        if hit is not None:
            return hit
        n = 256
        y0 = np.array([[1.0, 0.0], [0.0, float(self.p(self.x0))]])
        prev, lp = self.propagate(lam, n, y0, renorm=renorm)
        while True:
            n *= 2
            if n > constants.ODE_MAX_STEPS:
                raise ConvergenceError("propagation step budget exceeded")
            cur, lc = self.propagate(lam, n, y0, renorm=renorm)
            scale = float(np.max(np.abs(cur)))
            diff = float(np.max(np.abs(cur - prev * np.exp(lp[0] - lc[0]))))
            if diff <= tol * max(scale, 1e-300):
                self._node_cache[key] = n
                return n
            prev, lp = cur, lc


def _refine_batched(det_fn, lo, hi, flo, fhi, rtol, max_iter=90):
    """Vectorized safeguarded secant/bisection on an array of brackets.

    After the width criterion is met, two further secant rounds polish
    simple roots toward machine precision.
    """
    lo = lo.copy(); hi = hi.copy(); flo = flo.copy(); fhi = fhi.copy()
    for _ in range(max_iter):
        width = hi - lo
        scale = np.maximum(1.0, np.maximum(np.abs(lo), np.abs(hi)))
        live = width > rtol * scale
        if not live.any():
            break
        denom = fhi - flo
        mid = 0.5 * (lo + hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            sec = hi - fhi * (hi - lo) / denom
        x = np.where((denom != 0) & (sec > lo) & (sec < hi), sec, mid)
        x = np.where(live, x, lo)
        fx = det_fn(x)
        left = np.sign(fx) == np.sign(flo)
        lo = np.where(live & left, x, lo)
        flo = np.where(live & left, fx, flo)
        hi = np.where(live & ~left, x, hi)
        fhi = np.where(live & ~left, fx, fhi)
    best = 0.5 * (lo + hi)
    for _ in range(2):
        denom = fhi - flo
        with np.errstate(divide="ignore", invalid="ignore"):
            sec = hi - fhi * (hi - lo) / denom
        x = np.where((denom != 0) & (sec >= lo) & (sec <= hi),
                     sec, 0.5 * (lo + hi))
        fx = det_fn(x)
        best = x
        left = np.sign(fx) == np.sign(flo)
        strict = (x > lo) & (x < hi)
        lo = np.where(strict & left, x, lo)
        flo = np.where(strict & left, fx, flo)
        hi = np.where(strict & ~left, x, hi)
        fhi = np.where(strict & ~left, fx, fhi)
    return best


def _scan_brackets(det_fn, lam_grid):
    vals = det_fn(lam_grid)
    sign = np.sign(vals)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    return lam_grid[flips], lam_grid[flips + 1], vals[flips], vals[flips + 1]


# ----------------------------------------------------------------------
# problem record and domain types


class SturmLiouvilleProblem:
    """Coefficients (p, q) on (x0, x1) with a positivity shift.

    The shift is the constant added to q so that the first Dirichlet
    eigenvalue is at least 1; it is computed at construction (the shift
    acts affinely on the spectrum, so the required value is exact) and
    recorded on the instance.  All operations refer to the shifted
    operator.
    """

    def __init__(self, p, q, interval, shift=None, name=""):
        self.p = p if callable(p) else (lambda x, _c=float(p): _c * np.ones_like(np.asarray(x, float)))
        self.q_raw = q if callable(q) else (lambda x, _c=float(q): _c * np.ones_like(np.asarray(x, float)))
        self.x0, self.x1 = float(interval[0]), float(interval[1])
        if not self.x0 < self.x1:
            raise ValueError("empty interval")
        self.name = name
        xs = np.linspace(self.x0, self.x1, 65)
        pvals = np.asarray(self.p(xs), float) * np.ones_like(xs)
        self.p_min = float(np.min(pvals))
        if self.p_min <= 0:
            raise ValueError("p must be strictly positive on the interval")
        self.q_min_sample = float(np.min(np.asarray(self.q_raw(xs), float) * np.ones_like(xs)))
        self._engine = _SLEngine(self.p, self.q_raw, self.x0, self.x1)
        lam1_raw = self._first_dirichlet_raw()
        if shift is None:
            shift = max(0.0, constants.SHIFT_TARGET_LAMBDA1 - lam1_raw)
        self.shift = float(shift)
        self.lambda1 = lam1_raw + self.shift
        if self.lambda1 <= 0:
            raise ValueError("Dirichlet form not positive after shift")
        self._cache = {}

    # raw-vs-shifted spectral parameter: (A + shift - lam) = (A_raw - (lam - shift))
    def _lam_raw(self, lam):
        return np.asarray(lam, dtype=float) - self.shift

    @property
    def length(self):
        return self.x1 - self.x0

    def _first_dirichlet_raw(self):
        eng = self._engine
        lo = self.q_min_sample - 1.0
        width = max(16.0 * self.p_min * np.pi ** 2 / self.length ** 2, 64.0)
        for _ in range(32):
            hi = lo + width
            nsteps = eng.verified_nsteps(max(abs(lo), abs(hi)))
            npts = max(64, int(16 * (np.sqrt(abs(hi)) + np.sqrt(abs(lo)))))
            grid = np.linspace(lo, hi, npts)
            det = lambda lam: eng.fundamental_matrices(lam, nsteps)[..., 0, 1]
            blo, bhi, flo, fhi = _scan_brackets(det, grid)
            if len(blo):
                root = _refine_batched(det, blo[:1], bhi[:1], flo[:1], fhi[:1],
                                       constants.ROOT_RTOL)
                return float(root[0])
            lo = hi
        raise ConvergenceError("could not locate the first Dirichlet eigenvalue")

    # cached boundary objects of the shifted operator at mu = 0
    def dtn0(self):
        if "dtn0" not in self._cache:
            self._cache["dtn0"] = dtn_matrix(self, 0.0)
        return self._cache["dtn0"]

    def gram0(self):
        if "gram0" not in self._cache:
            self._cache["gram0"] = gram_matrix(self, 0.0)
        return self._cache["gram0"]

    def family0(self):
        if "fam0" not in self._cache:
            self._cache["fam0"] = mu_family(self, 0.0)
        return self._cache["fam0"]

    def __repr__(self):
        tag = self.name or f"({self.x0},{self.x1})"
        return f"SturmLiouvilleProblem({tag}, shift={self.shift:g})"


def unit_problem():
    """The flat preset: p = 1, q = 0 on (0, 1); shift is 0."""
    return SturmLiouvilleProblem(1.0, 0.0, (0.0, 1.0), name="interval-unit")


@dataclass(frozen=True)
class TraceData:
    """gamma = (u(x0), u(x1)); chi = ((p u')(x0), -(p u')(x1))."""

    gamma: np.ndarray
    chi: np.ndarray


def trace_data(problem, sf: SampledFunction) -> TraceData:
    if sf.deriv is None:
        raise ValueError("trace extraction needs stored derivatives")
    w0 = float(problem.p(problem.x0)) * sf.deriv[0]
    w1 = float(problem.p(problem.x1)) * sf.deriv[-1]
    return TraceData(
        gamma=np.array([sf.values[0], sf.values[-1]], float),
        chi=np.array([w0, -w1], float),
    )


@dataclass(frozen=True)
class DtnMatrix:
    """2x2 Dirichlet-to-Neumann matrix at spectral parameter mu.

    Construction validates the symmetry of the raw column data (symmetry
    of A makes P^mu symmetric up to solver error) and stores the
    symmetrized matrix.
    """

    mu: float
    p: np.ndarray

    def __post_init__(self):
        asym = np.max(np.abs(self.p - self.p.T))
        scale = max(1.0, np.max(np.abs(self.p)))
        if asym > constants.DTN_SYMMETRY_TOL * scale:
            raise NumericError(f"DtN matrix asymmetric beyond tolerance ({asym:.2e})")
        object.__setattr__(self, "p", 0.5 * (self.p + self.p.T))


@dataclass(frozen=True)
class MuFamily:
    """mu-harmonic basis k_i with unit traces, its Gram matrix and DtN."""

    mu: float
    k1: SampledFunction
    k2: SampledFunction
    gram: np.ndarray
    dtn: DtnMatrix


# ----------------------------------------------------------------------
# operations


def fundamental_pair(problem, lam, nsteps=None):
    """Solutions y1, y2 of (A - lam) y = 0 with (y, y')(x0) = (1,0), (0,1)."""
    eng = problem._engine
    lraw = float(problem._lam_raw(lam))
    if nsteps is None:
        nsteps = eng.verified_nsteps(lraw)
    nsteps = nsteps + nsteps % 2
    y0 = np.array([[1.0, 0.0], [0.0, float(problem.p(problem.x0))]])
    grid, states, _ = eng.propagate(lraw, nsteps, y0, record=True)
    pvals = np.asarray(problem.p(grid), float) * np.ones_like(grid)
    out = []
    for col in range(2):
        vals = states[:, 0, 0, col]
        derivs = states[:, 0, 1, col] / pvals
        out.append(SampledFunction(grid, vals.copy(), derivs.copy()))
    return out[0], out[1]


def _dirichlet_det_factory(problem, nsteps):
    eng = problem._engine

    def det(lams):
        y = eng.fundamental_matrices(problem._lam_raw(lams), nsteps)
        return y[..., 0, 1]

    return det


def dirichlet_eigenvalues(problem, count, rtol=constants.ROOT_RTOL):
    """First `count` Dirichlet eigenvalues of the (shifted) operator."""
    if count < 1:
        raise ValueError("count must be at least 1")
    eng = problem._engine
    found = []
    om_lo = 0.0
    om_width = max(8.0, (count + 2) * np.pi * np.sqrt(1.0 / problem.p_min) / problem.length)
    guard = 0
    while len(found) < count and guard < 24:
        guard += 1
        om_hi = om_lo + om_width
        lam_hi = om_hi ** 2
        nsteps = eng.verified_nsteps(problem._lam_raw(lam_hi))
        det = _dirichlet_det_factory(problem, nsteps)
        oms = np.linspace(om_lo, om_hi, max(64, int(16 * om_width)))
        grid = oms ** 2
        grid = grid[grid > 1e-9]
        blo, bhi, flo, fhi = _scan_brackets(det, grid)
        if len(blo):
            roots = _refine_batched(det, blo, bhi, flo, fhi, rtol)
            found.extend(float(r) for r in roots)
        om_lo = om_hi
    if len(found) < count:
        raise ConvergenceError("root-scan budget exceeded for Dirichlet eigenvalues")
    return np.array(sorted(found)[:count])


def _one_sided_solution(problem, mu, backward, nsteps=None):
    """Solution vanishing at the far endpoint, normalized to 1 at the near one.

    backward=False: vanishes at x0 (grows forward);
    backward=True:  vanishes at x1 (grows toward x0).
    Returns (SampledFunction with derivs, w-values on the grid).
    """
    eng = problem._engine
    lraw = float(problem._lam_raw(mu))
    if nsteps is None:
        k = np.sqrt(abs(lraw) + 1.0)
        nsteps = max(eng.verified_nsteps(lraw), 1024,
                     int(16 * k * problem.length))
    nsteps = nsteps + nsteps % 2
    pend = float(problem.p(problem.x1 if backward else problem.x0))
    sgn = -1.0 if backward else 1.0
    y0 = np.array([[0.0], [sgn * pend]])
    grid, states, logs = eng.propagate(lraw, nsteps, y0, backward=backward,
                                       record=True, renorm=True)
    # normalize by the value at the near endpoint (x1 for forward shots)
    end_idx = 0 if backward else -1
    yend = states[end_idx, 0, 0, 0]
    lend = logs[end_idx, 0]
    scale_floor = np.max(np.abs(states[:, 0, 0, 0]))
    if abs(yend) <= 1e-12 * max(scale_floor, 1e-300):
        raise SingularSolveError(
            f"mu={mu} is (numerically) a Dirichlet eigenvalue; Poisson solve singular")
    rescale = np.exp(logs[:, 0] - lend) / yend
    pvals = np.asarray(problem.p(grid), float) * np.ones_like(grid)
    vals = states[:, 0, 0, 0] * rescale
    wvals = states[:, 0, 1, 0] * rescale
    sf = SampledFunction(grid, vals, wvals / pvals)
    return sf, wvals


def _one_sided_chi(problem, mu, backward):
    """chi of the normalized one-sided solution, endpoint data only.

    Ratios are formed in log scale so that exponentially small entries
    underflow to zero instead of overflowing the propagation.
    """
    eng = problem._engine
    lraw = float(problem._lam_raw(mu))
    nsteps = eng.verified_nsteps(lraw)
    pend = float(problem.p(problem.x1 if backward else problem.x0))
    sgn = -1.0 if backward else 1.0
    y0 = np.array([[0.0], [sgn * pend]])
    yfar, logs = eng.propagate(lraw, nsteps, y0, backward=backward, renorm=True)
    yv = float(yfar[0, 0, 0])
    wv = float(yfar[0, 1, 0])
    lg = float(logs[0])
    if abs(yv) <= 1e-13 * max(abs(wv), 1.0):
        raise SingularSolveError(
            f"mu={mu} is (numerically) a Dirichlet eigenvalue; Poisson solve singular")
    # near-endpoint flux is the initial condition, scaled down by e^{-log}
    near_flux = np.sign(sgn * pend / yv) * np.exp(
        np.log(abs(pend)) - lg - np.log(abs(yv)))
    if backward:
        # k1: chi = ((p k1')(x0), -(p k1')(x1)) = (w(x0)/y(x0), -near_flux)
        return np.array([wv / yv, -near_flux])
    # k2: chi = ((p k2')(x0), -(p k2')(x1)) = (near_flux, -w(x1)/y(x1))
    return np.array([near_flux, -wv / yv])


def mu_family(problem, mu, nsteps=None) -> MuFamily:
    """Harmonic basis k1, k2 (traces e1, e2), Gram matrix, and DtN at mu."""
    k1, w1 = _one_sided_solution(problem, mu, backward=True, nsteps=nsteps)
    k2, w2 = _one_sided_solution(problem, mu, backward=False, nsteps=nsteps)
    # chi k = ((p k')(x0), -(p k')(x1))
    pmat = np.array([
        [w1[0], w2[0]],
        [-w1[-1], -w2[-1]],
    ])
    dtn = DtnMatrix(mu=float(mu), p=pmat)
    if len(k1.grid) != len(k2.grid):
        raise NumericError("harmonic basis grids disagree")
    g11 = simpson_grid(k1.values * k1.values, k1.grid)
    g12 = simpson_grid(k1.values * k2.values, k1.grid)
    g22 = simpson_grid(k2.values * k2.values, k2.grid)
    gram = np.array([[g11, g12], [g12, g22]])
    try:
        np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise NumericError("harmonic Gram matrix not SPD") from exc
    return MuFamily(mu=float(mu), k1=k1, k2=k2, gram=gram, dtn=dtn)


def poisson_solve(problem, mu, phi) -> SampledFunction:
    """u with (A - mu) u = 0 and gamma u = phi; linear in phi."""
    fam = mu_family(problem, mu)
    vals = phi[0] * fam.k1.values + phi[1] * fam.k2.values
    derivs = phi[0] * fam.k1.deriv + phi[1] * fam.k2.deriv
    return SampledFunction(fam.k1.grid, vals, derivs)


def dtn_matrix(problem, mu) -> DtnMatrix:
    """P^mu: columns are chi applied to the mu-harmonic basis."""
    chi1 = _one_sided_chi(problem, mu, backward=True)
    chi2 = _one_sided_chi(problem, mu, backward=False)
    pmat = np.column_stack([chi1, chi2])
    return DtnMatrix(mu=float(mu), p=pmat)


def gram_matrix(problem, mu) -> np.ndarray:
    """L2 Gram matrix of the mu-harmonic basis (fixes the boundary norm)."""
    return mu_family(problem, mu).gram


def resolvent_dirichlet(problem, mu, f, phi=(0.0, 0.0), nsteps=None) -> SampledFunction:
    """Solve (A - mu) u = f with gamma u = phi by variation of parameters."""
    fcall = f if callable(f) else f.__call__
    eng = problem._engine
    lraw = float(problem._lam_raw(mu))
    if nsteps is None:
        nsteps = max(eng.verified_nsteps(lraw), 2048)
    nsteps = nsteps + nsteps % 2
    y1, y2 = fundamental_pair(problem, mu, nsteps=nsteps)
    grid = y1.grid
    wr = float(problem.p(problem.x0)) * (
        y1.values[0] * y2.deriv[0] - y1.deriv[0] * y2.values[0])
    fv = np.asarray(fcall(grid), float) * np.ones_like(grid)
    i1 = _cumulative_simpson(y1.values * fv / wr, grid)
    i2 = _cumulative_simpson(y2.values * fv / wr, grid)
    up = y1.values * i2 - y2.values * i1
    upd = y1.deriv * i2 - y2.deriv * i1  # the integral terms cancel
    # boundary correction: u = up + c1 y1 + c2 y2, gamma u = phi
    det = y2.values[-1]
    if abs(det) <= 1e-12 * max(np.max(np.abs(y2.values)), 1e-300):
        raise SingularSolveError("mu is a Dirichlet eigenvalue; resolvent solve singular")
    c1 = phi[0]
    c2 = (phi[1] - up[-1] - c1 * y1.values[-1]) / det
    vals = up + c1 * y1.values + c2 * y2.values
    deriv = upd + c1 * y1.deriv + c2 * y2.deriv
    vals[0] = phi[0]
    vals[-1] = phi[1]
    return SampledFunction(grid, vals, deriv)


def _cumulative_simpson(values, grid):
    """Cumulative integral on an equispaced grid, fourth order."""
    n = len(grid) - 1
    h = (grid[-1] - grid[0]) / n
    out = np.empty_like(values)
    out[0] = 0.0
    f = values
    # odd points by the 5-8-(-1) rule, even points by plain Simpson
    for i in range(0, n - 1, 2):
        out[i + 1] = out[i] + h / 12.0 * (5 * f[i] + 8 * f[i + 1] - f[i + 2])
        out[i + 2] = out[i] + h / 3.0 * (f[i] + 4 * f[i + 1] + f[i + 2])
    if n % 2 == 1:
        out[n] = out[n - 1] + 0.5 * h * (f[n - 1] + f[n])
    return out


def operator_residual(problem, sf: SampledFunction, mu, f=None):
    """Max interior residual of (A - mu) u - f using the stored flux p u'."""
    grid = sf.grid
    h = grid[1] - grid[0]
    pvals = np.asarray(problem.p(grid), float) * np.ones_like(grid)
    qvals = np.asarray(problem.q_raw(grid), float) * np.ones_like(grid) + problem.shift
    w = pvals * sf.deriv
    # fourth-order central difference of the flux
    dw = (-w[4:] + 8.0 * w[3:-1] - 8.0 * w[1:-3] + w[:-4]) / (12.0 * h)
    res = -dw + (qvals[2:-2] - mu) * sf.values[2:-2]
    if f is not None:
        fcall = f if callable(f) else f.__call__
        res = res - np.asarray(fcall(grid[2:-2]), float)
    return float(np.max(np.abs(res)))


def greens_identity_residual(problem, u: SampledFunction, v: SampledFunction,
                             lam_u, lam_v):
    """Relative defect of the surface-pairing identity
    (Au,v) - (u,Av) = (chi u, gamma v) - (gamma u, chi v)
    for (A - lam) null solutions u, v; normalized by the magnitude of the
    boundary data entering the pairing."""
    uv = simpson_grid(u.values * v.values, u.grid)
    lhs = (lam_u - lam_v) * uv
    tu = trace_data(problem, u)
    tv = trace_data(problem, v)
    rhs = float(tu.chi @ tv.gamma - tu.gamma @ tv.chi)
    scale = max(1.0,
                float(np.linalg.norm(tu.chi) * np.linalg.norm(tv.gamma)),
                float(np.linalg.norm(tu.gamma) * np.linalg.norm(tv.chi)),
                abs(lhs))
    return abs(lhs - rhs) / scale
