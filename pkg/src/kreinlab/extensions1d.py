"""Realizations of A from boundary conditions and the Krein-like family.

A realization is fixed by a projection pi onto the admitted trace subspace
X and a symmetric matrix L supported on X; its spectrum is located by a
shooting determinant built from the fundamental pair.  The Krein-like
member with parameter a has pi = I and L = a * M_Z0, with M_Z0 the Gram
matrix of the harmonic basis (that Gram also fixes the boundary-space
norm: every pencil minimum here is taken against it).

Two further pipelines produce the same spectra independently: the clamped
fourth-order determinant for a = 0, and the sixth-order reduction with the
lambda-dependent third trace condition for general a.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import constants
from .errors import NumericError, SingularSolveError
from .interval1d import (
    _refine_batched,
    _scan_brackets,
    dtn_matrix,
    fundamental_pair,
    mu_family,
    resolvent_dirichlet,
    trace_data,
)
from .numkernel import FitResult, SampledFunction, loglog_fit, simpson_grid
from .numkernel.eigen import gen_eigen
from .numkernel.propagate import rk4_ho

_EYE2 = np.eye(2)


# ----------------------------------------------------------------------
# boundary condition specifications


class BoundaryConditionSpec:
    """Projection pi onto X plus a symmetric matrix L acting on X.

    rank(pi) = 0 is the pure Dirichlet realization; rank 2 admits every
    trace.  L is stored as pi L pi (symmetrized), so it never acts outside
    the admitted subspace.
    """

    def __init__(self, pi, l):
        pi = np.asarray(pi, dtype=float)
        l = np.asarray(l, dtype=float)
        if pi.shape != (2, 2) or l.shape != (2, 2):
            raise ValueError("pi and L must be 2x2")
        if np.max(np.abs(pi - pi.T)) > 1e-12 or np.max(np.abs(pi @ pi - pi)) > 1e-12:
            raise ValueError("pi must be an orthogonal projection")
        self.pi = 0.5 * (pi + pi.T)
        self.l = self.pi @ (0.5 * (l + l.T)) @ self.pi
        self.rank = int(round(np.trace(self.pi)))

    def trace_basis(self):
        """Orthonormal columns spanning X (2 x rank)."""
        if self.rank == 0:
            return np.zeros((2, 0))
        w, v = np.linalg.eigh(self.pi)
        return v[:, w > 0.5]

    def __repr__(self):
        return f"BoundaryConditionSpec(rank={self.rank})"


class KreinSpec(BoundaryConditionSpec):
    """Full-trace spec with L = a * M_Z0; a = 0 is the soft extension."""

    def __init__(self, a, gram0):
        super().__init__(_EYE2, float(a) * gram0)
        self.a = float(a)

    def __repr__(self):
        return f"KreinSpec(a={self.a:g})"


def dirichlet_bcspec() -> BoundaryConditionSpec:
    return BoundaryConditionSpec(np.zeros((2, 2)), np.zeros((2, 2)))


def krein_bcspec(problem, a) -> KreinSpec:
    return KreinSpec(a, problem.gram0())


@dataclass(frozen=True)
class RealizationSpectrum:
    eigenvalues: np.ndarray
    method: str
    certificate: float | None = None

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if np.any(np.diff(ev) < 0):
            raise ValueError("eigenvalues must be ascending")
        if self.certificate is not None and len(ev) \
                and self.certificate > ev[0] + 1e-9 * max(1.0, abs(ev[0])):
            raise ValueError("certificate exceeds the smallest eigenvalue")
        object.__setattr__(self, "eigenvalues", ev)


# ----------------------------------------------------------------------
# shooting pipeline


def _bc_reduction(problem, spec):
    """Constant matrices (A0, pi) with M(lam) = A0 Gamma(lam) + pi X(lam)."""
    p0 = problem.dtn0().p
    a0 = (_EYE2 - spec.pi) - spec.pi @ p0 - spec.l
    return a0, spec.pi


def _shooting_det_factory(problem, spec, nsteps):
    eng = problem._engine
    a0, pi = _bc_reduction(problem, spec)
    px0 = float(problem.p(problem.x0))

    def det(lams):
        lams = np.atleast_1d(np.asarray(lams, dtype=float))
        y = eng.fundamental_matrices(problem._lam_raw(lams), nsteps)
        gam = np.empty(lams.shape + (2, 2))
        gam[..., 0, 0] = 1.0
        gam[..., 0, 1] = 0.0
        gam[..., 1, 0] = y[..., 0, 0]
        gam[..., 1, 1] = y[..., 0, 1]
        chi = np.empty_like(gam)
        chi[..., 0, 0] = 0.0
        chi[..., 0, 1] = px0
        chi[..., 1, 0] = -y[..., 1, 0]
        chi[..., 1, 1] = -y[..., 1, 1]
        m = a0 @ gam + pi @ chi
        return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]

    return det


def char_determinant(problem, spec, lam) -> float:
    """Entire-in-lambda determinant whose zeros are the realization spectrum."""
    eng = problem._engine
    nsteps = eng.verified_nsteps(float(problem._lam_raw(lam)))
    det = _shooting_det_factory(problem, spec, nsteps)
    return float(det(lam)[0])


def _window_roots(det_for, window, density, rtol):
    """Sign-change roots on (lo, hi), scanning in sqrt-lambda coordinates."""
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError("window must be increasing")
    roots = []
    pieces = []
    if lo < 0:
        pieces.append((lo, min(hi, -1e-12), True))
    if hi > 0:
        pieces.append((max(lo, 1e-12), hi, False))
    for plo, phi, negative in pieces:
        if negative:
            s_hi = math.sqrt(-plo)
            s_lo = math.sqrt(-phi)
            ss = np.linspace(s_lo, s_hi, max(32, int(density * (s_hi - s_lo)) + 2))
            grid = -np.flip(ss) ** 2
            lam_extreme = plo
        else:
            w_lo = math.sqrt(plo)
            w_hi = math.sqrt(phi)
            ws = np.linspace(w_lo, w_hi, max(32, int(density * (w_hi - w_lo)) + 2))
            grid = ws ** 2
            lam_extreme = phi
        det = det_for(lam_extreme)
        blo, bhi, flo, fhi = _scan_brackets(det, grid)
        if len(blo):
            refined = _refine_batched(det, blo, bhi, flo, fhi, rtol)
            roots.extend(float(r) for r in refined)
    return np.array(sorted(roots))


def realization_eigenvalues(problem, spec, window, density=16,
                            rtol=constants.ROOT_RTOL,
                            certificate=None) -> RealizationSpectrum:
    """All shooting-determinant roots in the window, ascending.

    An externally certified lower bound can be attached; construction
    validates it against the smallest root found.
    """
    eng = problem._engine

    def det_for(lam_extreme):
        nsteps = eng.verified_nsteps(float(problem._lam_raw(lam_extreme)))
        det = _shooting_det_factory(problem, spec, nsteps)
        return det

    # degenerate-spec guard: the determinant must not vanish identically
    lo, hi = float(window[0]), float(window[1])
    probe = det_for(hi)(np.linspace(lo + 1e-6, hi, 17))
    if np.max(np.abs(probe)) == 0.0:
        raise NumericError("identically-zero determinant: degenerate boundary spec")
    ev = _window_roots(det_for, window, density, rtol)
    return RealizationSpectrum(ev, method="shooting", certificate=certificate)


# ----------------------------------------------------------------------
# T^mu forms, certificates, G^mu scan


@dataclass(frozen=True)
class TmuForm:
    l_mu: np.ndarray
    gram: np.ndarray
    value: float


def tmu_form(problem, spec, mu) -> TmuForm:
    """L^mu = L + pi (P^0 - P^mu) pi restricted to X, with the fixed Gram.

    The boundary norm is the mu = 0 harmonic Gram for every mu; the sign
    of the pencil minimum (all that the certificate rules use) does not
    depend on that choice.
    """
    if mu >= problem.lambda1:
        raise ValueError("tmu_form needs mu below the Dirichlet bottom")
    u = spec.trace_basis()
    if u.shape[1] == 0:
        return TmuForm(np.zeros((0, 0)), np.zeros((0, 0)), math.inf)
    qmu = problem.dtn0().p - dtn_matrix(problem, mu).p
    l_mu = u.T @ (spec.l + spec.pi @ qmu @ spec.pi) @ u
    gram_x = u.T @ problem.gram0() @ u
    value = float(gen_eigen(l_mu, gram_x)[0])
    return TmuForm(l_mu, gram_x, value)


def birman_bound(m_t: float, m_a_gamma: float) -> float:
    """Lower bound m(T) m(A_gamma) / (m(T) + m(A_gamma)); needs m(T) > -m(A_gamma)."""
    if not m_t > -m_a_gamma:
        raise ValueError("birman_bound needs m(T) > -m(A_gamma)")
    if math.isinf(m_t):
        return m_a_gamma
    return m_t * m_a_gamma / (m_t + m_a_gamma)


def lower_bound_certificate(problem, spec, scan=None, max_doublings=40):
    """Certified lower bound: a mu with m(T^mu) >= 0 (None if not found).

    Default scan: when m(T^0) >= 0 the grid walks up toward the Dirichlet
    bottom (including the Birman point) and the largest passing point is
    returned; otherwise it descends geometrically and the first passing
    point (smallest |mu|) is returned.
    """
    if scan is not None:
        passing = [mu for mu in scan if tmu_form(problem, spec, mu).value >= 0.0]
        if not passing:
            return None
        return float(min(passing, key=abs))
    m_t0 = tmu_form(problem, spec, 0.0).value
    lam1 = problem.lambda1
    if m_t0 >= 0.0:
        cands = [0.0]
        if m_t0 > -lam1:
            cands.append(birman_bound(min(m_t0, 1e300), lam1))
        cands.extend(lam1 * (1.0 - 2.0 ** -k) for k in range(1, 24))
        best = None
        for mu in sorted(set(cands)):
            if not mu < lam1 * (1.0 - 1e-12):
                continue
            if tmu_form(problem, spec, mu).value >= 0.0:
                best = mu if best is None else max(best, mu)
        return best
    g = max(1.0, abs(m_t0) / 16.0)
    for k in range(max_doublings):
        mu = -g * 2.0 ** k
        if tmu_form(problem, spec, mu).value >= 0.0:
            return float(mu)
    return None


@dataclass(frozen=True)
class GmuScan:
    mus: np.ndarray
    values: np.ndarray
    fit: FitResult | None


def gmu_scan(problem, mus, fit_decades=1.0) -> GmuScan:
    """m(G^mu) = min pencil (P^0 - P^mu, M_Z0) per mu, plus a power-law fit.

    The fit runs over the largest `fit_decades` decades of |mu| (all
    points when fewer than three fall inside).
    """
    p0 = problem.dtn0().p
    g0 = problem.gram0()
    mus = np.asarray(list(mus), dtype=float)
    vals = np.empty_like(mus)
    for i, mu in enumerate(mus):
        if mu == 0.0:
            vals[i] = 0.0
            continue
        if mu >= problem.lambda1:
            raise ValueError("gmu_scan needs mu < m(A_gamma)")
        q = p0 - dtn_matrix(problem, mu).p
        vals[i] = gen_eigen(q, g0)[0]
    fit = None
    usable = (np.abs(mus) > 0) & (vals > 0)
    if np.count_nonzero(usable) >= 3:
        t = np.abs(mus[usable])
        hi = float(np.max(t))
        lo = hi / 10.0 ** fit_decades
        if np.count_nonzero((t >= lo) & (t <= hi)) < 3:
            lo = float(np.min(t))
        fit = loglog_fit(t, vals[usable], (lo, hi))
    return GmuScan(mus, vals, fit)


def dtn_difference_check(problem, mu) -> float:
    """Max-entry residual of (P^0 - P^mu) + mu * [(k_j^0, k_i^mu)]."""
    if mu == 0.0:
        return 0.0
    eng = problem._engine
    n_mu = max(eng.verified_nsteps(float(problem._lam_raw(mu))), 1024,
               int(16 * math.sqrt(abs(mu) + 1.0) * problem.length))
    n_mu += n_mu % 2
    fam_mu = mu_family(problem, mu, nsteps=n_mu)
    fam_0 = mu_family(problem, 0.0, nsteps=n_mu)
    q = problem.dtn0().p - fam_mu.dtn.p
    cross = np.empty((2, 2))
    ks_mu = (fam_mu.k1, fam_mu.k2)
    ks_0 = (fam_0.k1, fam_0.k2)
    for i in range(2):
        for j in range(2):
            cross[i, j] = simpson_grid(ks_0[j].values * ks_mu[i].values,
                                       ks_mu[i].grid)
    return float(np.max(np.abs(q + mu * cross)))


# ----------------------------------------------------------------------
# Krein resolvent identity


def krein_resolvent_check(problem, spec, f) -> float:
    """Relative sup-gap between the direct solve of A u = f under the
    boundary condition and the resolvent-sum route through the harmonic
    subspace."""
    fcall = f if callable(f) else f.__call__
    # direct two-point solve at lambda = 0
    y1, y2 = fundamental_pair(problem, 0.0)
    u_part = resolvent_dirichlet(problem, 0.0, fcall)
    a0, pi = _bc_reduction(problem, spec)
    px0 = float(problem.p(problem.x0))
    gam = np.array([[1.0, 0.0], [y1.values[-1], y2.values[-1]]])
    chi = np.array([
        [0.0, px0],
        [-float(problem.p(problem.x1)) * y1.deriv[-1],
         -float(problem.p(problem.x1)) * y2.deriv[-1]],
    ])
    m0 = a0 @ gam + pi @ chi
    tp = trace_data(problem, u_part)
    rhs = -(a0 @ tp.gamma + pi @ tp.chi)
    try:
        coef = np.linalg.solve(m0, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSolveError("0 is an eigenvalue of the realization") from exc
    grid = u_part.grid
    u1 = u_part.values + coef[0] * y1(grid) + coef[1] * y2(grid)

    # resolvent route: A_gamma^{-1} f + K_U T^{-1} (coefficients)
    u2 = resolvent_dirichlet(problem, 0.0, fcall).values
    u_basis = spec.trace_basis()
    if u_basis.shape[1]:
        fam = problem.family0()
        kmat = np.column_stack([
            _resample(fam.k1, grid), _resample(fam.k2, grid)]) @ u_basis
        fv = np.asarray(fcall(grid), float) * np.ones_like(grid)
        b = np.array([simpson_grid(fv * kmat[:, j], grid)
                      for j in range(kmat.shape[1])])
        l_x = u_basis.T @ spec.l @ u_basis
        try:
            d = np.linalg.solve(l_x, b)
        except np.linalg.LinAlgError as exc:
            raise SingularSolveError("T is singular on X") from exc
        u2 = u2 + kmat @ d
    scale = max(float(np.max(np.abs(u1))), 1e-300)
    return float(np.max(np.abs(u1 - u2))) / scale


def _resample(sf: SampledFunction, grid):
    if len(sf.grid) == len(grid) and np.allclose(sf.grid, grid):
        return sf.values
    return sf(grid)


# ----------------------------------------------------------------------
# fourth- and sixth-order pipelines (RK4 on structured systems)


class _HigherOrderEngine:
    """RK4 propagation of the clamped A^2 and A^3 systems.

    State layouts (w = p v' convention for every derivative level):
      buckling:  (v, pv', g, pg')           with A g = lam g, g = A v
      reduction: (v, pv', g, pg', k, pk')   with A k = lam k, k = A^2 v
    """

    def __init__(self, problem):
        self.problem = problem
        self._cache = {}

    def _nodes(self, nsteps):
        hit = self._cache.get(nsteps)
        if hit is not None:
            return hit
        prob = self.problem
        h = prob.length / nsteps
        xs = prob.x0 + 0.5 * h * np.arange(2 * nsteps + 1)
        invp = np.ascontiguousarray(
            1.0 / (np.asarray(prob.p(xs), float) * np.ones_like(xs)))
        q = np.ascontiguousarray(
            np.asarray(prob.q_raw(xs), float) * np.ones_like(xs) + prob.shift)
        if len(self._cache) < 16:
            self._cache[nsteps] = (h, invp, q, xs)
        return h, invp, q, xs

    def propagate(self, lams, nsteps, y0, order, record=False, source=None):
        """order 2: buckling layout (dim 4); order 3: reduction (dim 6)."""
        h, invp, q, xs = self._nodes(nsteps)
        lams = np.atleast_1d(np.asarray(lams, dtype=float)).ravel()
        y = np.broadcast_to(np.asarray(y0, float),
                            lams.shape + np.shape(y0)).copy()
        src = None
        if source is not None:
            src = np.ascontiguousarray(
                np.asarray(source(xs), float) * np.ones_like(xs))
        states = None
        if record:
            states = np.empty((nsteps + 1,) + y.shape)
            states[0] = y
        rk4_ho(invp, q, h, np.ascontiguousarray(lams), y, order, src, states)
        if record:
            return xs[::2], states
        return y

    def verified_nsteps(self, lam_extreme, order, tol=1e-8):
        lam = float(lam_extreme)
        key = ("vn", order, int(np.ceil(np.log2(abs(lam) + 2.0))))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        dim = 4 if order == 2 else 6
        ncols = dim // 2
        # probe basis spread across the non-clamped rows
        y0 = np.zeros((dim, ncols))
        for c in range(ncols):
            y0[2 + c, c] = 1.0
        n = 512
        prev = self.propagate(lam, n, y0, order)
        while True:
            n *= 2
            if n > constants.ODE_MAX_STEPS:
                raise NumericError("higher-order propagation budget exceeded")
            cur = self.propagate(lam, n, y0, order)
            scale = max(float(np.max(np.abs(cur))), 1e-300)
            if float(np.max(np.abs(cur - prev))) <= tol * scale:
                self._cache[key] = n
                return n
            prev = cur


def _ho_engine(problem) -> _HigherOrderEngine:
    if "ho_engine" not in problem._cache:
        problem._cache["ho_engine"] = _HigherOrderEngine(problem)
    return problem._cache["ho_engine"]


def _buckling_det_factory(problem, nsteps):
    """Determinant from Richardson-extrapolated endpoints (orders 4 -> 6)."""
    eng = _ho_engine(problem)
    y0 = np.zeros((4, 2))
    y0[2, 0] = 1.0
    y0[3, 1] = 1.0

    def det(lams):
        yf = eng.propagate(lams, nsteps, y0, order=2)
        yc = eng.propagate(lams, nsteps // 2, y0, order=2)
        y = yf + (yf - yc) / 15.0
        return y[..., 0, 0] * y[..., 1, 1] - y[..., 0, 1] * y[..., 1, 0]

    return det


def buckling_eigenvalues(problem, count, density=16, rtol=constants.ROOT_RTOL):
    """First `count` roots of the clamped fourth-order determinant."""
    if count < 1:
        raise ValueError("count must be at least 1")
    eng = _ho_engine(problem)
    found = []
    om_lo = 1e-3
    om_width = max(8.0, (count + 3) * np.pi / problem.length)
    guard = 0
    while len(found) < count and guard < 24:
        guard += 1
        om_hi = om_lo + om_width
        n1 = eng.verified_nsteps(om_hi ** 2, order=2)
        roots = _window_roots(
            lambda lam_ex: _buckling_det_factory(problem, n1),
            (om_lo ** 2, om_hi ** 2), density, rtol)
        found.extend(float(r) for r in roots)
        om_lo = om_hi
    if len(found) < count:
        raise NumericError("scan budget exceeded for buckling eigenvalues")
    return np.array(sorted(found)[:count])


def _reduction_det_factory(problem, a, nsteps):
    """Reduction determinant, Richardson-extrapolated like the buckling one."""
    eng = _ho_engine(problem)
    y0 = np.zeros((6, 4))
    for c in range(4):
        y0[2 + c, c] = 1.0

    def det(lams):
        lams = np.atleast_1d(np.asarray(lams, dtype=float))
        yf = eng.propagate(lams, nsteps, y0, order=3)
        yc = eng.propagate(lams, nsteps // 2, y0, order=3)
        y = yf + (yf - yc) / 15.0
        m = np.empty(lams.shape + (4, 4))
        m[..., 0, :] = y[..., 0, :]
        m[..., 1, :] = y[..., 1, :]
        # (lam - a) k - lam^2 g at both endpoints; rows scaled by (lam - a)
        m[..., 2, :] = 0.0
        m[..., 2, 0] = -lams ** 2
        m[..., 2, 2] = lams - a
        m[..., 3, :] = (lams - a)[..., None] * y[..., 4, :] \
            - (lams ** 2)[..., None] * y[..., 2, :]
        return np.linalg.det(m)

    return det


def reduction_eigenvalues(problem, a, window, density=16,
                          rtol=constants.ROOT_RTOL):
    """Roots of the sixth-order reduction determinant on the window.

    A symmetric gap of half-width REDUCTION_POLE_GAP around lambda = a is
    excluded (the third trace condition has a pole there).
    """
    a = float(a)
    lo, hi = float(window[0]), float(window[1])
    gap = constants.REDUCTION_POLE_GAP
    pieces = []
    if lo < a < hi:
        pieces = [(lo, a - gap), (a + gap, hi)]
    else:
        pieces = [(lo, hi)]
    eng = _ho_engine(problem)
    out = []
    for plo, phi in pieces:
        if not plo < phi:
            continue
        n1 = eng.verified_nsteps(max(abs(plo), abs(phi)), order=3)
        det1 = _reduction_det_factory(problem, a, n1)
        roots = _window_roots(lambda lam_ex: det1, (plo, phi), density, rtol)
        out.extend(float(r) for r in roots)
    return np.array(sorted(out))


def projection_check(problem, f, af) -> float:
    """Residual of A R_rho (A f) versus f - pr_Z f (range projection).

    f and af are callables with af = A f; the clamped problem
    A^2 w = af, gamma w = nu w = 0 is solved with the fourth-order system
    and A w (available as a state row) is compared with the Gram-based
    complement of the kernel projection.
    """
    eng = _ho_engine(problem)
    nsteps = max(2048, eng.verified_nsteps(1.0, order=2))
    y0 = np.zeros((4, 3))
    y0[2, 0] = 1.0
    y0[3, 1] = 1.0
    grid, states = eng.propagate(0.0, nsteps, y0, order=2, record=True,
                                 source=af)
    endp = states[-1, 0]
    m = np.array([[endp[0, 0], endp[0, 1]],
                  [endp[1, 0], endp[1, 1]]])
    rhs = -np.array([endp[0, 2], endp[1, 2]])
    coef = np.linalg.solve(m, rhs)
    aw = states[:, 0, 2, 2] + coef[0] * states[:, 0, 2, 0] \
        + coef[1] * states[:, 0, 2, 1]

    fam = problem.family0()
    fv = np.asarray(f(grid), float) * np.ones_like(grid)
    k1 = _resample(fam.k1, grid)
    k2 = _resample(fam.k2, grid)
    b = np.array([simpson_grid(fv * k1, grid), simpson_grid(fv * k2, grid)])
    c = np.linalg.solve(fam.gram, b)
    przf = c[0] * k1 + c[1] * k2
    resid = aw - (fv - przf)
    return float(np.max(np.abs(resid))) / max(1.0, float(np.max(np.abs(fv))))
