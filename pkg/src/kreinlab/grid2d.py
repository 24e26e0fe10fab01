"""Discrete 2D model: dense 5-point Dirichlet matrix on a rectangle grid,
discrete-harmonic subspace, Krein-like inverses and their decomposition.

The discrete-harmonic subspace consists of the grid functions whose
Laplacian vanishes away from the boundary; it is spanned by the columns
of A_h^-1 at the interior perimeter ring, one independent direction per
ring node.  (Unit data at the two boundary neighbours of a corner-adjacent
ring node extend to the same interior function, so the boundary dimension
is the ring count b = 2 (M1 + M2) - 4, not the raw boundary node count.)
The Krein-like spectrum is always read off the inverse
A_h^-1 + a^-1 pr_Z; the operator itself is never formed.
"""

from dataclasses import dataclass

import numpy as np

from . import constants
from .errors import NotSPDError, NumericError
from .numkernel import FitResult, loglog_fit, sym_eigen, sym_eigenvalues


@dataclass
class GridModel:
    m1: int
    m2: int
    h: float
    dim: int
    boundary_count: int
    a_h: np.ndarray

    _inv: np.ndarray | None = None
    _lam_min: float | None = None

    def index(self, i, j):
        """Row index of interior node (i, j), 1-based grid coordinates."""
        return (j - 1) * self.m1 + (i - 1)

    @property
    def a_inv(self):
        if self._inv is None:
            inv = np.linalg.solve(self.a_h, np.eye(self.dim))
            self._inv = 0.5 * (inv + inv.T)
        return self._inv

    @property
    def lambda_min(self):
        if self._lam_min is None:
            self._lam_min = float(sym_eigenvalues(self.a_h)[0])
        return self._lam_min


def build_model(m1, m2, potential=None) -> GridModel:
    """Dense 5-point matrix, Dirichlet boundary, spacing h = 1/(m1 + 1).

    potential, when given, is a callable sampled at the interior nodes and
    added to the diagonal.
    """
    if m1 < 4 or m2 < 4:
        raise ValueError("need at least 4 interior nodes per side")
    h = 1.0 / (m1 + 1)
    dim = m1 * m2
    a = np.zeros((dim, dim))
    inv_h2 = 1.0 / (h * h)
    for j in range(1, m2 + 1):
        for i in range(1, m1 + 1):
            r = (j - 1) * m1 + (i - 1)
            a[r, r] = 4.0 * inv_h2
            if potential is not None:
                a[r, r] += float(potential(i * h, j * h))
            if i > 1:
                a[r, r - 1] = -inv_h2
            if i < m1:
                a[r, r + 1] = -inv_h2
            if j > 1:
                a[r, r - m1] = -inv_h2
            if j < m2:
                a[r, r + m1] = -inv_h2
    model = GridModel(m1, m2, h, dim, 2 * (m1 + m2) - 4, a)
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotSPDError("discrete Dirichlet matrix is not positive definite") from exc
    return model


def dirichlet_eigenvalues_exact(model: GridModel):
    """Zero-potential closed form (4/h^2)(sin^2 + sin^2), ascending."""
    h = model.h
    jj = np.arange(1, model.m1 + 1)
    kk = np.arange(1, model.m2 + 1)
    vals = (4.0 / h ** 2) * (np.sin(jj[:, None] * np.pi * h / 2.0) ** 2
                             + np.sin(kk[None, :] * np.pi * h / 2.0) ** 2)
    return np.sort(vals.ravel())


@dataclass
class HarmonicBasis:
    z: np.ndarray
    coupling: np.ndarray
    q_z: np.ndarray
    pr_z: np.ndarray
    pr_r: np.ndarray


def harmonic_basis(model: GridModel) -> HarmonicBasis:
    """Discrete harmonic extensions of unit boundary data.

    Columns are indexed by the interior perimeter ring; a corner-adjacent
    ring node carries the (identical) extension of unit data at either of
    its two boundary neighbours.
    """
    m1, m2, h = model.m1, model.m2, model.h
    inv_h2 = 1.0 / (h * h)
    ring = []
    for i in range(1, m1 + 1):
        ring.append(model.index(i, 1))
    for j in range(2, m2):
        ring.append(model.index(m1, j))
    for i in range(m1, 0, -1):
        ring.append(model.index(i, m2))
    for j in range(m2 - 1, 1, -1):
        ring.append(model.index(1, j))
    b = len(ring)
    if b != model.boundary_count:
        raise NumericError("boundary ring enumeration mismatch")
    coupling = np.zeros((model.dim, b))
    for k, r in enumerate(ring):
        coupling[r, k] = inv_h2
    z = np.linalg.solve(model.a_h, coupling)
    q_z, rfac = np.linalg.qr(z)
    if np.min(np.abs(np.diag(rfac))) <= 1e-10 * np.max(np.abs(np.diag(rfac))):
        raise NumericError("harmonic basis is numerically rank deficient")
    pr_z = q_z @ q_z.T
    pr_z = 0.5 * (pr_z + pr_z.T)
    return HarmonicBasis(z, coupling, q_z, pr_z, np.eye(model.dim) - pr_z)


def krein_inverse(model: GridModel, basis: HarmonicBasis, a) -> np.ndarray:
    """A_a^-1 = A_h^-1 + a^-1 pr_Z (a = 0 has no discrete inverse here)."""
    if a == 0:
        raise ValueError("a = 0 is excluded: the inverse formula needs a != 0")
    out = model.a_inv + (1.0 / a) * basis.pr_z
    return 0.5 * (out + out.T)


@dataclass(frozen=True)
class Decomposition525:
    b1: np.ndarray
    b2: np.ndarray
    s: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        gap = np.max(np.abs(self.b1 + self.b2 + self.s - self.target))
        scale = max(1.0, float(np.max(np.abs(self.target))))
        if gap > constants.GRID_SUM_TOL * scale:
            raise NumericError(f"decomposition does not reconstruct ({gap:.2e})")


def decompose(model: GridModel, basis: HarmonicBasis, a) -> Decomposition525:
    """Split A_a^-1 into the range block, the scaled kernel projection and
    the singular coupling part."""
    if a == 0:
        raise ValueError("a = 0 is excluded")
    ainv = model.a_inv
    pr_z, pr_r = basis.pr_z, basis.pr_r
    b1 = pr_r @ ainv @ pr_r
    b2 = (1.0 / a) * pr_z
    s = pr_r @ ainv @ pr_z + pr_z @ ainv @ pr_r + pr_z @ ainv @ pr_z
    target = ainv + (1.0 / a) * pr_z
    return Decomposition525(0.5 * (b1 + b1.T), b2, 0.5 * (s + s.T), target)


def snumber_slope(s_matrix, j_window) -> FitResult:
    """Log-log slope of the descending singular values on a j-window."""
    s = s_matrix.a if hasattr(s_matrix, "a") else np.asarray(s_matrix, float)
    sing = np.sort(np.abs(sym_eigenvalues(s)))[::-1]
    lo, hi = int(j_window[0]), int(j_window[1])
    if lo < 1 or hi > len(sing):
        raise ValueError("j-window outside 1..rank")
    j = np.arange(lo, hi + 1, dtype=float)
    vals = sing[lo - 1:hi]
    keep = vals > 0
    return loglog_fit(j[keep], vals[keep], (float(lo), float(hi)))


def positive_eigenvalue_slope(mat, j_window) -> FitResult:
    """Log-log slope of the descending positive eigenvalues on a j-window."""
    m = mat.a if hasattr(mat, "a") else np.asarray(mat, float)
    w = sym_eigenvalues(m)
    pos = np.sort(w[w > 0])[::-1]
    lo, hi = int(j_window[0]), int(j_window[1])
    if lo < 1 or hi > len(pos):
        raise ValueError("j-window outside the positive spectrum")
    j = np.arange(lo, hi + 1, dtype=float)
    return loglog_fit(j, pos[lo - 1:hi], (float(lo), float(hi)))


def gmu_grid_scan(model: GridModel, basis: HarmonicBasis, mus):
    """Table (mu, m(G^mu_h)) with G^mu_h = -mu Q^T (I + mu (A - mu)^-1) Q."""
    mus = np.asarray(list(mus), dtype=float)
    out = np.empty_like(mus)
    q = basis.q_z
    eye_b = np.eye(q.shape[1])
    for i, mu in enumerate(mus):
        if mu == 0.0:
            out[i] = 0.0
            continue
        if mu >= model.lambda_min:
            raise ValueError("gmu_grid_scan needs mu < lambda_min(A_h)")
        x = np.linalg.solve(model.a_h - mu * np.eye(model.dim), q)
        g = -mu * (eye_b + mu * (q.T @ x))
        out[i] = sym_eigenvalues(0.5 * (g + g.T))[0]
    return np.column_stack([mus, out])


@dataclass(frozen=True)
class ClusterReport:
    center: float
    radius: float
    count: int
    z_dimension: int


def spectrum_and_cluster(model: GridModel, basis: HarmonicBasis, a, r,
                         delta=0.05):
    """Spectrum of the discrete Krein-like operator via its inverse.

    Inverse eigenvalues inside the zero guard are dropped (they map to
    the far ends of the spectrum); the cluster report counts eigenvalues
    within delta of a.
    """
    if a == 0:
        raise ValueError("a = 0 is excluded")
    if not r > a:
        raise ValueError("need r > a")
    inv = krein_inverse(model, basis, a)
    x = sym_eigenvalues(inv)
    x = x[np.abs(x) > constants.GRID_ZERO_GUARD]
    lam = np.sort(1.0 / x)
    count = int(np.count_nonzero(np.abs(lam - a) <= delta))
    return lam, ClusterReport(float(a), float(delta), count, basis.z.shape[1])
