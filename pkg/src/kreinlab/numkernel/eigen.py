"""Dense symmetric eigensolver and generalized pencil solver.

The Jacobi kernel comes in two builds: a compiled Cython extension and a
pure-Python fallback, selected at import.  ``sym_eigen`` defaults to the
Jacobi kernel up to a dimension cutoff and to LAPACK above it; both
backends satisfy the same contract (ascending eigenvalues, orthonormal
eigenvector columns).
"""

from dataclasses import dataclass

import numpy as np

from .. import constants
from ..errors import ConvergenceError, NotSPDError

try:
    from . import _jacobi as _kernel

    HAVE_COMPILED_KERNEL = True
except ImportError:  # extension not built
    from . import _jacobi_py as _kernel

    HAVE_COMPILED_KERNEL = False

from . import _jacobi_py as _kernel_py

_AUTO_DIM = (
    constants.JACOBI_AUTO_DIM if HAVE_COMPILED_KERNEL
    else constants.JACOBI_AUTO_DIM_FALLBACK
)


class SymMatrix:
    """Real symmetric matrix; construction symmetrizes exactly."""

    __slots__ = ("a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("SymMatrix needs a square array")
        if not np.all(np.isfinite(a)):
            raise ValueError("SymMatrix entries must be finite")
        self.a = 0.5 * (a + a.T)

    @property
    def dim(self):
        return self.a.shape[0]

    def __repr__(self):
        return f"SymMatrix(dim={self.dim})"


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.T


def _coerce(a):
    if isinstance(a, SymMatrix):
        return a.a.copy()
    return SymMatrix(a).a


def sym_eigen(a, method: str = "auto") -> EigenDecomposition:
    """Full spectral decomposition of a real symmetric matrix.

    method: "auto" (Jacobi up to the dimension cutoff, LAPACK above),
    "jacobi", "jacobi-py" (force the fallback kernel) or "lapack".
    """
    work = _coerce(a)
    n = work.shape[0]
    if method == "auto":
        method = "jacobi" if n <= _AUTO_DIM else "lapack"

    if method == "lapack":
        w, v = np.linalg.eigh(work)
        return EigenDecomposition(w, v)
    if method in ("jacobi", "jacobi-py"):
        kern = _kernel if method == "jacobi" else _kernel_py
        v = np.eye(n)
        sweeps = kern.jacobi_cycle(work, v, constants.JACOBI_SWEEP_BUDGET)
        if sweeps < 0:
            raise ConvergenceError(
                f"jacobi sweeps exhausted ({constants.JACOBI_SWEEP_BUDGET}) "
                f"at dimension {n}; matrix may be badly scaled"
            )
        w = np.diag(work).copy()
        order = np.argsort(w, kind="stable")
        return EigenDecomposition(w[order], np.ascontiguousarray(v[:, order]))
    raise ValueError(f"unknown method {method!r}")


def sym_eigenvalues(a, method: str = "auto") -> np.ndarray:
    return sym_eigen(a, method=method).values


def gen_eigen(a, m, method: str = "auto") -> np.ndarray:
    """Ascending eigenvalues nu of the pencil A c = nu M c, M SPD.

    Reduces by the Cholesky congruence C = L^-1 A L^-T and calls
    ``sym_eigen`` on C.
    """
    aa = _coerce(a)
    mm = _coerce(m)
    if aa.shape != mm.shape:
        raise ValueError("pencil matrices must have equal shape")
    try:
        chol = np.linalg.cholesky(mm)
    except np.linalg.LinAlgError as exc:
        raise NotSPDError("pencil mass matrix is not positive definite") from exc
    # L^-1 A L^-T via two triangular-style solves
    tmp = np.linalg.solve(chol, aa)
    red = np.linalg.solve(chol, tmp.T).T
    return sym_eigen(red, method=method).values
