"""Self-contained numeric primitives (eigen, ODE, roots, quadrature, fits)."""

from .eigen import (
    HAVE_COMPILED_KERNEL,
    EigenDecomposition,
    SymMatrix,
    gen_eigen,
    sym_eigen,
    sym_eigenvalues,
)
from .fit import FitResult, loglog_fit
from .ode import SampledFunction, rk4_linear, solve_ode_ivp
from .quad import quadrature, simpson_grid
from .roots import find_roots_bracketed, refine_bracket

__all__ = [
    "HAVE_COMPILED_KERNEL",
    "EigenDecomposition",
    "SymMatrix",
    "gen_eigen",
    "sym_eigen",
    "sym_eigenvalues",
    "FitResult",
    "loglog_fit",
    "SampledFunction",
    "rk4_linear",
    "solve_ode_ivp",
    "quadrature",
    "simpson_grid",
    "find_roots_bracketed",
    "refine_bracket",
]
