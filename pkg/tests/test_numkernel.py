import numpy as np
import pytest

from kreinlab.errors import ConvergenceError, NotSPDError
from kreinlab.numkernel import (
    HAVE_COMPILED_KERNEL,
    SymMatrix,
    find_roots_bracketed,
    gen_eigen,
    loglog_fit,
    quadrature,
    solve_ode_ivp,
    sym_eigen,
)


# ---------------------------------------------------------------- sym_eigen


def test_diagonal_matrix_sorted():
    dec = sym_eigen(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(dec.values, [1.0, 2.0, 3.0], atol=0)


def test_two_by_two_swap():
    dec = sym_eigen(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(dec.values, [-1.0, 1.0], atol=1e-14)


def _inertia_below(a, cut):
    """Eigenvalue count below `cut` via symmetric elimination pivots."""
    m = a - cut * np.eye(len(a))
    neg = 0
    for _ in range(len(a)):
        piv = m[0, 0]
        if piv == 0.0:
            piv = 1e-300
        if piv < 0:
            neg += 1
        m = m[1:, 1:] - np.outer(m[1:, 0], m[0, 1:]) / piv
    return neg


def test_sturm_count_oracle(rng):
    a = rng.standard_normal((50, 50))
    a = 0.5 * (a + a.T)
    dec = sym_eigen(a)
    lo_all = dec.values[0] - 1.0
    hi_all = dec.values[-1] + 1.0
    for _ in range(20):
        lo, hi = np.sort(rng.uniform(lo_all, hi_all, 2))
        expected = _inertia_below(a, hi) - _inertia_below(a, lo)
        got = np.count_nonzero((dec.values >= lo) & (dec.values < hi))
        assert got == expected


@pytest.mark.parametrize("dim", [20, 80, 200])
def test_reconstruction_jacobi(rng, dim):
    a = rng.standard_normal((dim, dim))
    a = 0.5 * (a + a.T)
    dec = sym_eigen(a, method="jacobi")
    err = np.linalg.norm(dec.reconstruct() - a) / np.linalg.norm(a)
    assert err <= 1e-9
    # orthonormality of the eigenvector columns
    gram = dec.vectors.T @ dec.vectors
    assert np.max(np.abs(gram - np.eye(dim))) <= 1e-10


def test_fallback_kernel_matches_compiled(rng):
    a = rng.standard_normal((40, 40))
    a = 0.5 * (a + a.T)
    w_py = sym_eigen(a, method="jacobi-py").values
    w = sym_eigen(a, method="jacobi").values
    assert np.max(np.abs(w - w_py)) <= 1e-11 * max(1.0, np.max(np.abs(w)))


def test_lapack_path_above_cutoff(rng):
    a = rng.standard_normal((600, 600))
    a = 0.5 * (a + a.T)
    dec = sym_eigen(a)  # auto -> lapack at this size
    resid = a @ dec.vectors - dec.vectors * dec.values
    assert np.max(np.abs(resid)) <= 1e-10 * np.linalg.norm(a)


def test_minmax_constrained_power_iteration(rng):
    # the l'th descending eigenvalue equals the constrained maximum of the
    # quadratic form over the orthogonal complement of the first l-1 modes
    q = rng.standard_normal((20, 20))
    q = 0.5 * (q + q.T)
    dec = sym_eigen(q)
    desc = dec.values[::-1]
    vecs = dec.vectors[:, ::-1]
    shift = np.abs(dec.values).max() + 1.0
    for ell in range(1, 6):
        basis = vecs[:, : ell - 1]
        v = rng.standard_normal(20)
        for _ in range(6000):
            v -= basis @ (basis.T @ v)
            v = q @ v + shift * v
            v /= np.linalg.norm(v)
        v -= basis @ (basis.T @ v)
        v /= np.linalg.norm(v)
        assert abs(float(v @ q @ v) - desc[ell - 1]) <= 1e-8


def test_symmatrix_validation():
    with pytest.raises(ValueError):
        SymMatrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        SymMatrix(np.array([[np.inf, 0.0], [0.0, 1.0]]))
    s = SymMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))
    assert s.a[0, 1] == s.a[1, 0] == 1.0


# ---------------------------------------------------------------- gen_eigen


def test_pencil_diagonal():
    vals = gen_eigen(np.diag([2.0, 6.0]), np.diag([1.0, 2.0]))
    assert np.allclose(vals, [2.0, 3.0], atol=1e-12)


def test_pencil_identity_mass(rng):
    a = rng.standard_normal((12, 12))
    a = 0.5 * (a + a.T)
    assert np.max(np.abs(gen_eigen(a, np.eye(12)) - sym_eigen(a).values)) <= 1e-10


def test_pencil_equal_matrices(rng):
    m = rng.standard_normal((8, 8))
    m = m @ m.T + 8 * np.eye(8)
    assert np.max(np.abs(gen_eigen(m, m) - 1.0)) <= 1e-12


def test_pencil_det_root_oracle(rng):
    n = 20
    x = rng.standard_normal((n, n))
    a = 0.5 * (x + x.T)
    y = rng.standard_normal((n, n))
    m = y @ y.T + n * np.eye(n)
    got = gen_eigen(a, m)
    # oracle: bisect the sign changes of det(A - nu M) on a fine grid
    bound = 1.2 * np.max(np.abs(got)) + 1.0
    grid = np.linspace(-bound, bound, 20001)
    det = lambda nu: np.linalg.det(a - nu * m)
    vals = np.array([det(g) for g in grid])
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
        elif vals[i] * vals[i + 1] < 0:
            lo, hi = grid[i], grid[i + 1]
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if det(lo) * det(mid) <= 0:
                    hi = mid
                else:
                    lo = mid
            roots.append(0.5 * (lo + hi))
    assert len(roots) == n
    assert np.max(np.abs(np.sort(roots) - got)) <= 1e-8


def test_pencil_rejects_indefinite_mass():
    with pytest.raises(NotSPDError):
        gen_eigen(np.eye(3), np.diag([1.0, -1.0, 1.0]))


# ---------------------------------------------------------------- ODE


def test_ivp_exponential():
    sf = solve_ode_ivp(lambda x: np.array([[1.0]]), 1, [1.0], (0.0, 1.0))
    assert abs(sf.values[-1, 0] - np.e) <= 1e-10


def test_ivp_sine():
    c = np.array([[0.0, 1.0], [-1.0, 0.0]])
    sf = solve_ode_ivp(lambda x: c, 2, [0.0, 1.0], (0.0, np.pi))
    assert abs(sf.values[-1, 0]) <= 1e-9


def test_ivp_airy_series_oracle():
    # u'' = x u, (u, u')(0) = (1, 0); series sum a_k x^{3k},
    # a_k = a_{k-1} / ((3k)(3k-1))
    term, total = 1.0, 1.0
    for k in range(1, 40):
        term /= (3 * k) * (3 * k - 1)
        total += term
    sf = solve_ode_ivp(lambda x: np.array([[0.0, 1.0], [x, 0.0]]),
                       2, [1.0, 0.0], (0.0, 1.0))
    assert abs(sf.values[-1, 0] - total) <= 1e-8


def test_ivp_with_source():
    # u' = -u + 1, u(0) = 0 -> u(1) = 1 - e^{-1}
    sf = solve_ode_ivp(lambda x: np.array([[-1.0]]), 1, [0.0], (0.0, 1.0),
                       source=lambda x: np.array([1.0]))
    assert abs(sf.values[-1, 0] - (1.0 - np.exp(-1.0))) <= 1e-10


# ---------------------------------------------------------------- roots


def test_roots_of_sine():
    roots = find_roots_bracketed(np.sin, (1.0, 7.0))
    assert np.allclose(roots, [np.pi, 2 * np.pi], atol=1e-10)


def test_clamped_plate_determinant_roots():
    f = lambda w: 2.0 - 2.0 * np.cos(w) - w * np.sin(w)
    roots = find_roots_bracketed(f, (1.0, 13.0))

    # interval-halving oracle on the same closed form
    def halve(lo, hi):
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if f(lo) * f(mid) <= 0:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    oracle = [halve(5.9, 6.6), halve(8.6, 9.4), halve(12.2, 12.9)]
    assert len(roots) == 3
    assert np.max(np.abs(roots - np.array(oracle))) <= 1e-9
    assert abs(roots[0] - 2 * np.pi) <= 1e-9
    assert abs(roots[2] - 4 * np.pi) <= 1e-9


def test_constant_has_no_roots():
    assert len(find_roots_bracketed(lambda x: 1.0, (0.0, 5.0))) == 0


def test_random_polynomials_recovered(rng):
    for _ in range(100):
        k = rng.integers(2, 6)
        roots = np.sort(rng.uniform(-4.0, 4.0, k))
        while np.min(np.diff(roots)) < 0.2 if k > 1 else False:
            roots = np.sort(rng.uniform(-4.0, 4.0, k))
        poly = lambda x, r=roots: np.prod([x - ri for ri in r], axis=0)
        got = find_roots_bracketed(poly, (-5.0, 5.0), scan_points=2000)
        assert len(got) == k
        assert np.max(np.abs(got - roots)) <= 1e-9


# ---------------------------------------------------------------- quadrature


def test_quadrature_polynomials():
    assert abs(quadrature(lambda x: x ** 2, (0.0, 1.0)) - 1.0 / 3.0) <= 1e-12
    assert abs(quadrature(lambda x: (1 - x) * x, (0.0, 1.0)) - 1.0 / 6.0) <= 1e-12


def test_quadrature_sine_squared():
    val = quadrature(lambda x: np.sin(np.pi * x) ** 2, (0.0, 1.0))
    assert abs(val - 0.5) <= 1e-11


def test_quadrature_budget():
    with pytest.raises(ConvergenceError):
        quadrature(lambda x: np.sin(1e9 * x), (0.0, 1.0))


# ---------------------------------------------------------------- loglog fit


def test_fit_exact_square_law():
    t = np.linspace(1.0, 10.0, 10)
    fit = loglog_fit(t, t ** 2)
    assert abs(fit.slope - 2.0) <= 1e-12
    assert fit.residual_rms <= 1e-12


def test_fit_half_power_with_prefactor():
    t = np.geomspace(1.0, 100.0, 12)
    fit = loglog_fit(t, 2.0 * np.sqrt(t))
    assert abs(fit.slope - 0.5) <= 1e-12
    assert abs(fit.intercept - np.log(2.0)) <= 1e-12


def test_fit_windowed_affine_data():
    t = np.geomspace(1.0, 1e6, 60)
    fit = loglog_fit(t, t + 10.0, window=(1e3, 1e6))
    assert 0.99 <= fit.slope <= 1.01


def test_fit_needs_three_points():
    with pytest.raises(ValueError):
        loglog_fit(np.array([1.0, 2.0]), np.array([1.0, 2.0]))
