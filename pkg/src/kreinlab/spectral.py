"""Counting functions, Weyl constants, eigenvalue/counting equivalence,
Ky Fan inequalities, perturbation exponents and spectral shifts.

Asymptotic O-statements are operationalized as desk-scale checks: best
constants over the computed range, ratio stability across the top dyadic
blocks, and log-log remainder slopes.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import constants
from .numkernel import FitResult, loglog_fit, quadrature, sym_eigenvalues


@dataclass(frozen=True)
class EigenSequence:
    """Eigenvalues with multiplicity; ascending or descending-positive."""

    values: np.ndarray
    order: str = "ascending"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if self.order == "ascending":
            if np.any(np.diff(v) < 0):
                raise ValueError("values not ascending")
        elif self.order == "descending_positive":
            if np.any(np.diff(v) > 0) or np.any(v <= 0):
                raise ValueError("values must be positive and nonincreasing")
        else:
            raise ValueError(f"unknown order tag {self.order!r}")
        object.__setattr__(self, "values", v)


def _values(seq):
    return seq.values if isinstance(seq, EigenSequence) else np.asarray(seq, float)


def counting_function(seq, r, t) -> int:
    """Number of eigenvalues in [r, t] with multiplicity."""
    if r > t:
        raise ValueError("counting_function needs r <= t")
    v = _values(seq)
    return int(np.searchsorted(v, t, side="right")
               - np.searchsorted(v, r, side="left"))


# ----------------------------------------------------------------------
# Weyl constants


@dataclass(frozen=True)
class WeylEstimate:
    value: float
    error: float


def _unit_ball_volume(n):
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def weyl_constant(n, m, volume=None, p=None, interval=None,
                  symbol=None, x_box=None, xi_box=None,
                  mc_samples=200_000, seed=0) -> WeylEstimate:
    """Phase-space constant c = (2 pi)^-n |{(x, xi): a0(x, xi) < 1}|.

    Three descriptor forms: `volume` (Laplacian closed form), a 1D leading
    coefficient `p` with its `interval`, or a general `symbol` callback
    a0(x, xi) sampled by Monte Carlo over x_box times xi_box.
    """
    if volume is not None:
        return WeylEstimate(_unit_ball_volume(n) * volume / (2.0 * math.pi) ** n, 0.0)
    if p is not None:
        if n != 1:
            raise ValueError("coefficient descriptor is 1D only")
        pc = p if callable(p) else (lambda x, _c=float(p): _c * np.ones_like(x))
        val = quadrature(lambda x: np.asarray(pc(x), float) ** (-1.0 / (2.0 * m)),
                         interval) / math.pi
        return WeylEstimate(val, 0.0)
    if symbol is None:
        raise ValueError("need volume, p, or symbol descriptor")
    rng = np.random.default_rng(seed)
    x_box = np.asarray(x_box, dtype=float).reshape(n, 2)
    xi_box = np.asarray(xi_box, dtype=float).reshape(n, 2)
    xs = rng.uniform(x_box[:, 0], x_box[:, 1], size=(mc_samples, n))
    xis = rng.uniform(xi_box[:, 0], xi_box[:, 1], size=(mc_samples, n))
    inside = np.asarray(symbol(xs, xis), dtype=float) < 1.0
    frac = float(np.mean(inside))
    vol = float(np.prod(x_box[:, 1] - x_box[:, 0])
                * np.prod(xi_box[:, 1] - xi_box[:, 0]))
    scale = vol / (2.0 * math.pi) ** n
    err = scale * math.sqrt(max(frac * (1.0 - frac), 1.0 / mc_samples) / mc_samples)
    return WeylEstimate(scale * frac, err)


# ----------------------------------------------------------------------
# eigenvalue estimates <-> counting estimates


@dataclass(frozen=True)
class AsymptoticModel:
    """mu_j ~ C j^-alpha with remainder exponent beta (> alpha)."""

    c: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.beta > self.alpha > 0 and self.c > 0):
            raise ValueError("need beta > alpha > 0 and C > 0")

    @classmethod
    def from_weyl(cls, n, m, big_n, c_a):
        alpha = 2.0 * m * big_n / n
        return cls(c_a ** alpha, alpha, (2.0 * m * big_n + 1.0) / n)


def counting_exponents(big_m, n, theta):
    """Exponent map between the two remainder forms:
    eigen side (M + theta)/n, counting side (n - theta)/M."""
    if isinstance(theta, (int, Fraction)):
        return (Fraction(big_m + theta, n), Fraction(n - theta, big_m))
    return ((big_m + theta) / n, (n - theta) / big_m)


def counting_eigen_equiv(seq, model: AsymptoticModel) -> dict:
    """Best constants for the paired eigenvalue/counting inequalities.

    Eigen side: |mu_j - C j^-alpha| <= c1 j^-beta.
    Counting side: |N_+(t) - C^(1/a) t^(1/a)| <= c2 t^((1+a-b)/a).
    Reports the best constants over the sequence and the ratio of the top
    two dyadic-block maxima (stability proxy for the O-claim).
    """
    lam = _values(seq)
    if np.any(lam <= 0):
        raise ValueError("sequence must be positive ascending")
    nval = len(lam)
    j = np.arange(1, nval + 1, dtype=float)
    mu = 1.0 / lam
    c, a, b = model.c, model.alpha, model.beta

    eigen_resid = np.abs(mu - c * j ** -a) * j ** b
    c1_best = float(np.max(eigen_resid))

    exp2 = (1.0 + a - b) / a
    tgrid = np.concatenate([lam, lam * (1.0 - 1e-12)])
    counts = np.searchsorted(lam, tgrid, side="right").astype(float)
    count_resid = np.abs(counts - c ** (1.0 / a) * tgrid ** (1.0 / a)) \
        / tgrid ** exp2
    c2_best = float(np.max(count_resid))

    def _block_ratio(resid):
        nres = len(resid)
        if nres < 8:
            return 1.0
        top = resid[nres // 2:]
        prev = resid[nres // 4: nres // 2]
        mt, mp = float(np.max(top)), float(np.max(prev))
        if mp == 0.0:
            return 1.0 if mt == 0.0 else math.inf
        return mt / mp

    r1 = _block_ratio(eigen_resid)
    r2 = _block_ratio(np.sort(count_resid))
    return {
        "c1_best": c1_best,
        "c2_best": c2_best,
        "c1_top_block_ratio": r1,
        "c2_top_block_ratio": r2,
        "eigen_side_holds": bool(np.isfinite(c1_best) and r1 <= 4.0),
        "counting_side_holds": bool(np.isfinite(c2_best)),
    }


# ----------------------------------------------------------------------
# Ky Fan inequalities


@dataclass(frozen=True)
class KyFanReport:
    checked: int
    violations: int
    worst_margin: float


def _positive_desc(mat):
    w = sym_eigenvalues(mat)
    pos = w[w > 0.0]
    return pos[::-1]


def kyfan_check(b_mat, s_mat, pairs=None) -> KyFanReport:
    """Check mu_{j+k-1,+}(B+S) <= mu_{j,+}(B) + mu_{k,+}(S) on index pairs,
    plus the shifted-index variant with K = #positive eigenvalues of S."""
    b = np.asarray(b_mat, dtype=float) if not hasattr(b_mat, "a") else b_mat.a
    s = np.asarray(s_mat, dtype=float) if not hasattr(s_mat, "a") else s_mat.a
    if b.shape != s.shape:
        raise ValueError("matrices must share a dimension")
    scale = max(np.max(np.abs(b)), np.max(np.abs(s)), 1.0)
    tol = constants.KYFAN_RTOL * scale
    mb = _positive_desc(b)
    ms = _positive_desc(s)
    mq = _positive_desc(b + s)
    if pairs is None:
        pairs = [(jj + 1, kk + 1) for jj in range(len(mb)) for kk in range(len(ms))]
    checked = 0
    violations = 0
    worst = math.inf
    for jj, kk in pairs:
        if jj < 1 or kk < 1 or jj > len(mb) or kk > len(ms):
            continue
        idx = jj + kk - 2
        if idx >= len(mq):
            continue
        margin = mb[jj - 1] + ms[kk - 1] - mq[idx]
        checked += 1
        worst = min(worst, float(margin))
        if margin < -tol:
            violations += 1
    kpos = len(ms)
    for jj in range(1, len(mb) + 1):
        idx = jj + kpos - 1
        if idx >= len(mq):
            break
        margin = mb[jj - 1] - mq[idx]
        checked += 1
        worst = min(worst, float(margin))
        if margin < -tol:
            violations += 1
    return KyFanReport(checked, violations, worst if checked else 0.0)


# ----------------------------------------------------------------------
# exponents


def perturbation_exponent(alpha, beta, gamma):
    """beta' = min(beta, gamma (1 + alpha)/(1 + gamma)); gamma=None means
    an infinitely fast perturbation decay (limit value 1 + alpha)."""
    if not beta > alpha > 0:
        raise ValueError("need beta > alpha > 0")
    if gamma is None:
        cand = 1 + alpha
    else:
        if not gamma > alpha:
            raise ValueError("need gamma > alpha")
        cand = gamma * (1 + alpha) / (1 + gamma)
    bprime = min(beta, cand)
    if not alpha < bprime <= beta:
        raise AssertionError("exponent landed outside ]alpha, beta]")
    return bprime


def theta_exponents(m, n, big_n):
    """theta_N = 2mN/(2mN + n - 1) and the legacy max(1/2, 2m/(2m-n+1)).

    Exact rational arithmetic; the legacy value is None when 2m <= n - 1.
    """
    if m < 1 or big_n < 1 or n < 1:
        raise ValueError("m, N >= 1 and n >= 1 required")
    two_mn = 2 * m * big_n
    theta_n = Fraction(two_mn, two_mn + n - 1)
    legacy = None
    if 2 * m - n + 1 > 0:
        legacy = max(Fraction(1, 2), Fraction(2 * m, 2 * m - n + 1))
    return {"theta_N": theta_n, "theta_legacy": legacy}


# ----------------------------------------------------------------------
# spectral shift


@dataclass(frozen=True)
class ShiftData:
    """Values mapped by x -> b x / (b - x); b outside the sequence."""

    b: float
    original: np.ndarray
    mapped: np.ndarray

    def invert(self):
        return shift_map(self.mapped, -self.b)


def shift_map(values, b):
    values = np.asarray(values, dtype=float)
    return b * values / (b - values)


def spectral_shift(seq, b) -> ShiftData:
    v = _values(seq)
    b = float(b)
    if np.min(np.abs(b - v)) <= constants.SHIFT_POLE_GUARD:
        raise ValueError("shift point b is too close to a sequence value")
    return ShiftData(b, v, shift_map(v, b))


# ----------------------------------------------------------------------
# remainder fits


@dataclass(frozen=True)
class RemainderReport:
    bounded: bool
    fit: FitResult | None
    samples: np.ndarray
    remainders: np.ndarray


def remainder_fit(seq, c_a, n, m, r, t_window, samples=64) -> RemainderReport:
    """Slope of |N_{+,r}(t) - c_A t^(n/2m)| + 1 on log-log axes.

    A remainder never exceeding 1 is reported as bounded (no fit); the +1
    inside the logarithm tolerates exact-zero remainders and moves tested
    slopes by < 0.02.
    """
    v = _values(seq)
    lo, hi = float(t_window[0]), float(t_window[1])
    if hi > float(np.max(v)):
        raise ValueError("fit window exceeds the computed spectrum")
    if samples < 10:
        raise ValueError("need at least 10 sample points")
    ts = np.geomspace(lo, hi, samples)
    counts = (np.searchsorted(v, ts, side="right")
              - np.searchsorted(v, r, side="left")).astype(float)
    rem = np.abs(counts - c_a * ts ** (n / (2.0 * m)))
    if float(np.max(rem)) <= 1.0:
        return RemainderReport(True, None, ts, rem)
    fit = loglog_fit(ts, rem + 1.0, (lo, hi))
    return RemainderReport(False, fit, ts, rem)


def weyl_ratio_table(seq, r, c_a, power, ts):
    """Ratios N_{+,r}(t) / (c_A t^power) at the requested t values."""
    v = _values(seq)
    ts = np.asarray(ts, dtype=float)
    counts = (np.searchsorted(v, ts, side="right")
              - np.searchsorted(v, r, side="left")).astype(float)
    return counts / (c_a * ts ** power)
