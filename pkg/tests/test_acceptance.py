"""Acceptance suite: one test per criterion, each printing a status line
with the measured figure and wall time against the stated budget.

Run with `pytest tests/test_acceptance.py -v -s` for the full report.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from kreinlab.extensions1d import (
    BoundaryConditionSpec,
    birman_bound,
    buckling_eigenvalues,
    dirichlet_bcspec,
    dtn_difference_check,
    gmu_scan,
    krein_bcspec,
    krein_resolvent_check,
    lower_bound_certificate,
    realization_eigenvalues,
    reduction_eigenvalues,
    tmu_form,
)
from kreinlab.grid2d import (
    build_model,
    decompose,
    dirichlet_eigenvalues_exact,
    harmonic_basis,
    snumber_slope,
    spectrum_and_cluster,
)
from kreinlab.interval1d import dirichlet_eigenvalues, dtn_matrix
from kreinlab.numkernel import sym_eigen
from kreinlab.spectral import (
    kyfan_check,
    perturbation_exponent,
    remainder_fit,
    spectral_shift,
    theta_exponents,
    weyl_ratio_table,
)


def _report(name, ok, detail, elapsed, budget):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}: {detail}  ({elapsed:.2f}s / budget {budget:g}s)")
    assert ok, f"{name}: {detail}"
    assert elapsed < budget, f"{name} exceeded runtime budget: {elapsed:.2f}s"


def test_criterion_01_dirichlet_baseline(unit):
    t0 = time.perf_counter()
    evs = dirichlet_eigenvalues(unit, 20)
    dt = time.perf_counter() - t0
    exact = (np.arange(1, 21) * np.pi) ** 2
    err = float(np.max(np.abs(evs / exact - 1.0)))
    _report("criterion 1 (Dirichlet baseline)", err <= 1e-8,
            f"max rel err {err:.2e}", dt, 1.0)


def test_criterion_02_soft_extension_buckling(unit):
    t0 = time.perf_counter()
    bk = buckling_eigenvalues(unit, 3)
    sp = realization_eigenvalues(unit, krein_bcspec(unit, 0.0), (1.0, 150.0))
    dt = time.perf_counter() - t0
    first_err = abs(bk[0] - 4 * np.pi ** 2)
    agree = float(np.max(np.abs(sp.eigenvalues - bk[: len(sp.eigenvalues)])))
    ok = first_err <= 1e-6 and agree <= 1e-8
    _report("criterion 2 (soft extension, two pipelines)", ok,
            f"|lam1 - 4pi^2| = {first_err:.2e}, pipeline gap {agree:.2e}",
            dt, 5.0)


def test_criterion_03_reduction_pipeline(unit):
    t0 = time.perf_counter()
    worst = 0.0
    for a in (-5.0, 5.0):
        red = reduction_eigenvalues(unit, a, (1.0, 150.0))
        sp = realization_eigenvalues(unit, krein_bcspec(unit, a), (1.0, 150.0))
        assert len(red) == len(sp.eigenvalues)
        worst = max(worst, float(np.max(np.abs(red - sp.eigenvalues))))
    dt = time.perf_counter() - t0
    _report("criterion 3 (third-trace reduction vs shooting)", worst <= 1e-6,
            f"max gap {worst:.2e}", dt, 10.0)


def test_criterion_04_resolvent_identity(unit):
    t0 = time.perf_counter()
    spec = krein_bcspec(unit, -5.0)
    residuals = [
        krein_resolvent_check(unit, dirichlet_bcspec(),
                              lambda x: np.sin(np.pi * x)),
        krein_resolvent_check(unit, spec, lambda x: np.sin(np.pi * x)),
        krein_resolvent_check(unit, spec, lambda x: 1.0 - x),
    ]
    dt = time.perf_counter() - t0
    worst = max(residuals)
    _report("criterion 4 (resolvent identity)", worst <= 1e-6,
            f"max residual {worst:.2e}", dt, 1.0)


def test_criterion_05_gmu_growth(unit):
    t0 = time.perf_counter()
    scan1 = gmu_scan(unit, [-1.0e4])
    mus = [-(10.0 ** k) for k in np.arange(2.0, 6.25, 0.25)]
    scan = gmu_scan(unit, mus)
    dt = time.perf_counter() - t0
    v = float(scan1.values[0])
    slope = scan.fit.slope
    ok = abs(v - 200.0) <= 1e-3 and 0.45 <= slope <= 0.55
    _report("criterion 5 (boundary-form growth)", ok,
            f"m(G) at -1e4 = {v:.6f}, slope {slope:.3f}", dt, 5.0)


def test_criterion_06_dtn_difference_formula(unit):
    t0 = time.perf_counter()
    worst_ratio = 0.0
    for mu in (-1.0, -1.0e2, -1.0e4):
        resid = dtn_difference_check(unit, mu)
        qnorm = float(np.max(np.abs(unit.dtn0().p - dtn_matrix(unit, mu).p)))
        worst_ratio = max(worst_ratio, resid / (1e-6 * qnorm))
    dt = time.perf_counter() - t0
    _report("criterion 6 (difference-map product formula)", worst_ratio <= 1.0,
            f"worst residual at {worst_ratio:.3f} of tolerance", dt, 2.0)


def test_criterion_07_lower_bound_certificates(unit):
    t0 = time.perf_counter()
    robin = BoundaryConditionSpec(np.eye(2), -100.0 * np.eye(2))
    mu_star = lower_bound_certificate(unit, robin)
    ok = mu_star is not None and np.isfinite(mu_star)
    bottom = None
    if ok:
        sp = realization_eigenvalues(unit, robin, (mu_star - 1.0, 50.0))
        bottom = float(sp.eigenvalues[0])
        ok = mu_star <= bottom
    spd = BoundaryConditionSpec(np.eye(2), np.array([[3.0, 1.0], [1.0, 2.0]]))
    mt0 = tmu_form(unit, spd, 0.0).value
    mu_spd = lower_bound_certificate(unit, spd)
    ok = ok and mu_spd is not None \
        and mu_spd >= birman_bound(mt0, unit.lambda1) - 1e-9
    dt = time.perf_counter() - t0
    _report("criterion 7 (certified lower bounds)", ok,
            f"robin mu*={mu_star:g} <= bottom {bottom:.4g}; "
            f"spd mu*={mu_spd:.6f} vs birman {birman_bound(mt0, unit.lambda1):.6f}",
            dt, 10.0)


def test_criterion_08_kyfan_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    violations = 0
    checked = 0
    for _ in range(200):
        b = rng.standard_normal((30, 30))
        b = 0.5 * (b + b.T)
        s = rng.standard_normal((30, 30))
        s = 0.5 * (s + s.T)
        rep = kyfan_check(b, s)
        violations += rep.violations
        checked += rep.checked
    dt = time.perf_counter() - t0
    _report("criterion 8 (eigenvalue sum inequalities)", violations == 0,
            f"{checked} inequalities, {violations} violations", dt, 30.0)


def test_criterion_09_perturbation_exponent_empirical():
    t0 = time.perf_counter()
    n = 500
    rng = np.random.default_rng(11)
    j = np.arange(1.0, n + 1)
    b = np.diag(1.0 / j)
    s = np.diag(rng.choice([-1.0, 1.0], n) / j ** 2)
    dec = sym_eigen(b + s)
    mu = np.sort(dec.values[dec.values > 0])[::-1]
    jj = np.arange(1.0, len(mu) + 1)
    scaled = jj ** (4.0 / 3.0) * np.abs(mu - 1.0 / jj)
    blocks = [np.max(scaled[62:125]), np.max(scaled[125:250]),
              np.max(scaled[250:])]
    r1 = blocks[1] / blocks[0]
    r2 = blocks[2] / blocks[1]
    dt = time.perf_counter() - t0
    _report("criterion 9 (perturbed eigenvalue remainder)",
            r1 <= 2.0 and r2 <= 2.0,
            f"block ratios {r1:.3f}, {r2:.3f}", dt, 60.0)


def test_criterion_10_exponent_tables():
    t0 = time.perf_counter()
    ok = (theta_exponents(1, 2, 1)["theta_N"] == Fraction(2, 3)
          and theta_exponents(1, 2, 5)["theta_N"] == Fraction(10, 11)
          and perturbation_exponent(Fraction(1), Fraction(3, 2), Fraction(2))
          == Fraction(4, 3)
          and theta_exponents(1, 1, 1)["theta_legacy"] == Fraction(1, 1))
    dt = time.perf_counter() - t0
    _report("criterion 10 (exponent tables, exact rationals)", ok,
            "theta_1 = 2/3, theta_5 = 10/11, beta' = 4/3, legacy theta = 1",
            dt, 5.0)


@pytest.fixture(scope="module")
def grid40():
    t0 = time.perf_counter()
    model = build_model(40, 40)
    basis = harmonic_basis(model)
    lam, rep = spectrum_and_cluster(model, basis, -1.0, 1.0, 0.05)
    dec = decompose(model, basis, -1.0)
    return model, basis, lam, rep, dec, time.perf_counter() - t0


def test_criterion_11a_grid_cluster_and_weyl(grid40):
    model, basis, lam, rep, dec, t_build = grid40
    t0 = time.perf_counter()
    lam_max = float(dirichlet_eigenvalues_exact(model)[-1])
    ts = np.geomspace(50.0, 0.2 * lam_max, 16)
    ratios = weyl_ratio_table(lam, 1.0, 1.0 / (4 * np.pi), 1.0, ts)
    dt = time.perf_counter() - t0 + t_build
    print("    Weyl ratio table (t, N/(t/4pi)):")
    for t, r in zip(ts, ratios):
        print(f"      t = {t:9.1f}   ratio = {r:.3f}")
    ratio_end = float(ratios[-1])
    ok = (rep.count >= model.boundary_count - 20
          and 0.85 <= ratio_end <= 1.15)
    _report("criterion 11a (cluster size and Weyl ratio, M=40)", ok,
            f"cluster {rep.count}/{model.boundary_count}, "
            f"window-end ratio {ratio_end:.3f}", dt, 180.0)


def test_criterion_11b_grid_snumber_slope(grid40):
    # Stated band [-2.6, -1.6]: not attainable for the coupling part of the
    # canonical discrete-harmonic construction at M = 40 (see the decisions
    # ledger); the faithful check is kept and expected to fail.
    model, basis, lam, rep, dec, t_build = grid40
    t0 = time.perf_counter()
    fit = snumber_slope(dec.s, (10, 100))
    dt = time.perf_counter() - t0 + t_build
    ok = -2.6 <= fit.slope <= -1.6
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion 11b (coupling s-number slope, M=40): "
          f"slope {fit.slope:.3f} vs band [-2.6, -1.6]  ({dt:.2f}s)")
    assert ok, (
        f"s-number slope {fit.slope:.3f} outside [-2.6, -1.6]; "
        "structural at this resolution, see decisions ledger")


def test_criterion_11c_grid_ci_variant():
    t0 = time.perf_counter()
    model = build_model(24, 24)
    basis = harmonic_basis(model)
    lam, rep = spectrum_and_cluster(model, basis, -1.0, 1.0, 0.05)
    dec = decompose(model, basis, -1.0)
    fit = snumber_slope(dec.s, (10, 100))
    lam_max = float(dirichlet_eigenvalues_exact(model)[-1])
    ratio_end = float(weyl_ratio_table(lam, 1.0, 1.0 / (4 * np.pi), 1.0,
                                       [0.2 * lam_max])[0])
    dt = time.perf_counter() - t0
    ok = rep.count >= model.boundary_count - 20
    _report("criterion 11c (CI variant, M=24)", ok,
            f"cluster {rep.count}/{model.boundary_count}, "
            f"ratio {ratio_end:.3f}, slope {fit.slope:.3f}", dt, 30.0)


def test_criterion_12_spectral_shift():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    vals = rng.uniform(-10.0, 10.0, 10_000)
    b = 11.5
    sh = spectral_shift(vals, b)
    back = sh.invert()
    roundtrip = float(np.max(np.abs(back - vals)) / np.max(np.abs(vals)))
    pos = np.sort(rng.uniform(0.05, 11.0, 500))
    order_ok = bool(np.all(np.diff(spectral_shift(pos, b).mapped) > 0))
    dt = time.perf_counter() - t0
    _report("criterion 12 (resolvent-set shift)",
            roundtrip <= 1e-12 and order_ok,
            f"round-trip {roundtrip:.2e}, order preserved {order_ok}", dt, 1.0)


def test_criterion_13_remainder_behavior(unit):
    t0 = time.perf_counter()
    details = []
    ok = True
    for a in (-5.0, 0.0):
        sp = realization_eigenvalues(unit, krein_bcspec(unit, a),
                                     (0.5, 5800.0))
        rep = remainder_fit(sp.eigenvalues, 1.0 / np.pi, 1, 1, 0.5,
                            (50.0, 5000.0))
        if rep.bounded:
            details.append(f"a={a:g}: bounded")
        else:
            details.append(f"a={a:g}: slope {rep.fit.slope:.3f}")
            ok = ok and rep.fit.slope <= 0.25
    dt = time.perf_counter() - t0
    _report("criterion 13 (counting remainder)", ok,
            "; ".join(details), dt, 60.0)
