"""Command-line front end: scenario configs, sweeps, CSV/JSON emission.

Config files are flat key-value text: one `section.key = value` per line,
`#` comments.  Unknown keys are rejected.  Every run writes a RunReport
(JSON) next to the output file (or to stderr when writing to stdout).
Exit codes: 0 success, 2 config/usage error, 3 numeric failure.
"""

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .errors import ConfigError, KreinlabError
from .interval1d import SturmLiouvilleProblem, dirichlet_eigenvalues, unit_problem
from . import extensions1d as ext
from . import grid2d
from . import spectral

_FMT = "%.17g"


# ----------------------------------------------------------------------
# config parsing


_SCHEMA = {
    "problem.preset": str,
    "problem.p": str,
    "problem.q": str,
    "problem.interval": str,
    "extension.a": float,
    "extension.method": str,
    "sweep.count": int,
    "sweep.window": str,
    "sweep.mu": str,
    "grid.m": int,
    "grid.a": float,
    "grid.r": float,
    "grid.delta": float,
    "weyl.n": int,
    "weyl.m": int,
    "weyl.c_a": str,
    "weyl.r": float,
    "weyl.window": str,
    "weyl.spectrum": str,
    "asymptotics.m_values": str,
    "asymptotics.n_values": str,
    "asymptotics.N_values": str,
    "kyfan.trials": int,
    "kyfan.dim": int,
}


def parse_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    cfg = {"_raw": text}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, _, value = body.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in cfg:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        caster = _SCHEMA[key]
        try:
            cfg[key] = caster(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}") from exc
        if caster is float and not math.isfinite(cfg[key]):
            raise ConfigError(f"line {lineno}: non-finite value for {key!r}")
    return cfg


def _floats(text, key) -> list:
    try:
        vals = [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad numeric list for {key!r}") from exc
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"non-finite entry in {key!r}")
    return vals


def _coefficient(spec_text, key):
    """Named preset or `poly:c0,c1,...` (coefficients by ascending power)."""
    text = str(spec_text).strip()
    if text.startswith("poly:"):
        coeffs = _floats(text[5:], key)
        if not coeffs:
            raise ConfigError(f"empty coefficient list for {key!r}")

        def fn(x, _c=tuple(coeffs)):
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x)
            for c in reversed(_c):
                out = out * x + c
            return out

        return fn
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"bad coefficient descriptor for {key!r}: {text!r}") from exc


def problem_from_config(cfg) -> SturmLiouvilleProblem:
    preset = cfg.get("problem.preset")
    if preset is not None:
        if preset != "interval-unit":
            raise ConfigError(f"unknown preset {preset!r}")
        return unit_problem()
    p = _coefficient(cfg.get("problem.p", "poly:1"), "problem.p")
    q = _coefficient(cfg.get("problem.q", "poly:0"), "problem.q")
    iv = _floats(cfg.get("problem.interval", "0,1"), "problem.interval")
    if len(iv) != 2 or not iv[0] < iv[1]:
        raise ConfigError("problem.interval must be 'lo,hi' with lo < hi")
    return SturmLiouvilleProblem(p, q, (iv[0], iv[1]))


# ----------------------------------------------------------------------
# output plumbing


class _Run:
    def __init__(self, command, cfg_text, seed):
        self.command = command
        self.t0 = time.perf_counter()
        self.config_hash = hashlib.sha256(
            (cfg_text or "").encode("utf-8")).hexdigest()[:16]
        self.seed = seed
        self.warnings = []
        self.summary = {}

    def report(self):
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "versions": {
                "kreinlab": __version__,
                "numpy": np.__version__,
                "python": sys.version.split()[0],
            },
            "wall_time_s": round(time.perf_counter() - self.t0, 6),
            "summary": self.summary,
            "warnings": self.warnings,
        }


def _emit(args, text, run):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(args.out + ".report.json", "w", encoding="utf-8") as fh:
            json.dump(run.report(), fh, indent=1, sort_keys=True)
            fh.write("\n")
    else:
        sys.stdout.write(text)
        json.dump(run.report(), sys.stderr, indent=1, sort_keys=True)
        sys.stderr.write("\n")


def _csv(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            tok if isinstance(tok, str) else _FMT % tok for tok in row))
    return "\n".join(lines) + "\n"


def _json_text(obj):
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


# ----------------------------------------------------------------------
# subcommands


def cmd_dirichlet(args, cfg, run):
    problem = problem_from_config(cfg)
    count = cfg.get("sweep.count", 10)
    if count < 0:
        raise ConfigError("sweep.count must be nonnegative")
    evs = dirichlet_eigenvalues(problem, count) if count else []
    run.summary = {"count": len(evs), "shift": problem.shift}
    return _csv(["index", "eigenvalue"],
                [(str(i + 1), ev) for i, ev in enumerate(evs)])


def cmd_krein1d(args, cfg, run):
    problem = problem_from_config(cfg)
    a = cfg.get("extension.a", 0.0)
    method = cfg.get("extension.method", "all")
    window = _floats(cfg.get("sweep.window", "1,100"), "sweep.window")
    if len(window) != 2 or not window[0] < window[1]:
        raise ConfigError("sweep.window must be 'lo,hi' with lo < hi")
    if method not in ("shooting", "reduction", "buckling", "all"):
        raise ConfigError(f"unknown method {method!r}")
    if method == "buckling" and a != 0.0:
        raise ConfigError("buckling pipeline is only valid for a = 0")
    columns = {}
    if method in ("shooting", "all"):
        spec = ext.krein_bcspec(problem, a)
        columns["shooting"] = ext.realization_eigenvalues(
            problem, spec, window).eigenvalues
    if method in ("reduction", "all"):
        columns["reduction"] = ext.reduction_eigenvalues(problem, a, window)
    if (method == "buckling" or (method == "all" and a == 0.0)):
        bk = ext.buckling_eigenvalues(problem, max(
            4, 2 + int(np.sqrt(window[1]) * problem.length)))
        columns["buckling"] = bk[(bk >= window[0]) & (bk <= window[1])]
    names = sorted(columns)
    nrows = max(len(v) for v in columns.values())
    if min(len(v) for v in columns.values()) != nrows:
        run.warnings.append("pipelines returned different eigenvalue counts")
    rows = []
    for i in range(nrows):
        rows.append([str(i + 1)] + [
            (columns[n][i] if i < len(columns[n]) else "") for n in names])
    disagree = 0.0
    for n1 in names:
        for n2 in names:
            k = min(len(columns[n1]), len(columns[n2]))
            if k:
                disagree = max(disagree, float(np.max(
                    np.abs(columns[n1][:k] - columns[n2][:k]))))
    run.summary = {"a": a, "methods": names, "max_disagreement": disagree,
                   "count": nrows}
    return _csv(["index"] + names, rows)


def cmd_resolvent_check(args, cfg, run):
    problem = problem_from_config(cfg)
    a = cfg.get("extension.a", -5.0)
    spec = ext.krein_bcspec(problem, a)
    x0, x1 = problem.x0, problem.x1
    length = problem.length
    cases = {
        "dirichlet_sin": ext.krein_resolvent_check(
            problem, ext.dirichlet_bcspec(),
            lambda x: np.sin(np.pi * (x - x0) / length)),
        "krein_sin": ext.krein_resolvent_check(
            problem, spec, lambda x: np.sin(np.pi * (x - x0) / length)),
        "krein_kernel_element": ext.krein_resolvent_check(
            problem, spec, lambda x: (x1 - x) / length),
    }
    run.summary = {"a": a, "max_residual": max(cases.values())}
    return _json_text({"residuals": cases, "a": a})


def cmd_gmu_scan(args, cfg, run):
    mus = _floats(cfg.get("sweep.mu", ""), "sweep.mu")
    if not mus:
        raise ConfigError("sweep.mu must list the scan points")
    if any(m2 >= m1 for m1, m2 in zip(mus, mus[1:])):
        raise ConfigError("sweep.mu must be strictly decreasing")
    if cfg.get("grid.m"):
        gm = grid2d.build_model(cfg["grid.m"], cfg["grid.m"])
        basis = grid2d.harmonic_basis(gm)
        if any(mu >= gm.lambda_min for mu in mus):
            raise ConfigError("mu grid must stay below the Dirichlet bottom")
        table = grid2d.gmu_grid_scan(gm, basis, mus)
        fit = None
        pos = table[:, 1] > 0
        if np.count_nonzero(pos) >= 3:
            from .numkernel import loglog_fit
            t = np.abs(table[pos, 0])
            fit = loglog_fit(t, table[pos, 1], (np.max(t) / 10.0, np.max(t)))
    else:
        problem = problem_from_config(cfg)
        if any(mu >= problem.lambda1 for mu in mus):
            raise ConfigError("mu grid must stay below the Dirichlet bottom")
        scan = ext.gmu_scan(problem, mus)
        table = np.column_stack([scan.mus, scan.values])
        fit = scan.fit
    fitobj = None
    if fit is not None:
        fitobj = {"slope": fit.slope, "window": list(fit.window),
                  "residual_rms": fit.residual_rms}
    run.summary = {"points": len(mus), "fit": fitobj}
    csv_text = _csv(["mu", "m_gmu"], [(row[0], row[1]) for row in table])
    return csv_text + "# fit: " + json.dumps(fitobj, sort_keys=True) + "\n"


def cmd_grid2d_spectrum(args, cfg, run):
    msize = cfg.get("grid.m", 24)
    a = cfg.get("grid.a", -1.0)
    r = cfg.get("grid.r", 1.0)
    delta = cfg.get("grid.delta", 0.05)
    model = grid2d.build_model(msize, msize)
    basis = grid2d.harmonic_basis(model)
    lam, rep = grid2d.spectrum_and_cluster(model, basis, a, r, delta)
    run.summary = {
        "m": msize, "a": a, "boundary_count": model.boundary_count,
        "cluster_count": rep.count, "cluster_radius": rep.radius,
    }
    return _csv(["index", "eigenvalue"],
                [(str(i + 1), ev) for i, ev in enumerate(lam)])


def cmd_weyl_fit(args, cfg, run):
    path = cfg.get("weyl.spectrum")
    if not path:
        raise ConfigError("weyl.spectrum must point at a spectrum CSV")
    try:
        raw = np.genfromtxt(path, delimiter=",", names=True)
    except OSError as exc:
        raise ConfigError(f"cannot read spectrum CSV: {exc}") from exc
    if raw.dtype.names is None or "eigenvalue" not in raw.dtype.names:
        raise ConfigError("spectrum CSV needs an 'eigenvalue' column")
    seq = np.sort(np.atleast_1d(raw["eigenvalue"]).astype(float))
    if np.any(~np.isfinite(seq)):
        raise ConfigError("spectrum CSV contains non-finite entries")
    n = cfg.get("weyl.n", 2)
    m = cfg.get("weyl.m", 1)
    r = cfg.get("weyl.r", 0.0)
    window = _floats(cfg.get("weyl.window", ""), "weyl.window")
    if len(window) != 2 or not window[0] < window[1]:
        raise ConfigError("weyl.window must be 'lo,hi' with lo < hi")
    if window[1] > float(seq[-1]):
        raise ConfigError("weyl.window exceeds the computed spectrum")
    ca_text = cfg.get("weyl.c_a", "auto")
    if ca_text == "auto":
        if n == 2:
            c_a = spectral.weyl_constant(2, m, volume=1.0).value
        elif n == 1:
            c_a = spectral.weyl_constant(1, m, p=1.0, interval=(0.0, 1.0)).value
        else:
            raise ConfigError("weyl.c_a=auto supports n in {1, 2}")
    else:
        c_a = float(ca_text)
    power = n / (2.0 * m)
    ratio_end = float(spectral.weyl_ratio_table(
        seq, r, c_a, power, [window[1]])[0])
    rem = spectral.remainder_fit(seq, c_a, n, m, r, window)
    out = {
        "c_a": c_a,
        "r": r,
        "window": list(window),
        "ratio_at_window_end": ratio_end,
        "remainder": "bounded" if rem.bounded else "fitted",
        "remainder_slope": None if rem.bounded else rem.fit.slope,
    }
    run.summary = out
    return _json_text(out)


def cmd_kyfan(args, cfg, run):
    trials = cfg.get("kyfan.trials", args.trials)
    dim = cfg.get("kyfan.dim", args.dim)
    if trials < 1 or dim < 1:
        raise ConfigError("kyfan needs trials >= 1 and dim >= 1")
    rng = np.random.default_rng(args.seed)
    checked = 0
    violations = 0
    worst = math.inf
    for _ in range(trials):
        b = rng.standard_normal((dim, dim))
        b = 0.5 * (b + b.T)
        s = rng.standard_normal((dim, dim))
        s = 0.5 * (s + s.T)
        rep = spectral.kyfan_check(b, s)
        checked += rep.checked
        violations += rep.violations
        worst = min(worst, rep.worst_margin)
    out = {"trials": trials, "dim": dim, "seed": args.seed,
           "checked": checked, "violations": violations,
           "worst_margin": worst if checked else 0.0}
    run.summary = out
    return _json_text(out)


def cmd_asymptotics(args, cfg, run):
    from fractions import Fraction

    ms = [int(v) for v in _floats(cfg.get("asymptotics.m_values", "1,2"), "m")]
    ns = [int(v) for v in _floats(cfg.get("asymptotics.n_values", "1,2,3"), "n")]
    bigs = [int(v) for v in _floats(cfg.get("asymptotics.N_values", "1,2,3,4,5,6"), "N")]
    rows = []
    for m in ms:
        for n in ns:
            for big_n in bigs:
                th = spectral.theta_exponents(m, n, big_n)
                alpha = Fraction(2 * m * big_n, n)
                beta = Fraction(2 * m * big_n + 1, n)
                gamma = (None if n == 1 else Fraction(2 * m * big_n, n - 1))
                bprime = spectral.perturbation_exponent(alpha, beta, gamma)
                legacy = th["theta_legacy"]
                rows.append((str(m), str(n), str(big_n),
                             str(th["theta_N"]),
                             "-" if legacy is None else str(legacy),
                             str(bprime)))
    run.summary = {"rows": len(rows)}
    return _csv(["m", "n", "N", "theta_N", "theta_legacy", "beta_prime"], rows)


_COMMANDS = {
    "dirichlet": cmd_dirichlet,
    "krein1d": cmd_krein1d,
    "resolvent-check": cmd_resolvent_check,
    "gmu-scan": cmd_gmu_scan,
    "grid2d-spectrum": cmd_grid2d_spectrum,
    "weyl-fit": cmd_weyl_fit,
    "kyfan": cmd_kyfan,
    "asymptotics": cmd_asymptotics,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kreinlab",
        description="spectra of Krein-like extensions on exactly solvable models")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", default=None, help="scenario config path")
    parser.add_argument("--out", default=None, help="output path (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default=None,
                        help="accepted for compatibility; commands pick their format")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=200, help="kyfan trials")
    parser.add_argument("--dim", type=int, default=30, help="kyfan dimension")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    cfg = {}
    if args.config is not None:
        try:
            cfg = parse_config(args.config)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
    run = _Run(args.command, cfg.get("_raw", ""), args.seed)
    try:
        text = _COMMANDS[args.command](args, cfg, run)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (KreinlabError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    _emit(args, text, run)
    return 0


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
