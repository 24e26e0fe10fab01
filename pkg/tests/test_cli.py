import json

import numpy as np
import pytest

from kreinlab.cli import main


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


# ---------------------------------------------------------------- dirichlet


def test_dirichlet_preset_rows(tmp_path, capsys):
    cfg = _write(tmp_path, "d.cfg",
                 "problem.preset = interval-unit\nsweep.count = 3\n")
    code, out, _ = _run(capsys, ["dirichlet", "--config", cfg])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "index,eigenvalue"
    vals = [float(line.split(",")[1]) for line in lines[1:]]
    exact = (np.arange(1, 4) * np.pi) ** 2
    assert np.max(np.abs(np.array(vals) / exact - 1.0)) <= 1e-10


def test_dirichlet_zero_count(tmp_path, capsys):
    cfg = _write(tmp_path, "d.cfg",
                 "problem.preset = interval-unit\nsweep.count = 0\n")
    code, out, _ = _run(capsys, ["dirichlet", "--config", cfg])
    assert code == 0
    assert out == "index,eigenvalue\n"


def test_missing_config_is_usage_error(capsys):
    code, _, err = _run(capsys, ["dirichlet", "--config", "/nonexistent.cfg"])
    assert code == 2
    assert "config error" in err


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = _write(tmp_path, "d.cfg", "problem.preset = interval-unit\nbogus.key = 1\n")
    code, _, err = _run(capsys, ["dirichlet", "--config", cfg])
    assert code == 2


def test_determinism_byte_identical(tmp_path, capsys):
    cfg = _write(tmp_path, "d.cfg",
                 "problem.preset = interval-unit\nsweep.count = 4\n")
    _, out1, _ = _run(capsys, ["dirichlet", "--config", cfg, "--seed", "9"])
    _, out2, _ = _run(capsys, ["dirichlet", "--config", cfg, "--seed", "9"])
    assert out1 == out2


def test_report_written_next_to_output(tmp_path, capsys):
    cfg = _write(tmp_path, "d.cfg",
                 "problem.preset = interval-unit\nsweep.count = 2\n")
    out_path = tmp_path / "spec.csv"
    code, _, _ = _run(capsys, ["dirichlet", "--config", cfg,
                               "--out", str(out_path)])
    assert code == 0
    report = json.loads((tmp_path / "spec.csv.report.json").read_text())
    assert report["command"] == "dirichlet"
    assert report["summary"]["count"] == 2
    assert "wall_time_s" in report


# ---------------------------------------------------------------- krein1d


def test_krein1d_all_methods(tmp_path, capsys):
    cfg = _write(tmp_path, "k.cfg", "\n".join([
        "problem.preset = interval-unit",
        "extension.a = 0",
        "extension.method = all",
        "sweep.window = 1,100",
    ]) + "\n")
    out_path = tmp_path / "k.csv"
    code, _, _ = _run(capsys, ["krein1d", "--config", cfg, "--out", str(out_path)])
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert lines[0] == "index,buckling,reduction,shooting"
    first = [float(tok) for tok in lines[1].split(",")[1:]]
    assert np.max(np.abs(np.array(first) - 4 * np.pi ** 2)) <= 1e-6
    report = json.loads((tmp_path / "k.csv.report.json").read_text())
    assert report["summary"]["max_disagreement"] <= 1e-6


def test_krein1d_buckling_requires_zero(tmp_path, capsys):
    cfg = _write(tmp_path, "k.cfg", "\n".join([
        "problem.preset = interval-unit",
        "extension.a = 5",
        "extension.method = buckling",
    ]) + "\n")
    code, _, err = _run(capsys, ["krein1d", "--config", cfg])
    assert code == 2


# ---------------------------------------------------------------- gmu-scan


def test_gmu_scan_interval_slope(tmp_path, capsys):
    mus = ",".join(str(-(10.0 ** k)) for k in np.arange(2.0, 6.5, 0.5))
    cfg = _write(tmp_path, "g.cfg",
                 f"problem.preset = interval-unit\nsweep.mu = {mus}\n")
    code, out, _ = _run(capsys, ["gmu-scan", "--config", cfg])
    assert code == 0
    fit_line = [ln for ln in out.splitlines() if ln.startswith("# fit:")][0]
    fit = json.loads(fit_line[len("# fit:"):])
    assert 0.45 <= fit["slope"] <= 0.55


def test_gmu_scan_single_zero(tmp_path, capsys):
    cfg = _write(tmp_path, "g.cfg",
                 "problem.preset = interval-unit\nsweep.mu = 0\n")
    code, out, _ = _run(capsys, ["gmu-scan", "--config", cfg])
    assert code == 0
    assert out.splitlines()[1] == "0,0"


def test_gmu_scan_grid_positive(tmp_path, capsys):
    cfg = _write(tmp_path, "g.cfg", "grid.m = 8\nsweep.mu = -1\n")
    code, out, _ = _run(capsys, ["gmu-scan", "--config", cfg])
    assert code == 0
    assert float(out.splitlines()[1].split(",")[1]) > 0


def test_gmu_scan_rejects_increasing_grid(tmp_path, capsys):
    cfg = _write(tmp_path, "g.cfg",
                 "problem.preset = interval-unit\nsweep.mu = -10,-5\n")
    code, _, _ = _run(capsys, ["gmu-scan", "--config", cfg])
    assert code == 2


def test_gmu_scan_rejects_high_mu(tmp_path, capsys):
    cfg = _write(tmp_path, "g.cfg",
                 "problem.preset = interval-unit\nsweep.mu = 15\n")
    code, _, _ = _run(capsys, ["gmu-scan", "--config", cfg])
    assert code == 2


# ---------------------------------------------------------------- weyl-fit


def _grid_spectrum(tmp_path, capsys, m=12):
    cfg = _write(tmp_path, "grid.cfg", f"grid.m = {m}\ngrid.a = -1\ngrid.r = 1\n")
    out_path = tmp_path / "gspec.csv"
    code, _, _ = _run(capsys, ["grid2d-spectrum", "--config", cfg,
                               "--out", str(out_path)])
    assert code == 0
    return out_path


def test_weyl_fit_report(tmp_path, capsys):
    spec_path = _grid_spectrum(tmp_path, capsys)
    cfg = _write(tmp_path, "w.cfg", "\n".join([
        f"weyl.spectrum = {spec_path}",
        "weyl.n = 2",
        "weyl.m = 1",
        "weyl.r = 1",
        "weyl.window = 50,250",
        "weyl.c_a = auto",
    ]) + "\n")
    code, out, _ = _run(capsys, ["weyl-fit", "--config", cfg])
    assert code == 0
    rep = json.loads(out)
    assert abs(rep["c_a"] - 1.0 / (4 * np.pi)) <= 1e-12
    assert rep["ratio_at_window_end"] > 0


def test_weyl_fit_window_above_spectrum(tmp_path, capsys):
    spec_path = _grid_spectrum(tmp_path, capsys)
    cfg = _write(tmp_path, "w.cfg", "\n".join([
        f"weyl.spectrum = {spec_path}",
        "weyl.window = 50,1e9",
    ]) + "\n")
    code, _, _ = _run(capsys, ["weyl-fit", "--config", cfg])
    assert code == 2


def test_weyl_fit_malformed_csv(tmp_path, capsys):
    bad = _write(tmp_path, "bad.csv", "a,b\n1,notanumber\n")
    cfg = _write(tmp_path, "w.cfg",
                 f"weyl.spectrum = {bad}\nweyl.window = 1,2\n")
    code, _, _ = _run(capsys, ["weyl-fit", "--config", cfg])
    assert code == 2


# ---------------------------------------------------------------- kyfan


def test_kyfan_no_violations(capsys):
    code, out, _ = _run(capsys, ["kyfan", "--trials", "20", "--dim", "10",
                                 "--seed", "7"])
    assert code == 0
    rep = json.loads(out)
    assert rep["violations"] == 0


def test_kyfan_deterministic(capsys):
    _, out1, _ = _run(capsys, ["kyfan", "--trials", "5", "--dim", "6",
                               "--seed", "11"])
    _, out2, _ = _run(capsys, ["kyfan", "--trials", "5", "--dim", "6",
                               "--seed", "11"])
    assert out1 == out2


def test_kyfan_dim_one(capsys):
    code, out, _ = _run(capsys, ["kyfan", "--trials", "3", "--dim", "1",
                                 "--seed", "2"])
    assert code == 0
    assert json.loads(out)["violations"] == 0


# ---------------------------------------------------------------- others


def test_asymptotics_table(capsys):
    code, out, _ = _run(capsys, ["asymptotics"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "m,n,N,theta_N,theta_legacy,beta_prime"
    rows = {tuple(ln.split(",")[:3]): ln.split(",")[3:] for ln in lines[1:]}
    assert rows[("1", "2", "1")][0] == "2/3"
    assert rows[("1", "2", "5")][0] == "10/11"
    assert rows[("1", "1", "1")][1] == "1"


def test_resolvent_check_json(tmp_path, capsys):
    cfg = _write(tmp_path, "r.cfg",
                 "problem.preset = interval-unit\nextension.a = -5\n")
    code, out, _ = _run(capsys, ["resolvent-check", "--config", cfg])
    assert code == 0
    rep = json.loads(out)
    assert max(rep["residuals"].values()) <= 1e-6


def test_resolvent_check_singular_t_is_numeric_failure(tmp_path, capsys):
    cfg = _write(tmp_path, "r.cfg",
                 "problem.preset = interval-unit\nextension.a = 0\n")
    code, _, err = _run(capsys, ["resolvent-check", "--config", cfg])
    assert code == 3
    assert "numeric failure" in err
