"""Command-line front end: experiments, schemas, round trips, errors."""

import json
import os

import pytest

from spherelab import cli


BASE_INI = """
[system]
m = 2
n = 2
constellation = 4qam
snr_db = 15
"""


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def _read_csv(path):
    lines = open(path, encoding="utf-8").read().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def test_error_rate_experiment(tmp_path):
    cfgp = _write(tmp_path, "cfg.ini", BASE_INI + """
[error-rate]
snr_grid_db = 10, 14
norms = l2, linf
trials = 400
seed = 3
""")
    out = str(tmp_path / "er.csv")
    rc = cli.main(["error-rate", "--config", cfgp, "--out", out])
    assert rc == 0
    header, rows = _read_csv(out)
    assert header == ["norm", "snr_db", "p_err", "ci_half_width", "n"]
    assert len(rows) == 4  # 2 norms x 2 grid points
    assert {r[0] for r in rows} == {"l2", "linf"}
    assert os.path.exists(out + ".meta.json")


def test_sidecar_round_trip_byte_identical(tmp_path):
    cfgp = _write(tmp_path, "cfg.ini", BASE_INI + """
[error-rate]
snr_grid_db = 12
norms = l2
trials = 300
seed = 9
""")
    out1 = str(tmp_path / "a.csv")
    assert cli.main(["error-rate", "--config", cfgp, "--out", out1]) == 0
    out2 = str(tmp_path / "b.csv")
    assert cli.main(["error-rate", "--config", out1 + ".meta.json",
                     "--out", out2]) == 0
    assert open(out1, "rb").read() == open(out2, "rb").read()


def test_flag_overrides_change_the_run(tmp_path):
    cfgp = _write(tmp_path, "cfg.ini", BASE_INI + """
[error-rate]
snr_grid_db = 12
norms = l2
trials = 200
seed = 1
""")
    a = str(tmp_path / "a.csv")
    b = str(tmp_path / "c.csv")
    cli.main(["error-rate", "--config", cfgp, "--out", a])
    cli.main(["error-rate", "--config", cfgp, "--out", b, "--seed", "2"])
    assert open(a).read() != open(b).read()
    meta = json.load(open(b + ".meta.json"))
    assert meta["config"]["error-rate.seed"] == "2"


def test_complexity_vs_epsilon(tmp_path):
    cfgp = _write(tmp_path, "cfg.ini", """
[system]
m = 4
n = 4
constellation = 4qam
snr_db = 15

[complexity-vs-epsilon]
eps_grid = 1e-1, 1e-2
norms = l2, linf, ltilde
""")
    out = str(tmp_path / "ce.csv")
    assert cli.main(["complexity-vs-epsilon", "--config", cfgp, "--out", out]) == 0
    header, rows = _read_csv(out)
    assert header == ["norm", "eps", "analytic", "analytic_lo", "analytic_hi"]
    assert len(rows) == 6
    lt = [r for r in rows if r[0] == "ltilde"][0]
    assert lt[2] == ""  # no exact value, bounds only
    assert float(lt[3]) <= float(lt[4])


def test_complexity_vs_level(tmp_path):
    cfgp = _write(tmp_path, "cfg.ini", BASE_INI + """
[complexity-vs-level]
eps = 1e-2
norms = l2, linf
trials = 500
seed = 4
""")
    out = str(tmp_path / "cl.csv")
    assert cli.main(["complexity-vs-level", "--config", cfgp, "--out", out]) == 0
    header, rows = _read_csv(out)
    assert header == ["norm", "k", "analytic", "analytic_lo", "analytic_hi",
                      "empirical_mean", "ci_half_width"]
    assert len(rows) == 4  # 2 norms x 2 levels
    for r in rows:
        assert abs(float(r[5]) - float(r[2])) <= 6 * float(r[6]) + 1e-6


def test_complexity_vs_snr(tmp_path):
    cfgp = _write(tmp_path, "cfg.ini", BASE_INI + """
[complexity-vs-snr]
snr_grid_db = 10, 14
norms = l2
trials = 300
seed = 5
""")
    out = str(tmp_path / "cs.csv")
    assert cli.main(["complexity-vs-snr", "--config", cfgp, "--out", out]) == 0
    header, rows = _read_csv(out)
    assert header == ["norm", "snr_db", "empirical_mean", "ci_half_width", "n"]
    assert len(rows) == 2


def test_tpb_report_reference_value(tmp_path):
    cfgp = _write(tmp_path, "cfg.ini", """
[system]
m = 6
n = 6
constellation = 4qam
snr_db = 15

[tpb-report]
eps = 1e-2
""")
    out = str(tmp_path / "tpb.csv")
    assert cli.main(["tpb-report", "--config", cfgp, "--out", out]) == 0
    header, rows = _read_csv(out)
    k_bar_col = header.index("k_bar")
    assert all(r[k_bar_col] == "3" for r in rows)
    assert len(rows) == 6
    m_bar_col = header.index("m_bar")
    assert rows[0][m_bar_col] == ""  # k <= k_bar: no softer-pruned range


def test_validate_cdfs(tmp_path):
    cfgp = _write(tmp_path, "cfg.ini", BASE_INI + """
[validate-cdfs]
samples = 20000
seed = 6
""")
    out = str(tmp_path / "val.csv")
    assert cli.main(["validate-cdfs", "--config", cfgp, "--out", out]) == 0
    header, rows = _read_csv(out)
    assert header == ["check", "n", "ks_stat", "ks_critical", "pass"]
    assert len(rows) >= 5
    assert all(r[-1] == "True" for r in rows)


def test_pep_bounds(tmp_path):
    cfgp = _write(tmp_path, "cfg.ini", BASE_INI + """
[pep-bounds]
snr_grid_db = 10, 30
""")
    out = str(tmp_path / "pep.csv")
    assert cli.main(["pep-bounds", "--config", cfgp, "--out", out]) == 0
    header, rows = _read_csv(out)
    assert header == ["snr_db", "ub_inf", "ub_ml", "lb_ml", "beta", "beta_tilde"]
    for r in rows:
        assert float(r[3]) <= float(r[2])  # lb_ml <= ub_ml


def test_json_format(tmp_path):
    cfgp = _write(tmp_path, "cfg.ini", BASE_INI + """
[pep-bounds]
snr_grid_db = 10
""")
    out = str(tmp_path / "pep.json")
    assert cli.main(["pep-bounds", "--config", cfgp, "--out", out,
                     "--format", "json"]) == 0
    doc = json.load(open(out))
    assert isinstance(doc, list) and doc[0]["snr_db"] == 10.0


def test_bad_config_exits_nonzero_without_outputs(tmp_path, capsys):
    cfgp = _write(tmp_path, "bad.ini", "[system]\nm = chairs\nn = 2\n"
                  "constellation = 4qam\n")
    out = str(tmp_path / "never.csv")
    rc = cli.main(["error-rate", "--config", cfgp, "--out", out])
    assert rc == 1
    err = capsys.readouterr().err
    assert err.strip().count("\n") == 0  # single-line diagnostic
    assert not os.path.exists(out)
    assert not os.path.exists(out + ".meta.json")
    assert not any(p.name.startswith("never") for p in tmp_path.iterdir())


def test_missing_config_file(tmp_path):
    rc = cli.main(["tpb-report", "--config", str(tmp_path / "nope.ini")])
    assert rc == 1


def test_sidecar_wrong_experiment_rejected(tmp_path):
    cfgp = _write(tmp_path, "cfg.ini", BASE_INI + """
[pep-bounds]
snr_grid_db = 10
""")
    out = str(tmp_path / "pep.csv")
    cli.main(["pep-bounds", "--config", cfgp, "--out", out])
    rc = cli.main(["error-rate", "--config", out + ".meta.json"])
    assert rc == 1
