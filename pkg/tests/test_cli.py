import csv
import json
import subprocess
import sys

import pytest

from ramanpair import cli
from ramanpair.errors import ConfigError
from ramanpair.output import format_number


def run(tmp_path, *args):
    return cli.main(list(args) + ["--out", str(tmp_path)])


def read_csv(path):
    lines = path.read_text().splitlines()
    meta = [l for l in lines if l.startswith("#")]
    rows = list(csv.reader(l for l in lines if not l.startswith("#")))
    return meta, rows


def test_fig3_output(tmp_path):
    assert run(tmp_path, "fig3", "--grid", "dtp=-2:2:5") == 0
    meta, rows = read_csv(tmp_path / "fig3.csv")
    assert rows[0][0] == "dtp" and len(rows) == 6
    assert "# angular_convention: 1" in meta
    assert any(m.startswith("# param.delta1:") for m in meta)
    assert any(m.startswith("# grid.dtp:") for m in meta)
    assert all(len(c.split("e")[0].replace("-", "").replace(".", "")) == 17 for c in rows[1])


def test_byte_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert cli.main(["fig4", "--grid", "dtp=-3:3:7", "--out", str(d)]) == 0
    assert (a / "fig4.csv").read_bytes() == (b / "fig4.csv").read_bytes()


def test_sweep_worker_count_independent(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["sweep", "--quantity", "re_beta_plus", "--grid", "dtp=-4:4:9"]
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b), "--jobs", "3"]) == 0
    assert (a / "sweep_re_beta_plus.csv").read_bytes() == \
        (b / "sweep_re_beta_plus.csv").read_bytes()


def test_two_axis_sweep(tmp_path):
    assert run(tmp_path, "sweep", "--quantity", "alpha21_sq_closed",
               "--grid", "L=0.01:0.05:3", "--grid", "dtp=2:3:2") == 0
    _, rows = read_csv(tmp_path / "sweep_alpha21_sq_closed.csv")
    assert rows[0] == ["L", "dtp", "alpha21_sq_closed"] and len(rows) == 7


def test_config_and_overrides(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"angular_convention": "2pi", "delta1": "100*gamma"}))
    assert run(tmp_path, "fig4", "--config", str(cfg), "--grid", "dtp=0:1:2",
               "--set", "omega2_rabi=4*gamma") == 0
    meta, _ = read_csv(tmp_path / "fig4.csv")
    assert "# angular_convention: 2pi" in meta
    assert f"# param.omega2_rabi: {format_number(4 * 2 * 3.141592653589793 * 1e7)} " \
           f"{format_number(0.0)}j" in meta


def test_convention_flag_wins(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"angular_convention": "2pi"}))
    assert run(tmp_path, "fig4", "--config", str(cfg), "--convention", "1",
               "--grid", "dtp=0:1:2") == 0
    meta, _ = read_csv(tmp_path / "fig4.csv")
    assert "# angular_convention: 1" in meta


def test_efficiency_job(tmp_path):
    assert run(tmp_path, "efficiency") == 0
    doc = json.loads((tmp_path / "efficiency.json").read_text())
    assert doc["report"]["a_eff_convention"] == "pi_w0_sq"
    assert doc["report"]["eta_tot1"] == doc["report"]["eta1"] * 0.09
    assert "SPDC" in (tmp_path / "efficiency.txt").read_text()


def test_oracle_check_job(tmp_path):
    assert run(tmp_path, "oracle-check", "--set", "samples=5") == 0
    text = (tmp_path / "oracle_check.txt").read_text()
    assert "samples: 5" in text and "oracle tolerance 1e-6: PASS" in text


def test_fig5_and_spectra_jobs(tmp_path):
    assert run(tmp_path, "fig5", "--grid", "z=1:2:2") == 0
    assert run(tmp_path, "fig9", "--grid", "zeta=-600:600:13") == 0
    assert run(tmp_path, "fig10", "--grid", "zeta=-600:600:13") == 0
    _, rows = read_csv(tmp_path / "fig10.csv")
    assert rows[0] == ["zeta", "g_plus", "g_minus", "g_probe"]


def test_fig6_single_k(tmp_path):
    assert run(tmp_path, "fig6", "--set", "K=2e8", "--grid", "tau=-2e-7:2e-7:5") == 0
    meta, rows = read_csv(tmp_path / "fig6_K2e+08.csv")
    assert rows[0] == ["tau_d", "G2", "g2_norm", "Rc"]
    assert any(m.startswith("# epsilon:") for m in meta)
    assert any(m.startswith("# quadrature.vacuum_points:") for m in meta)


@pytest.mark.parametrize("args", [
    ["fig3", "--grid", "dtp=5:1:3"],
    ["fig3", "--grid", "dtp=0:1:0"],
    ["fig3", "--grid", "dtp=0:1"],
    ["fig3", "--grid", "zeta=0:1:3"],
    ["fig3", "--set", "nonsense=1"],
    ["fig3", "--set", "gamma21=-1"],
    ["sweep", "--quantity", "nope", "--grid", "dtp=0:1:2"],
    ["sweep", "--quantity", "re_beta_plus"],
    ["sweep", "--quantity", "re_beta_plus", "--grid", "k1=1e8:2e8:2"],
    ["efficiency", "--set", "a_eff_convention=square"],
])
def test_config_errors_exit_2(tmp_path, capsys, args):
    assert run(tmp_path, *args) == 2
    assert "config error" in capsys.readouterr().err


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{")
    assert run(tmp_path, "fig3", "--config", str(cfg)) == 2


def test_argparse_error_exit_2():
    with pytest.raises(SystemExit) as err:
        cli.main(["nonsense"])
    assert err.value.code == 2


def test_numerical_error_exit_3(tmp_path, capsys):
    assert run(tmp_path, "sweep", "--quantity", "correlation_time", "--grid", "L=0:0:1") == 3
    err = capsys.readouterr().err
    assert "correlation.normalize_g2" in err and "L=0.0" in err


def test_io_error_exit_4(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["fig3", "--grid", "dtp=0:1:2", "--out", str(blocker / "sub")]) == 4


def test_missing_config_exit_4(tmp_path):
    assert run(tmp_path, "fig3", "--config", str(tmp_path / "missing.json")) == 4


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert cli.main(["fig4", "--grid", "dtp=0:1:2"]) == 0
    assert (tmp_path / "env" / "fig4.csv").exists()


def test_help_lists_default_grids():
    text = cli.build_parser().format_help()
    assert "fig3: dtp=-40:40:1601" in text and cli.OUT_ENV in text


def test_parse_grid_units():
    g = cli.parse_grid("-2 us:2 us:5", {"us": 1e-6})
    assert g == (-2e-6, 2e-6, 5)
    with pytest.raises(ConfigError):
        cli.parse_grid("1:1:3", {})


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "ramanpair.cli", "--help"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "oracle-check" in out.stdout


def test_format_number():
    assert format_number(1.0) == "1.0000000000000000e+00"
    assert format_number(float("nan")) == ""
    assert format_number(True) == "1"
