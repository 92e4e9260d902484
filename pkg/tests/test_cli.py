import subprocess
import sys

import numpy as np
import pytest

from qbm_entropy.cli import main, parse_echo
from qbm_entropy.config import RunConfig
from qbm_entropy.errors import ConfigError

STATIC = ["--set", "scenario.gamma0=0.1", "--set", "scenario.T=1e3", "--set", "grid.count=12"]
K_UNIT = float(np.sqrt(1 - 0.01**2))
INVERTED = ["--set", "scenario.name=inverted", "--set", f"scenario.k={K_UNIT!r}",
            "--set", "scenario.gamma0=0.01", "--set", "scenario.T=1e3",
            "--set", "grid.start=0.05", "--set", "grid.stop=12", "--set", "grid.count=240"]


def _data(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])


def test_config_parsing_and_echo_round_trip():
    cfg = RunConfig.from_text("""
        # comment line
        scenario.name = inverted   # trailing comment
        scenario.gamma0 = 0.05
        grid.values = 0.5, 1.0, 2.0
        verify.window = 3,5
    """)
    assert cfg["scenario.name"] == "inverted"
    assert cfg["grid.values"] == [0.5, 1.0, 2.0]
    again = RunConfig.from_text(cfg.to_text())
    assert again.effective() == cfg.effective()
    assert "solver.rtol=1e-10" in cfg.to_text()


@pytest.mark.parametrize("text,field", [
    ("scenario.nme=static", "scenario.nme"),
    ("scenario.k=abc", "scenario.k"),
    ("bath.regime=pink", "bath.regime"),
    ("verify.window=5,3", "verify.window"),
])
def test_config_parse_errors_name_the_field(text, field):
    with pytest.raises(ConfigError) as err:
        RunConfig.from_text(text)
    assert err.value.field == field
    assert str(err.value).startswith(field)


@pytest.mark.parametrize("pairs,field", [
    (["scenario.k=-1"], "scenario.k"),
    (["scenario.gamma0=2"], "scenario.gamma0"),
    (["scenario.gamma0=0.1"], "scenario.T"),
    (["scenario.sigma=1", "scenario.r0=0.5"], "scenario.sigma"),
    (["scenario.name=desitter", "scenario.c=0.5"], "scenario.c"),
    (["scenario.name=desitter", "scenario.gamma0=0.1"], "scenario.gamma0"),
    (["grid.values=2,1"], "grid"),
    (["sweep.param=scenario.T"], "sweep.param"),
    (["sweep.param=scenario.name", "sweep.values=1"], "sweep.param"),
])
def test_config_validation_errors(pairs, field):
    with pytest.raises(ConfigError) as err:
        RunConfig().apply_overrides(pairs).validate()
    assert err.value.field == field


def test_default_grids():
    np.testing.assert_allclose(RunConfig().grid()[[0, -1]], [0.5, 100.0])
    z = RunConfig().apply_overrides(["scenario.name=desitter"]).grid()
    assert z[0] == -1.0 and z[-1] == pytest.approx(-1e-3) and np.all(np.diff(z) > 0)


def test_run_is_deterministic_and_echoes_config(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", *STATIC, "--out", str(a), "--quiet"]) == 0
    assert main(["run", *STATIC, "--out", str(b), "--quiet"]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.startswith("# qbm_entropy ")
    cfg = parse_echo(text)
    assert cfg["scenario.T"] == 1e3 and cfg["grid.count"] == 12
    # the echoed configuration reproduces the file
    cfg_file = tmp_path / "echo.cfg"
    cfg_file.write_text(cfg.to_text())
    c = tmp_path / "c.csv"
    assert main(["run", "--config", str(cfg_file), "--out", str(c), "--quiet"]) == 0
    assert c.read_bytes() == a.read_bytes()
    header, data = _data(text)
    assert header[0] == "z" and data.shape == (12, len(header))


def test_run_writes_stdout(capsys):
    assert main(["run", *STATIC, "--quiet"]) == 0
    header, data = _data(capsys.readouterr().out)
    assert "S" in header and np.all(data[:, header.index("S")] > 0)


def test_sweep_prepends_parameter(capsys):
    code = main(["sweep", *STATIC, "--set", "sweep.param=scenario.r0",
                 "--set", "sweep.values=0,1,2", "--quiet"])
    assert code == 0
    header, data = _data(capsys.readouterr().out)
    assert header[0] == "scenario.r0" and header[1] == "z"
    assert data.shape[0] == 36
    np.testing.assert_array_equal(np.unique(data[:, 0]), [0.0, 1.0, 2.0])


def test_sweep_needs_parameter(capsys):
    assert main(["sweep", *STATIC, "--quiet"]) == 2


def test_verify_pass_and_negative_control(capsys):
    args = ["verify", *INVERTED, "--set", "verify.law=high_T", "--set", "verify.window=8,11"]
    assert main([*args, "--quiet"]) == 0
    assert capsys.readouterr().out.startswith("PASS")
    # same run held to a slope tolerance the finite damping cannot meet
    assert main([*args, "--set", "verify.tolerance=0.001", "--quiet"]) == 4
    assert capsys.readouterr().out.startswith("FAIL")


def test_verify_reports_fit_errors(capsys):
    args = ["verify", "--set", "scenario.gamma0=0.1", "--set", "scenario.T=1e5",
            "--set", "scenario.sigma=1", "--set", "grid.start=40", "--set", "verify.law=high_T",
            "--set", "verify.window=0,1"]
    # static S has no r dependence to fit: too little spread in r
    assert main([*args, "--quiet"]) == 4
    assert "verification error" in capsys.readouterr().err


@pytest.mark.parametrize("args,code", [
    (["run", "--set", "scenario.bogus=1"], 2),
    (["run", "--set", "noequals"], 2),
    (["run", "--config", "/nonexistent/file.cfg"], 2),
    (["verify", *STATIC], 2),
    (["verify", *STATIC, "--set", "verify.law=zero_T", "--set", "verify.window=1,4"], 2),
    (["run", "--set", "scenario.k=10", "--set", "scenario.gamma0=0.1", "--set", "scenario.T=100",
      "--set", "scenario.r0=3", "--set", "grid.values=0.001"], 3),
])
def test_exit_codes(args, code, capsys):
    assert main([*args, "--quiet"]) == code
    err = capsys.readouterr().err
    assert ("config error" in err) if code == 2 else ("numerical failure" in err)


def test_list_scenarios(capsys):
    assert main(["list-scenarios"]) == 0
    out = capsys.readouterr().out
    for name in ("static", "inverted", "desitter"):
        assert name + ":" in out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "qbm_entropy.cli", "list-scenarios"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "desitter" in res.stdout
