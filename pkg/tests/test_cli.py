import json
import subprocess
import sys
from pathlib import Path

import pytest

from fermiszego import cli, experiments
from fermiszego.config import ConfigError, load_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMALL = """
name = "small"
seed = 7

[potential]
kind = "harmonic"

[run]
mu = 1.0
hbar = {hbars}
box = [-2.2, 2.2]

[[test_functions]]
name = "x"
kind = "polynomial"
parameters = [0.0, 1.0]

[spectrum.reference]
box = [-8.0, 8.0]
n = 255
hbar = 0.05
count = 4
tolerance = {tol}

[clt]
residual_functions = ["x"]
eta_step = {eta_step}

[szego]
N = [8, 16, 32]

[[szego.symbols]]
name = "2cos"
kind = "cosine"
amplitude = 2.0
k = 1
limit = 1.0
"""


def _write(tmp_path, hbars="[0.1, 0.05]", tol=1.0, eta_step=0.05):
    p = tmp_path / "small.toml"
    p.write_text(SMALL.format(hbars=hbars, tol=tol, eta_step=eta_step))
    return p


@pytest.mark.parametrize("name", ["harmonic", "quartic", "double_well"])
def test_shipped_configs_validate(name):
    cfg = load_config(CONFIGS / f"{name}.toml")
    assert cfg.name == name
    assert all(a > b for a, b in zip(cfg.hbars, cfg.hbars[1:]))


def test_increasing_hbar_rejected(tmp_path):
    with pytest.raises(ConfigError, match="strictly decreasing"):
        load_config(_write(tmp_path, hbars="[0.05, 0.1]"))
    assert cli.main(["spectrum", "--config", str(_write(tmp_path, hbars="[0.05, 0.1]")),
                     "--out", str(tmp_path / "o")]) == cli.EXIT_VALIDATION


def test_unknown_test_function_rejected(tmp_path):
    p = _write(tmp_path)
    p.write_text(p.read_text().replace('residual_functions = ["x"]', 'residual_functions = ["y"]'))
    with pytest.raises(ConfigError, match="unknown test function"):
        load_config(p)


def test_schema_violation_rejected(tmp_path):
    p = _write(tmp_path)
    p.write_text(p.read_text().replace('mu = 1.0', 'mu = "one"'))
    assert cli.main(["spectrum", "--config", str(p)]) == cli.EXIT_VALIDATION


def test_missing_section_rejected(tmp_path):
    assert cli.main(["multicut", "--config", str(_write(tmp_path)),
                     "--out", str(tmp_path)]) == cli.EXIT_VALIDATION


def test_numerical_failure_exit_code(tmp_path):
    p = _write(tmp_path, eta_step=0.5)
    assert cli.main(["clt", "--config", str(p), "--out", str(tmp_path / "o")]) == \
        cli.EXIT_NUMERICAL


def test_acceptance_failure_exit_code(tmp_path):
    p = _write(tmp_path, tol=1e-12)
    assert cli.main(["spectrum", "--config", str(p), "--out", str(tmp_path / "o")]) == \
        cli.EXIT_ACCEPTANCE


def test_szego_outputs_and_idempotence(tmp_path):
    p = _write(tmp_path)
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert cli.main(["szego", "--config", str(p), "--out", str(out)]) == cli.EXIT_OK
        outs.append(out)
    a = (outs[0] / "szego" / "small.csv").read_bytes()
    b = (outs[1] / "szego" / "small.csv").read_bytes()
    assert a == b
    header, *rows = a.decode().splitlines()
    assert header.startswith("symbol,N,log_det")
    resid = [abs(float(r.split(",")[4])) for r in rows]
    assert resid[-1] < 1e-6
    summary = json.loads((outs[0] / "szego" / "summary.json").read_text())
    for entry in summary["criteria"]:
        assert set(entry) == {"criterion_id", "measured", "threshold", "pass"}
    meta = json.loads((outs[0] / "szego" / "metadata.json").read_text())
    assert "started_utc" in meta and meta["kernel_backend"] in ("compiled", "python")


def test_all_runs_applicable_subcommands(tmp_path):
    p = _write(tmp_path)
    out = tmp_path / "all"
    assert cli.main(["all", "--config", str(p), "--out", str(out)]) == cli.EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert [s["subcommand"] for s in summary] == ["spectrum", "clt", "szego"]
    spec = (out / "spectrum" / "small.csv").read_text().splitlines()
    assert spec[0].split(",")[:3] == ["hbar", "n_grid", "N"]


def test_seed_override(tmp_path):
    p = _write(tmp_path)
    assert cli.main(["szego", "--config", str(p), "--out", str(tmp_path), "--seed", "99"]) == 0
    meta = json.loads((tmp_path / "szego" / "metadata.json").read_text())
    assert meta["seed"] == 99


def test_csv_format_17_digits(tmp_path):
    experiments.write_csv(tmp_path / "t.csv", ["a", "b", "c"], [(0.1, 3, True)])
    assert (tmp_path / "t.csv").read_text() == "a,b,c\n0.10000000000000001,3,1\n"


def test_module_entry_point(tmp_path):
    p = _write(tmp_path, hbars="[0.05, 0.1]")
    r = subprocess.run([sys.executable, "-m", "fermiszego", "szego", "--config", str(p)],
                       capture_output=True, text=True)
    assert r.returncode == 1
    assert "ConfigError" in r.stderr


def test_every_criterion_has_one_owner():
    assert sorted(experiments.CRITERION_OWNER) == list(range(1, 13))
    assert set(experiments.CRITERION_OWNER.values()) <= set(experiments.SUBCOMMANDS)
