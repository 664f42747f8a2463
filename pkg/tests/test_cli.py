import json
import math

import numpy as np
import pandas as pd
import pytest

from costdro import cli
from costdro import config as cfgmod


@pytest.fixture
def workspace(tmp_path):
    rng = np.random.default_rng(0)
    T = 70
    p = 100 * np.exp(np.cumsum(rng.normal(0.0004, 0.01, (T, 3)), axis=0))
    dates = pd.bdate_range("2021-01-04", periods=T).strftime("%Y-%m-%d")
    df = pd.DataFrame(p, columns=["AAA", "BBB", "IDX"])
    df.insert(0, "date", dates)
    df.to_csv(tmp_path / "prices.csv", index=False)
    pd.DataFrame({"date": dates, "rate": 0.02}).to_csv(tmp_path / "rf.csv", index=False)
    cfg = {
        "prices": "prices.csv",
        "risk_free": "rf.csv",
        "benchmark": "IDX",
        "window": 21,
        "n": 21,
        "epsilon": [0, 0.01],
        "n_samples": 30,
        "seed": 3,
        "output_dir": str(tmp_path / "out"),
    }
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    return tmp_path


def _read_csv_exact(path):
    rows = path.read_text().strip().splitlines()
    return rows[0].split(","), [r.split(",") for r in rows[1:]]


def test_optimize_writes_weights(workspace):
    assert cli.main(["optimize", str(workspace / "cfg.json"), "--epsilon", "0"]) == 0
    header, rows = _read_csv_exact(workspace / "out" / "weights.csv")
    assert header[:3] == ["epsilon", "objective", "converged"]
    assert len(rows) == 1
    w = [float(x) for x in rows[0][3:]]
    assert sum(w) == pytest.approx(1.0, abs=1e-12)
    sol = json.loads((workspace / "out" / "solution.json").read_text())
    assert sol["tickers"] == ["risk_free", "AAA", "BBB"]
    # values written by repr come back as the same doubles
    assert sol["solutions"][0]["weights"] == w


def test_epsilon_sweep_one_row_per_radius(workspace):
    grid = ["0", "0.001", "0.01", "0.1", "1"]
    assert cli.main(["optimize", str(workspace / "cfg.json"), "--epsilon", *grid]) == 0
    _, rows = _read_csv_exact(workspace / "out" / "weights.csv")
    assert [float(r[0]) for r in rows] == [float(g) for g in grid]


def test_negative_epsilon_names_field(workspace, capsys):
    assert cli.main(["optimize", str(workspace / "cfg.json"), "--epsilon", "-0.1"]) == 1
    assert "epsilon" in capsys.readouterr().err


def test_backtest_outputs_and_byte_identical_reruns(workspace):
    args = ["backtest", str(workspace / "cfg.json"), "--cost-grid", "0", "0.001", "0.005", "0.01"]
    assert cli.main(args) == 0
    out = workspace / "out"
    first = {f.name: f.read_bytes() for f in out.iterdir()}
    header, rows = _read_csv_exact(out / "metrics.csv")
    assert header == ["cost", "epsilon", "CR", "wealth_ratio", "STD", "SR", "MDD"]
    assert len(rows) == 4 * 2
    t_header, t_rows = _read_csv_exact(out / "trajectories.csv")
    assert t_header == ["date", "cost", "epsilon", "value", "benchmark"]
    assert {r[1] for r in t_rows} == {"0.0", "0.001", "0.005", "0.01"}
    assert cli.main(args) == 0
    assert {f.name: f.read_bytes() for f in out.iterdir()} == first


def test_missing_price_file(workspace, capsys):
    code = cli.main(["backtest", str(workspace / "cfg.json"), "--prices", str(workspace / "missing.csv")])
    assert code == 1
    err = capsys.readouterr().err
    assert "file not found" in err and "missing.csv" in err


def test_env_output_dir(workspace, monkeypatch):
    monkeypatch.setenv(cfgmod.OUTPUT_ENV, str(workspace / "envout"))
    assert cli.main(["optimize", str(workspace / "cfg.json"), "--epsilon", "0"]) == 0
    assert (workspace / "envout" / "weights.csv").exists()
    # an explicit flag still wins over the environment
    assert cli.main(["optimize", str(workspace / "cfg.json"), "--epsilon", "0", "--output-dir", str(workspace / "flag")]) == 0
    assert (workspace / "flag" / "weights.csv").exists()


def test_sweep(workspace):
    assert cli.main(["sweep", str(workspace / "cfg.json"), "--cost-grid", "0", "0.01"]) == 0
    _, rows = _read_csv_exact(workspace / "out" / "sweep_weights.csv")
    assert len(rows) == 4


def test_validate_clean_and_failures(workspace, capsys):
    assert cli.main(["validate", str(workspace / "cfg.json")]) == 0
    assert json.loads(capsys.readouterr().out)["failures"] == []

    cfg = json.loads((workspace / "cfg.json").read_text())
    cfg["tickers"] = [f"T{i}" for i in range(25)]
    (workspace / "big.json").write_text(json.dumps(cfg))
    assert cli.main(["validate", str(workspace / "big.json")]) == 1
    report = json.loads(capsys.readouterr().out)
    assert any("corner cap" in f["message"] for f in report["failures"])

    cfg = json.loads((workspace / "cfg.json").read_text())
    cfg["step_lower"] = -1.0
    (workspace / "low.json").write_text(json.dumps(cfg))
    assert cli.main(["validate", str(workspace / "low.json")]) == 1
    report = json.loads(capsys.readouterr().out)
    assert any("support bound must exceed -1" in f["message"] for f in report["failures"])


def test_nonconvergence_exit_code(workspace):
    assert cli.main(["optimize", str(workspace / "cfg.json"), "--epsilon", "0.05", "--max-iter", "3"]) == 2


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 1


def test_config_errors_name_fields(tmp_path):
    base = {"prices": "p.csv"}
    for field, value in [("window", 2), ("n", 0), ("norm", 3), ("n_samples", 0), ("cost_grid", [1.5]), ("bogus", 1)]:
        with pytest.raises(cfgmod.ConfigError) as exc:
            cfgmod.validate(cfgmod.from_dict({**base, field: value}))
        assert exc.value.field == field
    with pytest.raises(cfgmod.ConfigError) as exc:
        cfgmod.validate(cfgmod.from_dict({**base, "cost": {"kind": "piecewise", "breakpoints": [1], "slopes": [0.02, 0.01]}}))
    assert exc.value.field == "cost"
    cfg = cfgmod.validate(cfgmod.from_dict({**base, "norm": "inf", "epsilon": 0.1}))
    assert cfg.norm == math.inf and cfg.epsilon == (0.1,)


def test_samples_file_source(tmp_path):
    from costdro.ambiguity import SampleSet

    rng = np.random.default_rng(1)
    SampleSet(rng.uniform(-0.05, 0.05, (20, 2))).to_csv(tmp_path / "s.csv")
    (tmp_path / "c.json").write_text(json.dumps({"samples": "s.csv", "n": 1, "epsilon": [0.0, 0.01], "output_dir": str(tmp_path / "o")}))
    assert cli.main(["optimize", str(tmp_path / "c.json")]) == 0
    header, rows = _read_csv_exact(tmp_path / "o" / "weights.csv")
    assert header[3:] == ["risk_free", "asset0", "asset1"]
