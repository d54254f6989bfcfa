import csv
import json
import math

import numpy as np
import pytest

from carlab.cli import main
from carlab.errors import ConfigError
from carlab.lab import (
    CSV_COLUMNS,
    ExperimentConfig,
    adversarial_search,
    default_config,
    run_experiment,
    sweep_row,
)


def small_sweep_config(**over):
    return default_config(
        "counterexample-sweep", eps_grid=[0.1, 0.01], rotations=[0.0], **over
    )


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="nope")
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="sibet-suite", depth=13)
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="sibet-suite", d=9)
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="sibet-suite", eps_grid=[])
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="sibet-suite", eps_grid=[2.0])
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="sibet-suite", format="xml")
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="adversarial-search", budget=0)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": "sibet-suite", "bogus": 1})


def test_sweep_rows_and_csv_columns(tmp_path):
    out = tmp_path / "sweep.csv"
    cfg = small_sweep_config(output_path=str(out), format="csv")
    report = run_experiment(cfg)
    assert report.passed
    with open(out) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    assert header == CSV_COLUMNS["counterexample-sweep"]
    assert len(rows) == 2
    first = dict(zip(header, rows[0]))
    assert float(first["eps"]) == 0.1
    assert float(first["ratio_norm"]) == pytest.approx(10.0, rel=1e-9)


def test_json_report_schema(tmp_path):
    out = tmp_path / "report.json"
    cfg = small_sweep_config(output_path=str(out), format="json")
    report = run_experiment(cfg)
    with open(out) as fh:
        payload = json.load(fh)
    assert payload["schema"] == 1
    assert set(payload) == {"schema", "config", "rows", "aggregates", "verdicts", "stamp"}
    assert payload["config"]["experiment"] == "counterexample-sweep"
    assert len(payload["rows"]) == len(report.rows)
    assert all(isinstance(v, bool) for v in payload["verdicts"].values())
    assert payload["stamp"]["package"] == "carlab"


def test_sweep_row_values_match_claims():
    row = sweep_row(1e-3, math.pi / 4, 4)
    assert row["ratio_norm"] == pytest.approx(1e3, rel=1e-9)
    assert row["ratio_inner"] == pytest.approx(500.0, rel=1e-9)
    assert row["ratio_over_sqrt_c2"] == pytest.approx(1.0, rel=1e-9)
    assert row["a2"] == pytest.approx(1.0, abs=1e-10)
    assert row["c2"] == pytest.approx(1e6, rel=1e-9)


def test_report_reproducibility():
    cfg = default_config("sibet-suite", seeds=list(range(8)))
    rows_a = run_experiment(cfg).rows
    rows_b = run_experiment(cfg).rows
    assert len(rows_a) == len(rows_b)
    for ra, rb in zip(rows_a, rows_b):
        for key, va in ra.items():
            vb = rb[key]
            if isinstance(va, float):
                assert vb == pytest.approx(va, abs=1e-12)
            else:
                assert va == vb


def test_embedded_instance_rows():
    from carlab.constructions import random_instance
    from carlab.dyadic import stepfield_to_json

    inst = random_instance(3, 2, seed=0, cond_cap=1e3)
    embedded = {
        "weight": stepfield_to_json(inst.w),
        "f": stepfield_to_json(inst.f),
        "g": stepfield_to_json(inst.g),
        "alpha": inst.sseq.to_json(),
        "matrix_seq": inst.mseq.to_json(),
    }
    cfg = default_config("sibet-suite", seeds=[0, 1], extra_instances=[embedded])
    report = run_experiment(cfg)
    kinds = [r["kind"] for r in report.rows]
    assert "embedded" in kinds
    emb = next(r for r in report.rows if r["kind"] == "embedded")
    assert emb["inner_ratio"] >= 0.0

    cfg = default_config("redundancy-suite", seeds=[0, 1], extra_instances=[embedded])
    report = run_experiment(cfg)
    emb = next(r for r in report.rows if r["kind"] == "embedded")
    assert emb["sred"] <= 4.0
    assert max(emb["red_c1"], emb["red_c2"], emb["red_c3"]) <= 4.0 * 2


def test_search_budget_one_returns_initial_objective():
    out = adversarial_search(depth=2, d=2, seed=3, objective="bet_norm_ratio",
                             budget=1, cond_cap=100.0)
    assert out["evaluations"] == 1
    # the first restart is the family member at the cap: ratio = sqrt(cap)
    assert out["best_value"] == pytest.approx(10.0, rel=1e-9)


def test_search_monotone_and_attains_family():
    out = adversarial_search(depth=2, d=2, seed=5, objective="bet_norm_ratio",
                             budget=400, cond_cap=1e4)
    best = [h["best_objective"] for h in out["history"]]
    assert best == sorted(best)
    assert out["best_value"] >= 0.99 * math.sqrt(out["best_c2"])


def test_search_sred_stays_under_four():
    out = adversarial_search(depth=3, d=1, seed=7, objective="sred_ratio",
                             budget=500, cond_cap=1e4)
    assert out["best_value"] <= 4.0


def test_search_red_objective_runs():
    out = adversarial_search(depth=2, d=2, seed=9, objective="red_ratio",
                             budget=120, cond_cap=1e3)
    assert out["best_value"] <= 8.0 + 1e-9  # 4d with d = 2


def test_search_experiment_report_verdicts():
    cfg = default_config("adversarial-search", budget=300, depth=2)
    report = run_experiment(cfg)
    assert set(report.verdicts) == {"attains_sqrt_c2", "bounded_by_c2bet", "best_monotone"}
    assert report.passed
    assert report.aggregates["best_weight"]["d"] == 2  # regenerable instance


# -- CLI ---------------------------------------------------------------------

def test_cli_runs_sweep_and_exits_zero(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    rc = main([
        "counterexample-sweep", "--eps", "0.1,0.01", "--depth", "3",
        "--out", str(out), "--format", "csv",
    ])
    assert rc == 0
    assert out.exists()
    stdout = capsys.readouterr().out
    assert "[PASS]" in stdout and "[FAIL]" not in stdout


def test_cli_config_file_with_flag_override(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"eps_grid": [0.1], "depth": 5, "format": "json"}))
    out = tmp_path / "r.json"
    rc = main(["counterexample-sweep", "--config", str(cfg_path), "--depth", "2",
               "--out", str(out), "--quiet"])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["config"]["depth"] == 2  # flag wins
    assert payload["config"]["eps_grid"] == [0.1]


def test_cli_config_with_embedded_instance(tmp_path):
    from carlab.constructions import random_instance
    from carlab.dyadic import stepfield_to_json

    inst = random_instance(3, 2, seed=0, cond_cap=1e3)
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "seeds": [0, 1],
        "extra_instances": [{
            "weight": stepfield_to_json(inst.w),
            "alpha": inst.sseq.to_json(),
            "matrix_seq": inst.mseq.to_json(),
        }],
        "format": "json",
    }))
    out = tmp_path / "r.json"
    rc = main(["redundancy-suite", "--config", str(cfg_path), "--out", str(out), "--quiet"])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert any(r["kind"] == "embedded" for r in payload["rows"])


def test_cli_config_error_exit_code(tmp_path):
    assert main(["counterexample-sweep", "--eps", "zero"]) == 2
    cfg_path = tmp_path / "broken.json"
    cfg_path.write_text("{not json")
    assert main(["counterexample-sweep", "--config", str(cfg_path)]) == 2
    assert main(["counterexample-sweep", "--config", str(tmp_path / "missing.json")]) == 2


def test_cli_acceptance_failure_exit_code(tmp_path, monkeypatch):
    # force a verdict to fail by tightening a regression bound to zero
    from carlab import baselines

    monkeypatch.setattr(baselines, "SIBET_CPRIME", 0.0)
    out = tmp_path / "r.json"
    rc = main(["sibet-suite", "--seed", "0,1,2", "--out", str(out),
               "--format", "json", "--quiet"])
    assert rc == 1


def test_cli_numeric_error_exit_code(monkeypatch):
    from carlab.errors import NumericError

    def boom(cfg):
        raise NumericError("eigensolver failed")

    monkeypatch.setattr("carlab.cli.run_experiment", boom)
    rc = main(["counterexample-sweep", "--quiet"])
    assert rc == 3
