"""CLI behaviour: subcommands, exit codes, determinism, emitted files."""

import json
import re
from pathlib import Path

import pytest

from g2eh.cli import main


def strip_timestamp(text: str) -> str:
    return re.sub(r'"generated_at": "[^"]*"', '"generated_at": "X"', text)


def test_alpha_window_passes(capsys):
    code = main(["alpha-window"])
    out = capsys.readouterr().out
    assert code == 0
    payload = json.loads(out)
    assert payload["summary"] == {"fail": 0, "pass": 1, "total": 1}
    assert payload["checks"][0]["measured"] == "1/18"


def test_torsion_table_csv_golden(tmp_path):
    code = main(["torsion-table", "--gamma", "1/100", "--out", str(tmp_path)])
    assert code == 0
    csv = (tmp_path / "torsion_table.csv").read_text()
    lines = csv.strip().splitlines()
    assert lines[0] == "region,C0,L2,L14"
    assert "1 <= rc <= t^-1/9,16/9,32/9,8/7" in lines
    assert "2t^-1/9 <= rc <= t^-4/5,1999/900,499/125,3331/2100" in lines
    assert lines[-1] == "aggregate,16/9,32/9,8/7"
    verdict = json.loads((tmp_path / "torsion_verdict.json").read_text())
    assert verdict["passed"] and verdict["alpha_window"] == "1/18"


def test_torsion_table_symbolic_without_gamma(tmp_path):
    assert main(["torsion-table", "--out", str(tmp_path)]) == 0
    csv = (tmp_path / "torsion_table.csv").read_text()
    assert "20/9-1/9*g" in csv and "100/63-1/9*g" in csv


def test_betti_example_report(tmp_path):
    code = main(["betti", "--example", "ex7_1", "--out", str(tmp_path)])
    assert code == 0
    payload = json.loads((tmp_path / "report.json").read_text())
    measured = json.loads(payload["checks"][0]["measured"])
    assert measured["b2"] == 12 and measured["b3"] == 43


def test_betti_custom_input(tmp_path, capsys):
    spec = {
        "generators": [
            {"linear": [[-1 if i == j else 0 for j in range(7)] for i in range(7)], "translation": ["0"] * 7}
        ],
        "degrees": [2, 3],
    }
    path = tmp_path / "action.json"
    path.write_text(json.dumps(spec))
    code = main(["betti", "--input", str(path)])
    out = capsys.readouterr().out
    assert code == 0
    payload = json.loads(out)
    result = json.loads(payload["checks"][0]["measured"])
    assert result["invariant_betti"] == {"2": 21, "3": 0}
    assert result["group_order"] == 2


def test_usage_errors_exit_two(tmp_path, capsys):
    assert main(["betti", "--example", "nope"]) == 2
    capsys.readouterr()
    assert main(["no-such-command"]) == 2
    capsys.readouterr()
    spec = tmp_path / "conf"
    spec.write_text("this line has no equals\n")
    assert main(["alpha-window", "--config", str(spec)]) == 2


def test_config_file_and_override(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# comment\nseed=7\ngamma=1/100\n")
    code = main(["torsion-table", "--config", str(conf), "--out", str(tmp_path / "o1")])
    assert code == 0
    payload = json.loads((tmp_path / "o1" / "report.json").read_text())
    assert payload["seed"] == 7
    # flag overrides the file
    code = main(["torsion-table", "--config", str(conf), "--seed", "9", "--out", str(tmp_path / "o2")])
    assert code == 0
    payload2 = json.loads((tmp_path / "o2" / "report.json").read_text())
    assert payload2["seed"] == 9


def test_verify_exact_deterministic(tmp_path):
    code = main(["verify", "--mode", "exact", "--seed", "3", "--out", str(tmp_path / "a")])
    assert code == 0
    code = main(["verify", "--mode", "exact", "--seed", "3", "--out", str(tmp_path / "b")])
    assert code == 0
    ra = strip_timestamp((tmp_path / "a" / "report.json").read_text())
    rb = strip_timestamp((tmp_path / "b" / "report.json").read_text())
    assert ra == rb
    payload = json.loads(ra)
    assert payload["summary"]["fail"] == 0
    ids = [c["id"] for c in payload["checks"]]
    assert ids == sorted(ids)


def test_solve_fibre_emits_rate_report(tmp_path):
    code = main(["solve-fibre", "--gamma", "1/4", "--out", str(tmp_path)])
    assert code == 0
    rates = json.loads((tmp_path / "rate_report.json").read_text())
    assert abs(rates["indicial_roots"][1] + 2.0) < 0.05
    csv = (tmp_path / "fibre_solution.csv").read_text().splitlines()
    assert csv[0] == "r,u,fitted_slope"
    assert len(csv) > 1000


def test_eh_emits_decay_csv(tmp_path):
    code = main(["eh", "--a", "1.0", "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "eh_decay.csv").read_text().splitlines()
    assert lines[0] == "r,metric_defect,fitted_slope"
    slope = float(lines[1].split(",")[2])
    assert abs(slope + 4.0) < 0.1
