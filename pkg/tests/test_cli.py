"""CLI: subcommands, exit codes, wire formats, determinism."""

import csv
import json

import pytest

from budgetmech.cli import main
from budgetmech.rationals import mpq, parse_rational

EXAMPLE2 = {
    "matroid": {"kind": "uniform", "rank": 2},
    "elements": [
        {"id": "a", "weight": 6, "cost": 6},
        {"id": "b", "weight": 5, "cost": 2},
        {"id": "c", "weight": 4, "cost": 2},
    ],
    "budget": 10,
}

BIPARTITE_2X2 = {
    "matroid": {
        "intersection": [
            {
                "kind": "partition",
                "blocks": [
                    {"members": ["e11", "e12"], "capacity": 1},
                    {"members": ["e21", "e22"], "capacity": 1},
                ],
            },
            {
                "kind": "partition",
                "blocks": [
                    {"members": ["e11", "e21"], "capacity": 1},
                    {"members": ["e12", "e22"], "capacity": 1},
                ],
            },
        ]
    },
    "elements": [
        {"id": "e11", "weight": 4, "cost": 1},
        {"id": "e12", "weight": 3, "cost": 1},
        {"id": "e21", "weight": 3, "cost": 1},
        {"id": "e22", "weight": 1, "cost": 1},
    ],
    "budget": 12,
}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_run_example2(tmp_path, capsys):
    path = write(tmp_path, "ex2.json", EXAMPLE2)
    assert main(["run", path]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["payments"] == {"b": "50/9", "c": "40/9"}
    assert doc["total_payment"] == "10"
    assert parse_rational(doc["payments"]["b"]) == mpq(50, 9)


def test_run_outputs_are_byte_identical(tmp_path, capsys):
    path = write(tmp_path, "ex2.json", EXAMPLE2)
    main(["run", path, "--trace"])
    first = capsys.readouterr().out
    main(["run", path, "--trace"])
    second = capsys.readouterr().out
    assert first == second


def test_run_intersection_both_blackboxes(tmp_path, capsys):
    path = write(tmp_path, "sq.json", BIPARTITE_2X2)
    assert main(["run", path, "--apx", "exact-bipartite"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["mechanism"] == "intersection"
    assert doc["payments"] == {"e12": "6", "e21": "6"}
    assert main(["run", path, "--apx", "greedy"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["total_payment_decimal"]


def test_empty_elements_exit2(tmp_path, capsys):
    path = write(tmp_path, "bad.json", {"matroid": {"kind": "free"}, "elements": [],
                                        "budget": 1})
    assert main(["run", path]) == 2
    assert "elements" in capsys.readouterr().err


def test_bid_above_budget_exit2(tmp_path, capsys):
    doc = {
        "matroid": {"kind": "free"},
        "elements": [{"id": "a", "weight": 1, "cost": 1, "bid": 9}],
        "budget": 5,
    }
    path = write(tmp_path, "bad.json", doc)
    assert main(["run", path]) == 2


def test_xos_cap_exit3(tmp_path, capsys):
    n = 20
    doc = {
        "elements": [{"id": f"e{j:02d}", "weight": 1, "cost": 1} for j in range(n)],
        "budget": 30,
        "xos": {"functions": [[1] * n]},
    }
    path = write(tmp_path, "big.json", doc)
    assert main(["run", path, "--mechanism", "xos"]) == 3


def test_xos_run(tmp_path, capsys):
    doc = {
        "elements": [
            {"id": "a", "weight": 1, "cost": 2},
            {"id": "b", "weight": 1, "cost": 3},
        ],
        "budget": 9,
        "xos": {"functions": [[4, 1], [1, 5]]},
    }
    path = write(tmp_path, "xos.json", doc)
    assert main(["run", path, "--seed", "0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["mechanism"] == "xos"
    assert parse_rational(out["total_payment"]) <= 9


def test_verify_clean_and_reports(tmp_path, capsys):
    config = write(tmp_path, "cfg.json", {
        "count": 4, "n_range": [3, 5], "deviations_per_element": 5,
        "mechanisms": ["matroid"], "seed": 2,
    })
    out_dir = tmp_path / "reports"
    assert main(["verify", config, "--out", str(out_dir)]) == 0
    report = json.loads((out_dir / "report.json").read_text())
    assert report["reports"]
    with open(out_dir / "summary.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["property", "mechanism", "checked", "failed"]
    assert all(row[3] == "0" for row in rows[1:])


def test_verify_broken_then_replay(tmp_path, capsys):
    config = write(tmp_path, "cfg.json", {
        "count": 3, "n_range": [2, 4], "deviations_per_element": 8,
        "mechanisms": ["matroid"], "include_broken": True, "seed": 2,
    })
    out_dir = tmp_path / "reports"
    assert main(["verify", config, "--out", str(out_dir)]) == 1
    capsys.readouterr()
    assert main(["replay", str(out_dir / "report.json")]) == 0
    assert "reproduced" in capsys.readouterr().out


def test_verify_malformed_config_exit2(tmp_path, capsys):
    bad = tmp_path / "cfg.json"
    bad.write_text("{not json")
    assert main(["verify", str(bad)]) == 2
    config = write(tmp_path, "cfg2.json", {"count": -4})
    assert main(["verify", config]) == 2


def test_bench_writes_csv(tmp_path, capsys):
    config = write(tmp_path, "bench.json", {
        "count": 6, "n_range": [3, 6], "seed": 3,
        "mechanisms": ["matroid", "intersection-exact"],
    })
    out_csv = tmp_path / "sweep.csv"
    assert main(["bench", config, str(out_csv)]) == 0
    with open(out_csv) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 12
    for row in rows:
        assert set(row) == {"instance_hash", "n", "matroid_kind", "mechanism",
                            "alpha", "ratio", "total_payment_over_budget", "runtime_us"}
        assert float(row["ratio"]) <= (4 if row["mechanism"] == "matroid" else 4)
        assert float(row["total_payment_over_budget"]) <= 1.0


def test_bench_empty_sweep_header_only(tmp_path):
    config = write(tmp_path, "bench.json", {"count": 0, "mechanisms": ["matroid"]})
    out_csv = tmp_path / "sweep.csv"
    assert main(["bench", config, str(out_csv)]) == 0
    lines = out_csv.read_text().strip().splitlines()
    assert len(lines) == 1


def test_xos_constant_command(capsys):
    assert main(["xos-constant", "--gamma", "3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert 430 <= float(doc["ratio_decimal"]) <= 436.5
    assert 210 <= float(doc["alpha_decimal"]) <= 226


def test_missing_file_exit4(capsys):
    assert main(["run", "/nonexistent/instance.json"]) == 4
