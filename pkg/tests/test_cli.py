"""Tests for the czreach subcommands and entry point."""
import csv
import json

import numpy as np
import pytest

from czreach.__main__ import main
from czreach.cli import (
    EXIT_EMPTY,
    EXIT_ERROR,
    EXIT_OK,
    cmd_bench_chain,
    cmd_pdiff,
    cmd_rc,
    parse_mass_range,
)
from czreach.serialize import dump_json


def box_doc(half: float, kind: str = "czono") -> dict:
    return {"type": kind, "G": [[half, 0.0], [0.0, half]], "c": [0.0, 0.0]}


def read_rows(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


@pytest.fixture
def sets(tmp_path):
    paths = {}
    for name, doc in (
        ("unit", box_doc(1.0)),
        ("small", box_doc(0.3, "zonotope")),
        ("large", box_doc(1.5, "zonotope")),
        ("ball", box_doc(0.3, "ellipsoid")),
    ):
        paths[name] = tmp_path / f"{name}.json"
        dump_json(doc, paths[name])
    return paths


class TestPdiff:
    def test_inner(self, sets, tmp_path):
        out = tmp_path / "res" / "diff.json"
        assert cmd_pdiff(sets["unit"], sets["small"], "inner", out) == EXIT_OK
        result = json.loads(out.read_text())
        assert np.allclose(result["G"], 0.7 * np.eye(2))
        meta = json.loads((tmp_path / "res" / "diff.meta.json").read_text())
        assert meta["mode"] == "inner"
        assert meta["empty"] is False
        assert np.allclose(meta["D"], [0.7, 0.7])
        assert meta["complexity"] == {"M": 0, "N": 2, "dof": 1}
        assert meta["seconds"] >= 0.0

    def test_empty_result(self, sets, tmp_path):
        out = tmp_path / "diff.json"
        assert cmd_pdiff(sets["unit"], sets["large"], "inner", out) == EXIT_EMPTY
        meta = json.loads((tmp_path / "diff.meta.json").read_text())
        assert meta["empty"] is True
        assert json.loads(out.read_text())["empty"] is True

    def test_outer(self, sets, tmp_path):
        out = tmp_path / "diff.json"
        assert cmd_pdiff(sets["unit"], sets["ball"], "outer", out) == EXIT_OK
        meta = json.loads((tmp_path / "diff.meta.json").read_text())
        assert meta["D"] is None

    def test_outer_empty(self, sets, tmp_path):
        assert cmd_pdiff(sets["unit"], sets["large"], "outer", tmp_path / "d.json") == EXIT_EMPTY

    def test_two_stage(self, sets, tmp_path):
        assert cmd_pdiff(sets["unit"], sets["small"], "two-stage", tmp_path / "d.json") == EXIT_OK

    def test_two_stage_rejects_ellipsoid(self, sets, tmp_path, capsys):
        code = main(["pdiff", str(sets["unit"]), str(sets["ball"]), "--mode", "two-stage", "--out", str(tmp_path / "d.json")])
        assert code == EXIT_ERROR
        assert "two-stage requires zonotope" in capsys.readouterr().err

    def test_parse_error(self, sets, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"type": "czono", "G": [[1.0]], "c": [0.0, 1.0]}')
        code = main(["pdiff", str(bad), str(sets["small"]), "--out", str(tmp_path / "d.json")])
        assert code == EXIT_ERROR
        assert capsys.readouterr().err.startswith("Error: bad.json")

    def test_dimension_mismatch(self, sets, tmp_path, capsys):
        line = tmp_path / "line.json"
        dump_json({"type": "zonotope", "G": [[0.1]], "c": [0.0]}, line)
        code = main(["pdiff", str(sets["unit"]), str(line), "--out", str(tmp_path / "d.json")])
        assert code == EXIT_ERROR
        assert "Error:" in capsys.readouterr().err

    def test_missing_file(self, sets, tmp_path):
        code = main(["pdiff", str(tmp_path / "nope.json"), str(sets["small"]), "--out", str(tmp_path / "d.json")])
        assert code == EXIT_ERROR


class TestRc:
    def write_config(self, tmp_path, **doc):
        path = tmp_path / "rc.json"
        dump_json(doc, path)
        return path

    def test_double_integrator(self, tmp_path):
        config = self.write_config(tmp_path, model="double-integrator", T=2, params={"disturbance": "ellipsoid"})
        out = tmp_path / "out"
        assert cmd_rc(config, out) == EXIT_OK
        assert sorted(p.name for p in out.glob("K_*.json")) == ["K_0.json", "K_1.json", "K_2.json"]
        rows = read_rows(out / "summary.csv")
        assert [r["t"] for r in rows] == ["0", "1", "2"]
        assert rows[0]["M"] == "12"
        assert rows[0]["dof"] == "2"
        assert rows[0]["empty"] == "false"
        assert len(read_rows(out / "timings.csv")) == 3

    def test_zero_horizon_returns_goal(self, tmp_path):
        config = self.write_config(tmp_path, model="stable-2d", T=0)
        out = tmp_path / "out"
        assert cmd_rc(config, out) == EXIT_OK
        K = json.loads((out / "K_0.json").read_text())
        assert np.allclose(K["G"], 0.5 * np.eye(2))
        assert np.allclose(K["c"], [1.5, 0.0])
        assert len(list(out.glob("K_*.json"))) == 1

    def test_boundary(self, tmp_path):
        config = self.write_config(tmp_path, model="double-integrator", T=1, emit_boundary=True)
        out = tmp_path / "out"
        assert cmd_rc(config, out, directions=16) == EXIT_OK
        rows = read_rows(out / "boundary_0.csv")
        assert len(rows) == 16
        assert set(rows[0]) == {"x", "y"}

    def test_outer(self, tmp_path):
        config = self.write_config(tmp_path, model="double-integrator", T=2, approx="outer")
        assert cmd_rc(config, tmp_path / "out") == EXIT_OK

    def test_summary_is_deterministic(self, tmp_path):
        config = self.write_config(tmp_path, model="random", T=2, seed=3)
        cmd_rc(config, tmp_path / "a")
        cmd_rc(config, tmp_path / "b")
        assert (tmp_path / "a" / "summary.csv").read_bytes() == (tmp_path / "b" / "summary.csv").read_bytes()

    def test_invalid_config(self, tmp_path, capsys):
        config = self.write_config(tmp_path, model="double-integrator", approx="exact")
        assert main(["rc", str(config), "--out", str(tmp_path / "out")]) == EXIT_ERROR
        assert "config.approx" in capsys.readouterr().err


class TestBenchChain:
    def test_mass_ranges(self):
        assert parse_mass_range("2..5") == [2, 3, 4, 5]
        assert parse_mass_range("5") == [5]
        assert parse_mass_range("2,10,50") == [2, 10, 50]

    def test_mass_range_limits(self):
        with pytest.raises(ValueError):
            parse_mass_range("1..3")
        with pytest.raises(ValueError):
            parse_mass_range("51")

    def test_rows(self, tmp_path):
        out = tmp_path / "bench.csv"
        assert cmd_bench_chain([3, 2], 2, out) == EXIT_OK
        rows = read_rows(out)
        assert [r["n"] for r in rows] == ["4", "6"]
        assert [r["masses"] for r in rows] == ["2", "3"]
        assert list(rows[0]) == ["n", "masses", "seconds", "M", "N", "dof"]

    def test_entry_point(self, tmp_path):
        out = tmp_path / "bench.csv"
        assert main(["bench-chain", "2", "--horizon", "1", "--out", str(out)]) == EXIT_OK
        assert len(read_rows(out)) == 1

    def test_out_of_range_masses_exit_with_error(self, tmp_path, capsys):
        assert main(["bench-chain", "60", "--out", str(tmp_path / "b.csv")]) == EXIT_ERROR
        assert "2..50" in capsys.readouterr().err
        assert not (tmp_path / "b.csv").exists()

    def test_malformed_masses_exit_with_error(self, tmp_path):
        assert main(["bench-chain", "two", "--out", str(tmp_path / "b.csv")]) == EXIT_ERROR


class TestOracleCompare:
    def test_ratios(self, tmp_path):
        config = tmp_path / "rc.json"
        dump_json({"model": "double-integrator", "T": 2, "params": {"disturbance": "zono-ball"}}, config)
        out = tmp_path / "out"
        assert main(["oracle-compare", str(config), "--out", str(out), "--directions", "12"]) == EXIT_OK
        rows = {r["method"]: r for r in read_rows(out / "ratios.csv")}
        assert set(rows) == {"exact", "inner", "outer", "two-stage"}
        assert float(rows["exact"]["ratio"]) == 1.0
        assert float(rows["inner"]["ratio"]) <= 1.0 + 1e-6
        assert float(rows["outer"]["ratio"]) >= 1.0 - 1e-6
        assert (out / "exact.csv").exists()

    def test_ellipsoid_has_no_two_stage(self, tmp_path):
        config = tmp_path / "rc.json"
        dump_json({"model": "double-integrator", "T": 1, "area": "grid", "resolution": 40}, config)
        out = tmp_path / "out"
        assert main(["oracle-compare", str(config), "--out", str(out)]) == EXIT_OK
        methods = [r["method"] for r in read_rows(out / "ratios.csv")]
        assert methods == ["exact", "inner", "outer"]

    def test_needs_plane(self, tmp_path, capsys):
        config = tmp_path / "rc.json"
        dump_json({"model": "chain", "T": 1, "params": {"masses": 2}}, config)
        assert main(["oracle-compare", str(config), "--out", str(tmp_path / "out")]) == EXIT_ERROR
        assert "planar" in capsys.readouterr().err


class TestEntryPoint:
    def test_invalid_environment(self, monkeypatch, tmp_path, capsys):
        monkeypatch.setenv("CZREACH_LP_TOL", "2")
        assert main(["bench-chain", "2", "--out", str(tmp_path / "b.csv")]) == EXIT_ERROR
        assert "lp_tol" in capsys.readouterr().err

    def test_unparsable_environment(self, monkeypatch, tmp_path):
        monkeypatch.setenv("CZREACH_MAX_COND", "big")
        assert main(["bench-chain", "2", "--out", str(tmp_path / "b.csv")]) == EXIT_ERROR

    def test_requires_subcommand(self):
        with pytest.raises(SystemExit):
            main([])
