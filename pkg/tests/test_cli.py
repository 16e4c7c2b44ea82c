from __future__ import annotations

import json
import os

import pytest

from kkspectra.cli import (
    EXIT_CHECKS,
    EXIT_CONFIG,
    EXIT_ERROR,
    EXIT_OK,
    list_scenarios,
    main,
)
from kkspectra.scenarios import SCENARIOS


def write(path, text):
    with open(path, "w") as f:
        f.write(text)
    return str(path)


def read(path):
    with open(path, "rb") as f:
        return f.read()


class TestCatalog:
    def test_every_scenario_is_complete(self):
        for name, module in SCENARIOS.items():
            assert module.NAME == name
            assert module.DOC and module.TAGS
            assert set(module.DEFAULTS) <= set(module.PARAMS_SCHEMA["properties"])

    def test_list(self, capsys):
        assert main(["--list"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == len(SCENARIOS) >= 8
        assert lines[0].startswith("voltage-c6")

    def test_tag_filter(self):
        names = [name for name, _ in list_scenarios("landau")]
        assert names == ["landau-k3", "h0-table"]
        assert list_scenarios("no-such-tag") == []


class TestMain:
    def test_single_scenario(self, tmp_path):
        assert main(["-s", "voltage-c6", "-o", str(tmp_path)]) == EXIT_OK
        out = tmp_path / "voltage-c6"
        assert sorted(os.listdir(out)) == [
            "checks.json",
            "connection.json",
            "decomposition.csv",
            "spectrum.csv",
            "spectrum.json",
        ]
        doc = json.loads(read(out / "checks.json"))
        assert doc["ok"] and doc["scenario"] == "voltage-c6"

    def test_plots_flag(self, tmp_path):
        assert main(["-s", "voltage-c6", "-o", str(tmp_path), "--plots"]) == EXIT_OK
        assert os.path.isfile(tmp_path / "voltage-c6" / "spectrum.svg")

    def test_config_outputs(self, tmp_path):
        cfg = write(
            tmp_path / "c.toml",
            'scenario = "voltage-c6"\nlabel = "c6"\n[outputs]\noperators = true\ndot = true\n',
        )
        assert main(["-c", cfg, "-o", str(tmp_path / "out")]) == EXIT_OK
        files = os.listdir(tmp_path / "out" / "c6")
        assert "total.coo" in files and "cover.dot" in files

    def test_reruns_are_identical(self, tmp_path):
        for run in ("a", "b"):
            assert main(["-s", "voltage-c6", "-o", str(tmp_path / run)]) == EXIT_OK
        for name in ("checks.json", "spectrum.csv", "decomposition.csv"):
            assert read(tmp_path / "a" / "voltage-c6" / name) == read(
                tmp_path / "b" / "voltage-c6" / name
            )

    def test_env_overrides_out(self, tmp_path, monkeypatch):
        monkeypatch.setenv("KK_SPECTRA_OUT", str(tmp_path / "env"))
        assert main(["-s", "voltage-c6", "-o", str(tmp_path / "flag")]) == EXIT_OK
        assert os.path.isdir(tmp_path / "env" / "voltage-c6")
        assert not os.path.exists(tmp_path / "flag")

    def test_failed_check(self, tmp_path):
        cfg = write(
            tmp_path / "c.json",
            json.dumps({"scenario": "casimir-table", "params": {"ratio": 100.0}}),
        )
        assert main(["-c", cfg, "-o", str(tmp_path / "out")]) == EXIT_CHECKS
        doc = json.loads(read(tmp_path / "out" / "casimir-table" / "checks.json"))
        failed = [c["name"] for c in doc["checks"] if not c["ok"]]
        assert failed == ["discrete_ratio"]

    def test_model_error(self, tmp_path):
        cfg = write(
            tmp_path / "c.json",
            json.dumps({"scenario": "mosco-circle", "params": {"sizes": [7, 16]}}),
        )
        assert main(["-c", cfg, "-o", str(tmp_path)]) == EXIT_ERROR

    @pytest.mark.parametrize(
        "argv",
        [
            ["-s", "nope"],
            ["-s", "voltage-c6", "-s", "voltage-c6"],
            ["-s", "voltage-c6", "-j", "0"],
        ],
    )
    def test_config_errors(self, tmp_path, argv):
        assert main([*argv, "-o", str(tmp_path)]) == EXIT_CONFIG

    def test_schema_violation(self, tmp_path):
        cfg = write(tmp_path / "c.toml", 'scenario = "voltage-c6"\nextra = 1\n')
        assert main(["-c", cfg, "-o", str(tmp_path)]) == EXIT_CONFIG

    def test_broken_scenario_does_not_stop_the_rest(self, tmp_path, monkeypatch):
        def broken(params, seed):
            raise RuntimeError("bug")

        monkeypatch.setattr(SCENARIOS["casimir-table"], "run", broken)
        argv = ["-s", "casimir-table", "-s", "voltage-c6", "-o", str(tmp_path)]
        assert main(argv) == EXIT_ERROR
        assert os.path.isfile(tmp_path / "voltage-c6" / "checks.json")
