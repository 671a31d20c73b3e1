import json
from pathlib import Path

import numpy as np
import pytest

from cli.RunConfig import DEFAULT_FREQUENCIES, parse_config
from database.ResultsDatabase import ResultsDatabase
from errors import ConfigError
from linops.MatrixMarket import import_sequence, read_matrix, write_matrix
from complexes.ShortSequence import validate_sequence
from main import main


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    monkeypatch.delenv("DIVCURL_DB", raising=False)
    monkeypatch.delenv("DIVCURL_LOG_LEVEL", raising=False)


def write_config(path: Path, data: dict) -> Path:
    path.write_text(json.dumps(data))
    return path


def error_payload(capsys) -> dict:
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


class TestRunConfig:
    def test_minimal_file(self, tmp_path):
        config_file = write_config(
            tmp_path / "run.json",
            {"command": "betti", "grid": {"d": 2, "N": 8, "L": 6.2832, "bc": "periodic"}},
        )
        config = parse_config(["--config", str(config_file)], environ={})
        assert config.command == "betti"
        assert config.grid.N == 8
        assert config.frequencies == DEFAULT_FREQUENCIES

    def test_missing_grid(self):
        with pytest.raises(ConfigError, match="grid") as info:
            parse_config(["--command", "betti"], environ={})
        assert "missing grid" in info.value.problems

    def test_flag_overrides_file(self, tmp_path):
        config_file = write_config(
            tmp_path / "run.json", {"command": "betti", "grid": {"d": 2, "N": 8}}
        )
        config = parse_config(["--config", str(config_file), "--N", "16"], environ={})
        assert config.grid.N == 16

    def test_experiment_alias(self, tmp_path):
        config_file = write_config(
            tmp_path / "run.json",
            {
                "experiment": "positive",
                "grid": {"d": 2, "N": 40},
                "frequencies": [8, 2],
                "family": {
                    "u": {"macro": ["1", "0"], "micro": ["sin(x2)", "0"]},
                    "v": {"macro": ["1", "0"], "micro": ["cos(x1)", "0"]},
                },
            },
        )
        config = parse_config(["--config", str(config_file)], environ={})
        assert config.command == "divcurl"
        assert config.frequencies == (2, 8)
        assert set(config.families) == {"u", "v"}

    def test_collects_all_problems(self, tmp_path):
        config_file = write_config(
            tmp_path / "run.json",
            {"command": "nope", "grid": {"d": 2, "N": 8}, "tol": -1, "colour": "red"},
        )
        with pytest.raises(ConfigError) as info:
            parse_config(["--config", str(config_file)], environ={})
        problems = " ".join(info.value.problems)
        assert "unknown command" in problems
        assert "tol" in problems
        assert "colour" in problems

    def test_invalid_json_reports_position(self, tmp_path):
        config_file = tmp_path / "run.json"
        config_file.write_text('{"command": "betti",\n "grid": }')
        with pytest.raises(ConfigError) as info:
            parse_config(["--config", str(config_file)], environ={})
        assert info.value.details["line"] == 2

    def test_hole_punctures_dirichlet_grid(self):
        config = parse_config(
            ["--command", "betti", "--d", "2", "--N", "8", "--bc", "dirichlet", "--hole", "3,3,5,5"],
            environ={},
        )
        assert len(config.grid.mask) == 4

    def test_import_needs_no_grid(self, tmp_path):
        config = parse_config(["--command", "check-complex", "--input", str(tmp_path)], environ={})
        assert config.grid is None

    def test_environment_defaults(self, tmp_path):
        config = parse_config(
            ["--command", "betti", "--d", "2", "--N", "8"],
            environ={"DIVCURL_LOG_LEVEL": "debug", "DIVCURL_DB": str(tmp_path / "runs.db")},
        )
        assert config.log_level == "DEBUG"
        assert config.db_path == tmp_path / "runs.db"

    def test_bad_flag(self):
        with pytest.raises(ConfigError, match="invalid command line"):
            parse_config(["--N", "eight"], environ={})


class TestMain:
    def test_betti_on_periodic_grid(self, capsys):
        assert main(["--command", "betti", "--d", "2", "--N", "8"]) == 0
        assert capsys.readouterr().out.strip() == "harmonic_dim=2"

    def test_betti_on_punctured_square(self, capsys):
        argv = ["--command", "betti", "--d", "2", "--N", "8", "--bc", "dirichlet", "--hole", "3,3,5,5"]
        assert main(argv) == 0
        assert capsys.readouterr().out.strip() == "harmonic_dim=1"

    def test_check_complex(self, capsys):
        assert main(["--command", "check-complex", "--d", "2", "--N", "8"]) == 0
        assert capsys.readouterr().out.strip() == "residual=0"

    def test_validation_failure(self, capsys):
        assert main(["--command", "betti"]) == 1
        payload = error_payload(capsys)
        assert payload["error"] == "Config"
        assert "missing grid" in payload["details"]["problems"]

    def test_friedrichs_needs_periodic_grid(self, capsys):
        argv = ["--command", "friedrichs", "--d", "2", "--N", "8", "--bc", "dirichlet"]
        assert main(argv) == 1
        assert error_payload(capsys)["error"] == "UnsupportedBC"

    def test_friedrichs(self, capsys):
        assert main(["--command", "friedrichs", "--d", "2", "--N", "8", "--samples", "5"]) == 0
        assert capsys.readouterr().out.startswith("max_relative_residual=")

    def test_random_pair_is_not_a_sequence(self, tmp_path, capsys):
        rng = np.random.default_rng(7)
        write_matrix(tmp_path / "A0.mtx", rng.standard_normal((4, 3)))
        write_matrix(tmp_path / "A1.mtx", rng.standard_normal((2, 4)))
        assert main(["--command", "check-complex", "--input", str(tmp_path)]) == 2
        payload = error_payload(capsys)
        assert payload["error"] == "NotASequence"
        assert payload["details"]["residual"] > payload["details"]["bound"]

    def test_export_then_import(self, tmp_path, capsys):
        out = tmp_path / "operators"
        assert main(["--command", "export", "--d", "2", "--N", "4", "--out", str(out)]) == 0
        assert sorted(p.name for p in out.iterdir()) == [
            "A0.mtx",
            "A1.mtx",
            "gram0.mtx",
            "gram1.mtx",
            "gram2.mtx",
        ]
        A0, A1 = import_sequence(out)
        assert validate_sequence(A0, A1).residual == 0.0
        assert main(["--command", "check-complex", "--input", str(out)]) == 0
        assert capsys.readouterr().out.strip().endswith("residual=0")

    def test_one_dimensional_export_has_empty_curl(self, tmp_path):
        out = tmp_path / "operators"
        assert main(["--command", "export", "--d", "1", "--N", "8", "--out", str(out)]) == 0
        assert read_matrix(out / "A1.mtx").shape == (0, 8)

    def test_export_to_unwritable_path(self, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("")
        argv = ["--command", "export", "--d", "2", "--N", "4", "--out", str(blocker / "sub")]
        assert main(argv) == 1
        assert error_payload(capsys)["error"] == "IO"

    def test_hodge_writes_projectors(self, tmp_path, capsys):
        assert main(["--command", "hodge", "--d", "2", "--N", "4", "--out", str(tmp_path)]) == 0
        summary = capsys.readouterr().out
        assert "harmonic_dim=2" in summary
        assert (tmp_path / "P_harmonic.mtx").exists()
        P = read_matrix(tmp_path / "P_harmonic.mtx").toarray()
        assert np.trace(P) == pytest.approx(2.0)

    def test_poincare_refinement(self, tmp_path, capsys):
        argv = ["--command", "poincare", "--d", "2", "--N", "8", "--resolutions", "4,8"]
        assert main(argv + ["--out", str(tmp_path)]) == 0
        assert "stable=True" in capsys.readouterr().out
        assert (tmp_path / "refinement.csv").exists()

    def test_gradgrad(self, capsys):
        assert main(["--command", "gradgrad", "--d", "3", "--N", "3"]) == 0
        assert "harmonic_dims=6,8" in capsys.readouterr().out

    def test_counterexample(self, tmp_path, capsys):
        argv = ["--command", "counterexample", "--d", "2", "--N", "64", "--out", str(tmp_path)]
        assert main(argv) == 0
        summary = capsys.readouterr().out
        assert "res_div_slope=1.0" in summary
        assert (tmp_path / "counterexample.csv").read_text().startswith("k,I_k,I_inf")

    def test_identical_runs_write_identical_csv(self, tmp_path):
        for name in ("first", "second"):
            argv = ["--command", "divcurl", "--d", "2", "--N", "40", "--out", str(tmp_path / name)]
            assert main(argv) == 0
        first = (tmp_path / "first" / "divcurl.csv").read_bytes()
        assert first == (tmp_path / "second" / "divcurl.csv").read_bytes()

    def test_projection(self, tmp_path, capsys):
        argv = ["--command", "projection", "--d", "2", "--N", "24", "--frequencies", "2,4,8"]
        assert main(argv + ["--out", str(tmp_path)]) == 0
        assert (tmp_path / "projection.csv").exists()

    def test_runs_are_recorded(self, tmp_path):
        db_path = tmp_path / "runs.db"
        argv = ["--command", "divcurl", "--d", "2", "--N", "40", "--frequencies", "2,4"]
        assert main(argv + ["--out", str(tmp_path), "--db", str(db_path)]) == 0
        runs = ResultsDatabase(str(db_path)).get_runs("divcurl")
        assert len(runs) == 1
        assert runs[0]["config"]["frequencies"] == [2, 4]
        rows = ResultsDatabase(str(db_path)).get_convergence_rows(runs[0]["id"])
        assert [row["k"] for row in rows] == [2, 4]

    def test_summaries_report_local_errors(self, tmp_path, capsys):
        argv = ["--command", "divcurl", "--d", "2", "--N", "40", "--frequencies", "2,4"]
        assert main(argv + ["--out", str(tmp_path)]) == 0
        summary = capsys.readouterr().out
        assert "max_weak_gap=" in summary
        assert "max_local_error=" in summary
        argv = ["--command", "counterexample", "--d", "2", "--N", "64", "--out", str(tmp_path)]
        assert main(argv) == 0
        assert "max_local_error=24.99113871826" in capsys.readouterr().out

    def test_failed_run_insert_skips_tables(self, tmp_path, monkeypatch):
        db_path = tmp_path / "runs.db"
        monkeypatch.setattr(ResultsDatabase, "store_run", lambda self, *args: 0)
        argv = ["--command", "divcurl", "--d", "2", "--N", "40", "--frequencies", "2,4"]
        assert main(argv + ["--out", str(tmp_path), "--db", str(db_path)]) == 0
        assert ResultsDatabase(str(db_path)).get_convergence_rows(0) == []
