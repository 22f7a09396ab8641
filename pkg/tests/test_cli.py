import json

import pytest

from subnet_walk.cli import main

FAST_ARGS = ["--set", "theta_dim=100", "--set", "n_samples=500", "--seeds", "0,1"]


class TestCli:
    def test_pass_run_exits_zero(self, tmp_path, capsys):
        code = main(["lemma2", "--out", str(tmp_path), *FAST_ARGS])
        assert code == 0
        assert "lemma2: PASS" in capsys.readouterr().out
        assert (tmp_path / "lemma2" / "report.json").exists()

    def test_failing_run_exits_one(self, tmp_path, capsys):
        # an impossible tolerance forces a FAIL verdict
        code = main(["lemma2", "--out", str(tmp_path), *FAST_ARGS, "--set", "tolerance=0"])
        assert code == 1
        assert "lemma2: FAIL" in capsys.readouterr().out

    def test_unknown_id_is_usage_error(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["lemma99", "--out", str(tmp_path)])
        assert exc.value.code == 2
        assert "valid" in capsys.readouterr().err

    def test_config_error_exits_two(self, tmp_path, capsys):
        code = main(["lemma2", "--out", str(tmp_path), "--set", "n_samples=lots"])
        assert code == 2
        assert "config error" in capsys.readouterr().err

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("theta_dim = 100\nn_samples = 2000\nseeds = 0\n")
        code = main([
            "lemma2", "--config", str(cfg), "--out", str(tmp_path), "--seeds", "0,1",
        ])
        assert code == 0
        doc = json.loads((tmp_path / "lemma2" / "report.json").read_text())
        assert doc["config_echo"]["n_samples"] == 2000
        assert [r["seed"] for r in doc["per_seed"]] == [0, 1]  # flag beats file

    def test_format_selection(self, tmp_path):
        code = main(["lemma2", "--out", str(tmp_path), "--format", "csv", *FAST_ARGS])
        assert code == 0
        assert not (tmp_path / "lemma2" / "report.json").exists()
        assert (tmp_path / "lemma2" / "norms.csv").exists()

    def test_multiple_experiments_aggregate_exit_code(self, tmp_path, capsys):
        code = main([
            "lemma2", "lemma2", "--out", str(tmp_path), *FAST_ARGS, "--set", "tolerance=0",
        ])
        assert code == 1
        out = capsys.readouterr().out
        assert out.count("lemma2: FAIL") == 2

    def test_describe_prints_schema(self, capsys):
        code = main(["lemma2", "--describe"])
        assert code == 0
        out = capsys.readouterr().out
        assert "lemma2:" in out and "theta_dim" in out and "n_samples" in out
