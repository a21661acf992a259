import json

import pytest

from spinsim.cli import main


def run_cli(args):
    return main(args)


class TestExitCodes:
    def test_success(self, tmp_path, capsys):
        code = run_cli(["bounds", "--out", str(tmp_path),
                        "--set", "protocol.theta_points=4"])
        assert code == 0
        out = capsys.readouterr().out
        assert "wrote" in out and "bounds.csv" in out

    def test_config_error_bad_value(self, capsys):
        code = run_cli(["fig3", "--set", "noise.kappa=-1"])
        assert code == 2
        err = capsys.readouterr().err
        assert "noise.kappa" in err

    def test_config_error_unknown_key(self, capsys):
        code = run_cli(["fig3", "--set", "noise.kapppa=1"])
        assert code == 2

    def test_config_error_bad_set_syntax(self, capsys):
        code = run_cli(["fig3", "--set", "noise.kappa"])
        assert code == 2

    def test_config_error_experiment_mismatch(self, tmp_path, capsys):
        cfgfile = tmp_path / "c.json"
        cfgfile.write_text(json.dumps({"experiment": "fig3"}))
        code = run_cli(["table1", "--config", str(cfgfile)])
        assert code == 2

    def test_config_error_missing_file(self, capsys):
        code = run_cli(["fig3", "--config", "/nonexistent/path.json"])
        assert code == 2

    def test_numerical_failure(self, tmp_path, capsys):
        code = run_cli(["fig3", "--out", str(tmp_path),
                        "--set", "device.levels_per_transmon=2",
                        "--set", "device.fock_cutoff=2",
                        "--set", "integrator.dt=1e-15",
                        "--set", "protocol.theta_points=2"])
        assert code == 3
        assert "numerical failure" in capsys.readouterr().err


class TestBehavior:
    def test_empty_config_file_works_with_subcommand(self, tmp_path):
        cfgfile = tmp_path / "empty.json"
        cfgfile.write_text("")
        code = run_cli(["bounds", "--config", str(cfgfile), "--out", str(tmp_path),
                        "--set", "protocol.theta_points=3"])
        assert code == 0

    def test_env_var_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SPINSIM_OUT_DIR", str(tmp_path))
        code = run_cli(["bounds", "--set", "protocol.theta_points=3"])
        assert code == 0
        assert (tmp_path / "bounds.csv").exists()

    def test_out_flag_beats_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SPINSIM_OUT_DIR", str(tmp_path / "envdir"))
        out = tmp_path / "flagdir"
        code = run_cli(["bounds", "--out", str(out),
                        "--set", "protocol.theta_points=3"])
        assert code == 0
        assert (out / "bounds.csv").exists()
        assert not (tmp_path / "envdir" / "bounds.csv").exists()

    def test_json_format_flag(self, tmp_path):
        code = run_cli(["bounds", "--out", str(tmp_path), "--format", "json",
                        "--set", "protocol.theta_points=3"])
        assert code == 0
        assert (tmp_path / "bounds.json").exists()

    def test_fock_override_echoed(self, tmp_path):
        code = run_cli(["bounds", "--out", str(tmp_path),
                        "--set", "device.fock_cutoff=7",
                        "--set", "protocol.theta_points=3"])
        assert code == 0
        text = (tmp_path / "bounds.csv").read_text()
        assert '"fock_cutoff":7' in text

    def test_threads_validation(self, capsys):
        assert run_cli(["bounds", "--threads", "0"]) == 2
