"""Tests for the command-line interface."""

import json
import math
import subprocess
import sys

import pytest
from fastapi.testclient import TestClient

import onebit_chanest.cli as cli
from onebit_chanest.service import ServiceClient, create_app


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestLossCommand:
    def test_low_snr_prints_canonical_loss(self, capsys):
        code, out, _ = run_cli(capsys, "loss", "--mode", "det", "--snr-db", "-25", "--alpha", "0")
        assert code == 0
        assert "-1.9662 dB" in out

    def test_json_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "loss", "--mode", "hybrid", "--snr-db", "-5", "--alpha", "0.5", "--json"
        )
        assert code == 0
        body = json.loads(out)
        assert body["chi_db"] == pytest.approx(-3.104907, abs=1e-4)

    def test_missing_scale_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["loss", "--mode", "det", "--alpha", "0"])
        assert exc.value.code == 2

    def test_conflicting_scales_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["loss", "--mode", "det", "--alpha", "0", "--snr-db", "-5", "--zeta", "1"])
        assert exc.value.code == 2

    def test_divergent_prior_is_runtime_error(self, capsys):
        code, _, err = run_cli(capsys, "loss", "--mode", "hybrid", "--snr-db", "0", "--alpha", "0")
        assert code == 1
        assert "diverges" in err


class TestBoundsCommand:
    def test_zero_point(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--zeta", "0", "--alpha", "0", "--n", "1000")
        assert code == 0
        assert "crlb_ideal: 0.001" in out
        assert "0.001570796327" in out  # pi/2000

    def test_odd_n_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["bounds", "--zeta", "0", "--alpha", "0", "--n", "999"])
        assert exc.value.code == 2


class TestSweepCommand:
    def test_stdout_paper_txt(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--mode", "det", "--alpha-max", "0.1",
            "--alpha-step", "0.05", "--snr-db", "-25,-2.5",
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert len(lines) == 3 and len(lines[0].split()) == 3

    def test_write_csv_file(self, capsys, tmp_path):
        out_path = tmp_path / "table.csv"
        code, out, _ = run_cli(
            capsys, "sweep", "--mode", "hybrid", "--kind", "chi_star",
            "--alpha-max", "0.1", "--alpha-step", "0.1", "--snr-db", "-10",
            "--format", "csv", "--out", str(out_path),
        )
        assert code == 0
        assert out_path.exists()
        assert "wrote hybrid chi_star table" in out

    def test_bad_snr_list_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["sweep", "--mode", "det", "--snr-db", "oops"])
        assert exc.value.code == 2


class TestSimulateCommand:
    BASE = [
        "simulate", "--mode", "det", "--receiver", "ideal", "--zeta", "0.5",
        "--n", "128", "--trials", "100", "--seed", "9",
    ]

    def test_human_output(self, capsys):
        code, out, _ = run_cli(capsys, *self.BASE)
        assert code == 0
        assert "efficiency:" in out

    def test_json_reproducible(self, capsys):
        code1, out1, _ = run_cli(capsys, *self.BASE, "--json")
        code2, out2, _ = run_cli(capsys, *self.BASE, "--json")
        assert code1 == code2 == 0
        assert out1 == out2

    def test_worker_flag_does_not_change_output(self, capsys):
        _, out1, _ = run_cli(capsys, *self.BASE, "--json", "--workers", "1")
        _, out2, _ = run_cli(capsys, *self.BASE, "--json", "--workers", "2")
        assert out1 == out2

    def test_snr_alternative(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--mode", "hybrid", "--receiver", "ideal",
            "--snr-db", "-5", "--n", "64", "--trials", "20", "--seed", "1", "--json",
        )
        assert code == 0
        assert json.loads(out)["config"]["sigma2"] == pytest.approx(10 ** -0.5)

    def test_missing_receiver_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["simulate", "--mode", "det", "--zeta", "0.5", "--n", "64"])
        assert exc.value.code == 2

    def test_config_file_supplies_defaults(self, capsys, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(
            "mode = det\nreceiver = ideal\nzeta = 0.5\nn = 128\n"
            "trials = 100\nseed = 9  # matches BASE\n"
        )
        _, out_cfg, _ = run_cli(capsys, "simulate", "--config", str(cfg), "--json")
        _, out_flags, _ = run_cli(capsys, *self.BASE, "--json")
        assert out_cfg == out_flags

    def test_flags_override_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("mode = det\nreceiver = ideal\nzeta = 0.5\nn = 128\nseed = 9\n")
        _, out, _ = run_cli(capsys, "simulate", "--config", str(cfg), "--trials", "7", "--json")
        assert json.loads(out)["config"]["trials"] == 7

    def test_unknown_config_key_is_usage_error(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("modus = det\n")
        with pytest.raises(SystemExit) as exc:
            cli.main(["simulate", "--config", str(cfg)])
        assert exc.value.code == 2


class TestSelftestCommand:
    def test_runs_green(self, capsys):
        code, out, _ = run_cli(capsys, "selftest")
        assert code == 0
        assert out.count("PASS") == 4
        assert "FAIL" not in out


class TestServerRouting:
    @pytest.fixture(autouse=True)
    def _route_to_asgi(self, monkeypatch):
        app = create_app()
        monkeypatch.setattr(
            cli, "_make_client", lambda url: ServiceClient(client=TestClient(app))
        )

    def test_loss_over_service(self, capsys):
        code, out, _ = run_cli(
            capsys, "loss", "--mode", "det", "--snr-db", "-60", "--alpha", "0",
            "--server", "http://testserver", "--json",
        )
        assert code == 0
        assert json.loads(out)["chi"] == pytest.approx(2.0 / math.pi, abs=1e-6)

    def test_simulate_over_service_matches_local(self, capsys):
        argv = [
            "simulate", "--mode", "det", "--receiver", "onebit_unknown", "--zeta", "0.5",
            "--alpha", "0.3", "--n", "128", "--trials", "50", "--seed", "4", "--json",
        ]
        _, local, _ = run_cli(capsys, *argv)
        _, remote, _ = run_cli(capsys, *argv, "--server", "http://testserver")
        assert local == remote


class TestUnknownFlags:
    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["loss", "--mode", "det", "--alpha", "0", "--snr-db", "-5", "--frob"])
        assert exc.value.code == 2


class TestModuleInvocation:
    def test_python_dash_m_entry(self):
        proc = subprocess.run(
            [sys.executable, "-m", "onebit_chanest.cli", "bounds",
             "--zeta", "0", "--alpha", "0", "--n", "10"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "crlb_ideal: 0.1" in proc.stdout
