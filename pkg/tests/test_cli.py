"""End-to-end tests of the command-line interface and its exit codes."""

import json
import math
import os

import pytest

from epencircle.cli import cli_main

EPS0_EP_REF = 5.58232764887938018e-4


def run_cli(capsys, *argv):
    code = cli_main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEp:
    def test_csv_value(self, capsys):
        code, out, _ = run_cli(capsys, "ep")
        assert code == 0
        header, row = out.strip().split("\n")
        assert header == "omega_ep,eps0_ep"
        omega_ep, eps0_ep = (float(v) for v in row.split(","))
        assert eps0_ep == pytest.approx(EPS0_EP_REF, rel=1e-12)
        assert omega_ep == pytest.approx(1.50224219370676942, rel=1e-12)

    def test_json_to_file(self, capsys, tmp_path):
        target = tmp_path / "ep.json"
        code, out, _ = run_cli(capsys, "ep", "--format", "json",
                               "--out", str(target))
        assert code == 0 and out == ""
        payload = json.loads(target.read_text())
        assert payload["eps0_ep"] == pytest.approx(EPS0_EP_REF, rel=1e-12)


class TestPropagate:
    def test_area_flag(self, capsys):
        code, out, _ = run_cli(capsys, "propagate", "--ratio", "4",
                               "--phi", str(2 * math.pi), "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert 0.0 <= payload["p_bound"] <= 1.0
        assert payload["phi"] == pytest.approx(2 * math.pi, rel=1e-12)

    def test_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("eps0_max = 0.002\nphi = 6.0\nalpha = 1.0\n")
        code, out, _ = run_cli(capsys, "propagate", "--config", str(cfg),
                               "--format", "json")
        assert code == 0
        assert 0.0 <= json.loads(out)["p_bound"] <= 1.0


class TestPerturb:
    def test_ok_point(self, capsys):
        code, out, _ = run_cli(capsys, "perturb", "--ratio", "8",
                               "--phi", str(3 * math.pi), "--alpha", "1.5",
                               "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["p_bound_pert"] > 0.0

    def test_singular_point_exit_3(self, capsys, tmp_path):
        # real dipole, zero chirp, above critical: contour pinches a pole
        cfg = tmp_path / "sym.cfg"
        cfg.write_text("mu_im = 0\neps0_max = 0.00111646552977\ntau = 1000\nalpha = 0\n")
        code, _, err = run_cli(capsys, "perturb", "--config", str(cfg))
        assert code == 3
        assert "numerical failure" in err


class TestDynEpsAndFit:
    def test_dyn_eps_csv(self, capsys):
        code, out, _ = run_cli(capsys, "dyn-eps", "--ratio", "6", "--tau", "1",
                               "--alpha", "1")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0].startswith("re_t_over_tau,im_t_over_tau,residual")
        assert len(lines) >= 3

    def test_field_export(self, capsys, tmp_path):
        target = tmp_path / "field.csv"
        code, out, _ = run_cli(capsys, "dyn-eps", "--ratio", "6", "--tau", "1",
                               "--alpha", "1", "--field-out", str(target),
                               "--field-grid", "11x9")
        assert code == 0
        lines = target.read_text().strip().split("\n")
        assert lines[1] == "re_t_over_tau,im_t_over_tau,abs_split"
        assert len(lines) == 2 + 11 * 9

    def test_sigma_attached(self, capsys):
        code, out, _ = run_cli(capsys, "sigma", "--ratio", "4", "--tau", "1",
                               "--alpha", "1", "--k", "2", "--format", "json")
        assert code == 0
        rows = json.loads(out)["rows"]
        assert rows[0]["re_sigma"] is not None

    def test_fit_reports_period(self, capsys):
        code, out, _ = run_cli(capsys, "fit", "--ratio", "4", "--tau", "1",
                               "--alpha", "0.01", "--phi0", str(2 * math.pi),
                               "--n-samples", "6", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["oscillation_period"] == pytest.approx(7.64, abs=0.2)
        assert len(payload["poles"]) == 2


class TestSweep:
    def test_small_grid(self, capsys):
        code, out, _ = run_cli(capsys, "sweep", "--phi", str(2 * math.pi),
                               "--eps", "0:4:3", "--alpha", "0:1:2")
        assert code == 0
        lines = out.strip().split("\n")
        assert len(lines) == 1 + 3 * 2

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "sweep.csv"
        code, out, _ = run_cli(capsys, "sweep", "--phi", str(2 * math.pi),
                               "--eps", "0:2:2", "--alpha", "0:1:2",
                               "--out", str(target))
        assert code == 0 and out == ""
        assert target.read_text().startswith("eps_ratio,alpha,tau")

    def test_threads_env(self, capsys, monkeypatch):
        monkeypatch.setenv("EP_ENCIRCLE_THREADS", "2")
        code, out, _ = run_cli(capsys, "sweep", "--phi", str(2 * math.pi),
                               "--eps", "0:2:2", "--alpha", "0:1:2",
                               "--format", "json")
        assert code == 0
        assert json.loads(out)["metadata"]["threads"] == 2

    def test_bad_range_exit_2(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--phi", "6", "--eps", "0:4",
                               "--alpha", "0:1:2")
        assert code == 2
        assert "error" in err


class TestContourCmd:
    def test_csv_meta_line(self, capsys):
        code, out, _ = run_cli(capsys, "contour", "--ratio", "5", "--tau", "300",
                               "--alpha", "1", "--n-samples", "32")
        assert code == 0
        lines = out.strip().split("\n")
        assert json.loads(lines[0][2:])["eps0_ep"] == pytest.approx(
            EPS0_EP_REF, rel=1e-12
        )
        assert len(lines) == 2 + 32


class TestExitCodes:
    def test_unknown_command(self, capsys):
        assert run_cli(capsys, "bogus")[0] == 2

    def test_missing_pulse(self, capsys):
        code, _, err = run_cli(capsys, "propagate")
        assert code == 2
        assert "eps0-max" in err or "eps0_max" in err or "ratio" in err

    def test_negative_phi(self, capsys):
        code, _, err = run_cli(capsys, "propagate", "--ratio", "4",
                               "--phi", "-1")
        assert code == 2

    def test_missing_config_file(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "ep", "--config",
                               str(tmp_path / "absent.cfg"))
        assert code == 2
        assert "config" in err

    def test_bad_config_key(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("voltage = 7\n")
        code, _, err = run_cli(capsys, "propagate", "--config", str(cfg))
        assert code == 2
        assert "unknown key" in err
