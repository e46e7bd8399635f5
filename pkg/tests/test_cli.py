import subprocess
import sys

import numpy as np
import pytest

from sivkit import cosmology
from sivkit.cli import build_parser, main
from sivkit.gauge import CosmologyParams
from sivkit.tables import parse_csv


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(err):
    return {k: float(v) for k, v in (line.split("=") for line in err.splitlines()
                                     if "=" in line and not line.startswith(("error", "warning")))}


def column(out, name):
    header, rows = parse_csv(out)
    return np.array([r[header.index(name)] for r in rows])


class TestGauge:
    def test_t_in_table(self, capsys):
        code, out, _ = run_cli(capsys, "gauge", "--table", "tin")
        assert code == 0
        assert np.allclose(column(out, "t_in"), [0, 0.215, 0.464, 0.669, 0.794], atol=5e-4)

    def test_psi0_table(self, capsys):
        code, out, err = run_cli(capsys, "gauge", "--table", "psi0")
        assert code == 0 and err == ""
        assert np.allclose(column(out, "psi0"), [1, 0.632, 0.536, 0.415, 0.331, 0], atol=5e-4)

    def test_check(self, capsys):
        code, out, err = run_cli(capsys, "gauge", "--check", "--omega-m", "0.3")
        rep = report(err)
        assert code == 0
        assert rep["max_rel_r1"] < 1e-12 and rep["max_rel_r2"] < 1e-12
        assert parse_csv(out)[0] == ["t", "tau", "lambda", "kappa", "psi", "r1", "r2"]

    def test_check_fails_on_wrong_constant(self, capsys):
        code, _, err = run_cli(capsys, "gauge", "--check", "--lambda-e", "2")
        assert code == 3 and "error:" in err


class TestCosmo:
    def test_verify(self, capsys):
        code, out, err = run_cli(capsys, "cosmo", "--omega-m", "0.3", "--samples", "100", "--verify")
        rep = report(err)
        assert code == 0
        assert rep["max_rel_residual_analytic"] < 1e-10
        assert len(parse_csv(out)[1]) == 100

    def test_critical_density(self, capsys):
        code, out, err = run_cli(capsys, "cosmo", "--omega-m", "1.0")
        assert code == 2 and out == ""
        assert "no scale-invariant solution" in err and len(err.splitlines()) == 1

    def test_empty_model_grows_as_t_squared(self, capsys):
        _, out, _ = run_cli(capsys, "cosmo", "--omega-m", "0", "--samples", "10")
        t, a = column(out, "t"), column(out, "a")
        assert np.allclose(a, t**2, rtol=1e-12)

    def test_header(self, capsys):
        _, out, _ = run_cli(capsys, "cosmo", "--samples", "3")
        assert out.splitlines()[0] == ",".join(cosmology.TABLE_COLUMNS)

    def test_curved_needs_start(self, capsys):
        code, _, err = run_cli(capsys, "cosmo", "--k", "1")
        assert code == 2 and "t_min" in err

    def test_curved_verify(self, capsys):
        code, _, err = run_cli(capsys, "cosmo", "--k", "-1", "--t-min", "0.75", "--samples", "20",
                               "--verify", "--tol", "1e-12")
        assert code == 0 and report(err)["conservation_drift"] < 1e-9

    def test_near_critical_warning_is_one_line(self, capsys):
        code, _, err = run_cli(capsys, "cosmo", "--omega-m", "0.9995", "--samples", "3")
        assert code == 0 and err.startswith("warning:") and len(err.splitlines()) == 1

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "hist.csv"
        code, out, _ = run_cli(capsys, "cosmo", "--samples", "4", "--output", str(path))
        assert code == 0 and out == ""
        assert path.read_bytes().count(b"\n") == 5 and b"\r" not in path.read_bytes()


class TestOrbit:
    def test_newton_circle(self, capsys):
        code, out, err = run_cli(capsys, "orbit", "--newton", "--periods", "20")
        assert code == 0
        assert report(err)["radius_drift"] < 1e-9
        assert out.splitlines()[0] == "tau,x,y,vx,vy,r,phi,L,energy"

    def test_siv_tracks_t(self, capsys):
        code, out, err = run_cli(capsys, "orbit", "--omega-m", "0.3", "--periods", "20")
        rep = report(err)
        assert code == 0
        assert rep["r_track_deviation"] < 1e-6 and rep["speed_drift"] < 1e-8
        p = CosmologyParams(omega_m=0.3, tau0=1000.0)
        tau, r = column(out, "tau"), column(out, "r")
        t = p.t_in() + tau / p.tau0 * (1 - p.t_in())
        assert np.allclose(r, t / t[0], rtol=1e-6)

    def test_eccentric_summary(self, capsys):
        code, _, err = run_cli(capsys, "orbit", "--e", "0.3", "--periods", "10")
        rep = report(err)
        assert code == 0 and rep["e_drift"] < 1e-6 and rep["L_drift"] < 1e-8

    def test_lunar_rates(self, capsys):
        code, out, _ = run_cli(capsys, "orbit", "--preset", "earth-moon", "--rates")
        assert code == 0
        line = next(l for l in out.splitlines() if l.startswith("a_dot_cm_per_yr"))
        assert float(line.split(",")[1]) == pytest.approx(0.92, abs=0.01)

    def test_collision_exit_code(self, capsys):
        code, _, err = run_cli(capsys, "orbit", "--newton", "--e", "0.999999999999", "--a", "1")
        assert code == 4 and err.startswith("error:")

    def test_bad_eccentricity(self, capsys):
        code, _, _ = run_cli(capsys, "orbit", "--e", "1.5")
        assert code == 2


class TestSecular:
    def test_present(self, capsys):
        code, out, _ = run_cli(capsys, "secular", "--omega-m", "0.3")
        header, rows = parse_csv(out)
        row = dict(zip(header, rows[0]))
        assert code == 0
        rate = CosmologyParams().psi0 / 13.8
        for key in ("a_dot_over_a", "M_dot_over_M", "T_dot_over_T"):
            assert row[f"{key}_per_gyr"] == pytest.approx(rate, rel=1e-15)
            assert row[f"{key}_per_yr"] == pytest.approx(rate / 1e9, rel=1e-15)

    def test_limits(self, capsys):
        _, out, _ = run_cli(capsys, "secular", "--omega-m", "0")
        assert column(out, "a_dot_over_a_per_gyr")[0] == pytest.approx(1 / 13.8)
        _, out, _ = run_cli(capsys, "secular", "--omega-m", "0.999999999")
        assert abs(column(out, "a_dot_over_a_per_gyr")[0]) < 1e-10

    def test_several_epochs(self, capsys):
        _, out, _ = run_cli(capsys, "secular", "--tau", "1", "6.9", "13.8", "--format", "table")
        assert len(out.splitlines()) == 4


class TestInterface:
    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["gauge", "--bogus"])
        assert info.value.code == 2

    def test_help_defaults_match_library(self):
        args = build_parser().parse_args(["cosmo"])
        assert args.omega_m == CosmologyParams().omega_m
        assert args.eps is None and args.samples == 100

    def test_byte_identical_runs(self):
        cmd = [sys.executable, "-m", "sivkit", "cosmo", "--samples", "20"]
        a = subprocess.run(cmd, capture_output=True, check=True).stdout
        b = subprocess.run(cmd, capture_output=True, check=True,
                           env={"LC_ALL": "de_DE.UTF-8", "PATH": ""}).stdout
        assert a == b and b"," in a
