"""Command line: exit codes, strict parsing, and deterministic outputs."""

import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from blochdyn.acceptance import AcceptanceResult
from blochdyn.cli import main

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _write(tmp_path, obj, name="scn.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _packet_scenario(**field):
    return {
        "version": 1,
        "name": "packet",
        "units": {"a_ref_m": 2e-10},
        "field": field or {"E_internal": 0.05},
        "dynamics": {"domain_internal": 400.0, "grid_points": 1024,
                     "x0_internal": -30.0, "k0_internal": 1.0,
                     "sigma_internal": 10.0, "T_internal": 2.0,
                     "dt_internal": 0.01},
        "output": {"sample_stride": 20},
    }


# --------------------------------------------------------------------------
# happy paths on the shipped scenarios


def test_help_runs_as_module():
    res = subprocess.run([sys.executable, "-m", "blochdyn", "--help"],
                         capture_output=True)
    assert res.returncode == 0
    assert b"usage" in res.stdout


def test_bands_rows_and_byte_determinism(tmp_path):
    scn = str(SCENARIOS / "bands_weak_cosine.json")
    for d in ("one", "two"):
        assert main(["bands", "--scenario", scn,
                     "--out", str(tmp_path / d)]) == 0
    first = (tmp_path / "one" / "bands.csv").read_bytes()
    assert first == (tmp_path / "two" / "bands.csv").read_bytes()
    lines = first.decode().splitlines()
    assert lines[0].startswith("#")
    assert lines[1] == "k,band,energy_eV,v_g_SI,m_star_ratio"
    # 101 k points by 3 bands
    assert len(lines) == 2 + 303


def test_bands_threads_do_not_change_bytes(tmp_path):
    scn = str(SCENARIOS / "bands_weak_cosine.json")
    assert main(["bands", "--scenario", scn, "--out", str(tmp_path / "serial"),
                 "--threads", "1"]) == 0
    assert main(["bands", "--scenario", scn, "--out", str(tmp_path / "pool"),
                 "--threads", "3"]) == 0
    assert ((tmp_path / "serial" / "bands.csv").read_bytes()
            == (tmp_path / "pool" / "bands.csv").read_bytes())


def test_wavepacket_norm_column(tmp_path):
    scn = str(SCENARIOS / "wavepacket_free.json")
    assert main(["wavepacket", "--scenario", scn, "--out", str(tmp_path)]) == 0
    table = np.loadtxt(tmp_path / "wavepacket.csv", delimiter=",", skiprows=2,
                       ndmin=2)
    np.testing.assert_allclose(table[:, 4], 1.0, atol=1e-10)
    assert table[0, 0] == 0.0


def test_cyclotron_writes_tagged_trajectory(tmp_path):
    scn = str(SCENARIOS / "cyclotron.json")
    assert main(["cyclotron", "--scenario", scn, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert "FUNDAMENTAL" in lines[0]
    assert lines[1].split(",")[:2] == ["t", "kx"]


def test_compare_eom_reports_divergence(tmp_path):
    scn = str(SCENARIOS / "compare_eom.json")
    assert main(["compare-eom", "--scenario", scn, "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "compare.json").read_text())
    assert rep["max_position_divergence"] == pytest.approx(
        11.465010899107085, rel=1e-9)
    assert rep["max_velocity_divergence"] == pytest.approx(
        1.7320507980397548, rel=1e-9)
    assert (tmp_path / "compare.csv").exists()


def test_adiabatic_probe_json(tmp_path):
    scn = str(SCENARIOS / "adiabatic_si_probe.json")
    assert main(["adiabatic", "--scenario", scn, "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "adiabatic.json").read_text())
    assert rep["chain_holds"] is True
    assert rep["omega_bar_star_eV"] == pytest.approx(
        2.3721514041481407e-08, rel=1e-9)
    assert rep["gap_eV"] > 0.9


def test_adiabatic_sweep_csv(tmp_path):
    scn = _write(tmp_path, {
        "version": 1,
        "name": "short sweep",
        "units": {"a_ref_m": 2e-10},
        "potential": {"a_internal": 1.0,
                      "coefficients_internal": [[1, 0.05, 0], [-1, 0.05, 0]]},
        "field": {"E_internal": 0.01},
        "dynamics": {"mode": "sweep", "k0_internal": 0.3, "n_waves": 6,
                     "T_internal": 1.0, "dt_internal": 0.005},
        "output": {"sample_stride": 50},
    })
    assert main(["adiabatic", "--scenario", scn, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "adiabatic.csv").read_text().splitlines()
    assert lines[1] == ("t,gap_eV,hdot_norm_eV,omega_bar_star_eV,"
                       "bound_rhs_eV,fidelity,comm_norm_eV")
    table = np.loadtxt(tmp_path / "adiabatic.csv", delimiter=",", skiprows=2,
                       ndmin=2)
    assert len(table) >= 2
    assert np.all(table[:, 5] > 0.99)


def test_conduction_classifications(tmp_path):
    scn = str(SCENARIOS / "conduction_fillings.json")
    assert main(["conduction", "--scenario", scn, "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "conduction.json").read_text())
    tags = [e["classification"] for e in rep["fillings"]]
    assert tags == ["insulator", "conductor", "insulator"]
    full = rep["fillings"][-1]
    assert abs(full["velocity_sum_shifted"]) < 1e-8 * rep["n_k"]


def test_solenoid_json_values(tmp_path):
    scn = str(SCENARIOS / "solenoid_reference.json")
    for d in ("one", "two"):
        assert main(["solenoid", "--scenario", scn,
                     "--out", str(tmp_path / d)]) == 0
    assert ((tmp_path / "one" / "solenoid.json").read_bytes()
            == (tmp_path / "two" / "solenoid.json").read_bytes())
    rep = json.loads((tmp_path / "one" / "solenoid.json").read_text())
    assert rep["shift_per_m"] == pytest.approx(303853.48992731253, rel=1e-12)
    assert rep["fractional_displacement"] == pytest.approx(
        1.934391395906209e-05, rel=1e-12)
    assert rep["reference_fractional_displacement"] == pytest.approx(
        6.366197723675814e-07, rel=1e-12)


# --------------------------------------------------------------------------
# configuration errors (exit 2)


def test_syntax_error_reports_line_and_column(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text('{"version": 1,\n  "name" oops\n}')
    assert main(["bands", "--scenario", str(p), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err


def test_missing_file_and_wrong_version(tmp_path):
    assert main(["bands", "--scenario", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path)]) == 2
    scn = _write(tmp_path, {"version": 2, "name": "x"})
    assert main(["bands", "--scenario", scn, "--out", str(tmp_path)]) == 2


def test_nan_rejected(tmp_path, capsys):
    p = tmp_path / "nan.json"
    p.write_text('{"version": 1, "name": "x", "units": {"a_ref_m": NaN}}')
    assert main(["bands", "--scenario", str(p), "--out", str(tmp_path)]) == 2
    assert "non-finite" in capsys.readouterr().err


def test_unknown_keys_rejected(tmp_path, capsys):
    scn_obj = _packet_scenario()
    scn_obj["dynamics"]["bogus"] = 1
    scn = _write(tmp_path, scn_obj)
    assert main(["wavepacket", "--scenario", scn, "--out", str(tmp_path)]) == 2
    assert "dynamics.bogus" in capsys.readouterr().err

    scn_obj = _packet_scenario()
    scn_obj["stray_block"] = {}
    scn = _write(tmp_path, scn_obj, "stray.json")
    assert main(["wavepacket", "--scenario", scn, "--out", str(tmp_path)]) == 2
    assert "stray_block" in capsys.readouterr().err


def test_field_must_pick_one_unit_form(tmp_path):
    scn = _write(tmp_path, _packet_scenario(E_internal=0.05, E_V_per_m=1e7))
    assert main(["wavepacket", "--scenario", scn, "--out", str(tmp_path)]) == 2
    scn_obj = _packet_scenario()
    del scn_obj["field"]
    scn = _write(tmp_path, scn_obj, "nofield.json")
    assert main(["wavepacket", "--scenario", scn, "--out", str(tmp_path)]) == 2


def test_equation_tag_validation(tmp_path):
    base = {
        "version": 1,
        "name": "orbit",
        "units": {"a_ref_m": 2e-10},
        "field": {"B_internal": 1.0},
        "dynamics": {"k0_internal": [1.0, 0.0], "x0_internal": [0.0, -1.0],
                     "T_internal": 1.0, "dt_internal": 0.01},
    }
    # cyclotron requires a tag, compare-eom forbids one
    scn = _write(tmp_path, base)
    assert main(["cyclotron", "--scenario", scn, "--out", str(tmp_path)]) == 2
    base["dynamics"]["equation"] = "weird"
    scn = _write(tmp_path, base, "weird.json")
    assert main(["cyclotron", "--scenario", scn, "--out", str(tmp_path)]) == 2
    base["dynamics"]["equation"] = "lorentz"
    scn = _write(tmp_path, base, "tagged.json")
    assert main(["compare-eom", "--scenario", scn, "--out", str(tmp_path)]) == 2


def test_potential_coefficient_validation(tmp_path):
    scn_obj = {
        "version": 1,
        "name": "bands",
        "units": {"a_ref_m": 2e-10},
        "potential": {"a_internal": 1.0,
                      "coefficients_eV": [[1, 0.1, 0]],
                      "coefficients_internal": [[1, 0.1, 0]]},
        "sweep": {"n_waves": 4, "k_points": 5, "n_bands": 1},
    }
    scn = _write(tmp_path, scn_obj)
    assert main(["bands", "--scenario", scn, "--out", str(tmp_path)]) == 2
    del scn_obj["potential"]["coefficients_eV"]
    scn_obj["potential"]["coefficients_internal"] = [[1, 0.1, 0], [1, 0.2, 0]]
    scn = _write(tmp_path, scn_obj, "dup.json")
    assert main(["bands", "--scenario", scn, "--out", str(tmp_path)]) == 2


# --------------------------------------------------------------------------
# physics errors (exit 3)


def test_packet_boundary_guard_exits_3(tmp_path, capsys):
    scn_obj = _packet_scenario(E_internal=0.5)
    scn_obj["dynamics"].update(domain_internal=40.0, grid_points=256,
                               x0_internal=0.0, k0_internal=2.0,
                               sigma_internal=1.0, T_internal=10.0)
    scn = _write(tmp_path, scn_obj)
    assert main(["wavepacket", "--scenario", scn, "--out", str(tmp_path)]) == 3
    assert "physics error" in capsys.readouterr().err


def test_closed_gap_probe_exits_3(tmp_path):
    scn = _write(tmp_path, {
        "version": 1,
        "name": "degenerate probe",
        "units": {"a_ref_m": 2e-10},
        "potential": {"a_internal": 1.0, "coefficients_internal": [[0, 0, 0]]},
        "field": {"E_internal": 1e-4},
        "dynamics": {"mode": "probe", "k0_internal": math.pi, "n_waves": 6,
                     "t_probe_internal": 0.0},
    })
    assert main(["adiabatic", "--scenario", scn, "--out", str(tmp_path)]) == 3


# --------------------------------------------------------------------------
# validate


def test_validate_single_criterion(tmp_path, capsys):
    assert main(["validate", "--out", str(tmp_path), "--only", "9"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] criterion 9" in out
    rep = json.loads((tmp_path / "validate.json").read_text())
    assert rep["results"][0]["cid"] == 9
    assert rep["results"][0]["passed"] is True


def test_validate_rejects_unknown_selection(tmp_path):
    assert main(["validate", "--out", str(tmp_path), "--only", "99"]) == 2
    assert main(["validate", "--out", str(tmp_path), "--only", "abc"]) == 2


def test_validate_maps_failure_to_exit_4(tmp_path, monkeypatch):
    fake = AcceptanceResult(cid=1, name="stub", passed=False, detail="nope")
    monkeypatch.setattr("blochdyn.cli.run_all", lambda seed, only: [fake])
    assert main(["validate", "--out", str(tmp_path)]) == 4
    rep = json.loads((tmp_path / "validate.json").read_text())
    assert rep["results"][0]["passed"] is False
