import hashlib
import json

import numpy as np
import pytest

from twpc import device
from twpc.cli import main
from twpc.touchstone import read_touchstone


def _run(args, out):
    rc = main(args + ["--out-dir", str(out)])
    assert rc == 0
    return out


def _spec_file(tmp_path, **overrides):
    spec = device.fitted_line(**overrides)
    p = tmp_path / "spec.json"
    p.write_text(json.dumps(device.spec_to_json(spec)))
    return p


def test_dispersion_outputs_and_manifest(tmp_path):
    out = _run(["dispersion", "--f-min", "1", "--f-max", "20",
                "--points", "20"], tmp_path / "d")
    rows = np.genfromtxt(out / "dispersion.csv", delimiter=",", names=True)
    assert len(rows) == 20
    assert np.all(np.isfinite(rows["k_sigma_rad_per_cell"]))
    # Delta column goes blank above its cutoff
    assert np.any(np.isnan(rows["k_delta_rad_per_cell"]))
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["tool"] == "twpc"
    for name, digest in manifest["outputs"].items():
        body = (out / name).read_bytes()
        assert hashlib.sha256(body).hexdigest() == digest


def test_phase_match_point(tmp_path):
    out = _run(["phase-match", "--process", "Ci", "--f-pump", "3",
                "--pump-flux", "0.06"], tmp_path / "m")
    rows = np.genfromtxt(out / "match_points.csv", delimiter=",", names=True,
                         ndmin=1)
    assert len(rows) == 1
    assert 5.0 < rows["f_s_GHz"][0] < 9.0
    assert rows["f_i_GHz"][0] == pytest.approx(rows["f_s_GHz"][0] + 6.0,
                                               abs=1e-9)


def test_gaps_map_files(tmp_path):
    out = _run(["gaps-map", "--processes", "Ci,Co", "--pump-min", "2.5",
                "--pump-max", "3.5", "--pump-points", "3",
                "--pump-eps", "0.05"], tmp_path / "g")
    for kind in ("Ci", "Co"):
        for direction in ("fw", "bw"):
            rows = np.genfromtxt(out / f"gaps_{kind}_{direction}.csv",
                                 delimiter=",", names=True, ndmin=1)
            assert len(rows) == 3


def test_scatter_writes_touchstone(tmp_path):
    out = _run(["scatter", "--f-min", "4", "--f-max", "8", "--points", "11"],
               tmp_path / "s")
    f, s, z = read_touchstone(out / "sweep.s4p")
    assert len(f) == 11 and s.shape == (11, 4, 4)
    assert z[0] > z[1]  # Sigma ports sit at the higher impedance


def test_isolate_with_defect_spec(tmp_path):
    spec = _spec_file(tmp_path, defects=((165, "open_junction"),))
    out = _run(["isolate", "--spec", str(spec), "--f-pump", "4.63",
                "--eps-min", "0.05", "--eps-max", "0.3", "--eps-points", "4"],
               tmp_path / "i")
    rows = np.genfromtxt(out / "isolation.csv", delimiter=",", names=True)
    assert len(rows) == 4
    # the defect scatters part of the pump into the forward direction, so
    # both curves deepen with amplitude, the backward one less steeply
    assert rows["forward_dB"][-1] < rows["forward_dB"][0] < 0
    assert rows["backward_dB"][-1] < rows["backward_dB"][0] < 0
    assert rows["forward_dB"][-1] < rows["backward_dB"][-1]


def test_nld_sim_summary(tmp_path):
    out = _run(["nld-sim", "--f-pump", "3", "--f-probe", "7.1",
                "--pump-flux", "0.05", "--harmonics", "2",
                "--n-sidebands", "1"], tmp_path / "n")
    pump = json.loads((out / "pump_solution.json").read_text())
    assert pump["residual"] < 1e-8
    assert pump["peak_junction_flux_quanta"] == pytest.approx(0.05, rel=0.1)
    summary = json.loads((out / "scattering_summary.json").read_text())
    assert summary["S_fw_dB"] < 0.1
    rows = np.genfromtxt(out / "sidebands.csv", delimiter=",", names=True)
    assert len(rows) == 4 * 3  # sidebands -1..1 at four ports


def test_nld_map_blank_cells_at_pump_harmonics(tmp_path):
    out = _run(["nld-map", "--pump-min", "3", "--pump-max", "3",
                "--pump-points", "1", "--probe-min", "5", "--probe-max", "7",
                "--probe-points", "3", "--pump-flux", "0.04",
                "--harmonics", "2", "--n-sidebands", "1"], tmp_path / "nm")
    lines = (out / "transmission_map.csv").read_text().splitlines()
    assert len(lines) == 4
    # the 6 GHz probe coincides with twice the pump: cells left blank
    blank = [ln for ln in lines[1:] if ln.endswith(",,")]
    assert len(blank) == 1 and blank[0].split(",")[1].startswith("6.0")


def test_tdr_pipeline_roundtrip(tmp_path):
    spec = _spec_file(tmp_path, defects=((165, "open_junction"),))
    s_out = _run(["scatter", "--spec", str(spec), "--f-min", "4",
                  "--f-max", "8", "--points", "401"], tmp_path / "sw")
    t_out = _run(["tdr", "--input", str(s_out / "sweep.s4p"), "--port", "0"],
                 tmp_path / "t")
    peaks = json.loads((t_out / "peaks.json").read_text())
    assert abs(peaks["cell"] - 165) < 28 + peaks["uncertainty_cells"]


def test_outputs_byte_identical_between_runs(tmp_path):
    args = ["nld-sim", "--f-pump", "3", "--f-probe", "7.1",
            "--pump-flux", "0.05", "--harmonics", "2", "--n-sidebands", "1"]
    a = _run(args, tmp_path / "a")
    b = _run(args, tmp_path / "b")
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        if name == "manifest.json":  # timestamps differ, checksums must not
            ma = json.loads((a / name).read_text())
            mb = json.loads((b / name).read_text())
            assert ma["outputs"] == mb["outputs"]
        else:
            assert (a / name).read_bytes() == (b / name).read_bytes()


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"l_j_nH": -1, "c_g_pF": 0.1, "c_i_pF": 0.5,
                               "plasma_ghz": 30, "n_cells": 10}))
    rc = main(["dispersion", "--spec", str(bad),
               "--out-dir", str(tmp_path / "o")])
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ConfigError"


def test_missing_input_exit_code(tmp_path):
    rc = main(["tdr", "--input", str(tmp_path / "nope.s4p"),
               "--out-dir", str(tmp_path / "o")])
    assert rc == 4
