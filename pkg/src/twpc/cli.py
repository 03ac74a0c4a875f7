"""Command-line interface: experiment orchestration and file emission.

Every subcommand writes its documented outputs into --out-dir together
with a run manifest (tool version, config hash, seed, timestamps and
per-output checksums).  All numeric output is deterministic for identical
config + seed; only manifest timestamps differ between runs.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import datetime
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, coupled_mode, device, dispersion, matching, \
    network, sidebands, tdr, touchstone
from .device import PHI0_BAR
from .dispersion import Mode
from .errors import ConfigError, NonConvergence, TwpcError
from .harmonic_balance import Drive, HarmonicBasis, incident_amplitude, \
    pump_harmonic_balance, pump_harmonics_at_ports
from .matching import Direction, ProcessKind

GHZ = 2e9 * math.pi
FLUX_Q = 2 * math.pi * PHI0_BAR

_KIND = {"Ci": ProcessKind.Circulation, "Co": ProcessKind.TunableCoupling,
         "Al": ProcessKind.CirculationAliased}


# ---------------------------------------------------------------------------
# output plumbing

def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.12e}"


class Runner:
    """Collects outputs of one subcommand and writes the manifest."""

    def __init__(self, out_dir: str, config: dict, seed: int):
        self.out = Path(out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.seed = seed
        self.started = datetime.datetime.now(datetime.timezone.utc)
        self.files = []

    def path(self, name: str) -> Path:
        p = self.out / name
        self.files.append(p)
        return p

    def write_csv(self, name: str, header: list, rows) -> Path:
        p = self.path(name)
        with open(p, "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(
                    _fmt(x) if x is None or isinstance(x, (int, float))
                    else str(x) for x in row) + "\n")
        return p

    def write_json(self, name: str, doc) -> Path:
        p = self.path(name)
        with open(p, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return p

    def finish(self) -> Path:
        cfg_bytes = json.dumps(self.config, sort_keys=True).encode()
        manifest = {
            "tool": "twpc",
            "version": __version__,
            "config": self.config,
            "config_sha256": hashlib.sha256(cfg_bytes).hexdigest(),
            "seed": self.seed,
            "started": self.started.isoformat(),
            "finished": datetime.datetime.now(
                datetime.timezone.utc).isoformat(),
            "outputs": {
                p.name: hashlib.sha256(p.read_bytes()).hexdigest()
                for p in self.files
            },
        }
        p = self.out / "manifest.json"
        with open(p, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return p


def _svg_plot(runner, name, plotter):
    """Best-effort quick-look plot; the CSVs are the contract."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except Exception:
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    plotter(ax)
    fig.tight_layout()
    fig.savefig(runner.path(name), format="svg")
    plt.close(fig)


# ---------------------------------------------------------------------------
# shared option handling

def _load_spec(args) -> device.LineSpec:
    if args.spec:
        spec = device.load_spec(args.spec)
    else:
        spec = device.fitted_line()
    if args.seed is not None:
        spec = device.LineSpec(spec.cell, spec.n_cells, spec.defects,
                               spec.disorder_halfwidth, args.seed)
    return device.validate(spec)


def _pump_epsilon(args, cell, omega_p: float) -> float:
    """Reduced pump amplitude from either --pump-eps or --pump-flux."""
    if getattr(args, "pump_eps", None) is not None:
        return args.pump_eps
    flux = getattr(args, "pump_flux", None)
    if flux is None:
        raise ConfigError([("pump_eps", "give --pump-eps or --pump-flux")])
    k_p = dispersion.pump_wavevector(cell, omega_p, 0.0)
    return dispersion.amplitude_from_flux(flux * FLUX_Q, k_p)


def _grid(lo_ghz, hi_ghz, n) -> np.ndarray:
    if n < 1 or hi_ghz < lo_ghz:
        raise ConfigError([("grid", "empty or inverted frequency grid")])
    return np.linspace(lo_ghz, hi_ghz, n) * GHZ


# ---------------------------------------------------------------------------
# subcommands

def cmd_dispersion(args, runner):
    spec = _load_spec(args)
    cell = spec.cell
    rows = []
    for w in _grid(args.f_min, args.f_max, args.points):
        row = [w / GHZ]
        for mode in (Mode.Sigma, Mode.Delta):
            try:
                k = dispersion.wavevector(mode, w, cell)
                row += [k, w / k]
            except TwpcError:
                row += [None, None]
        rows.append((row[0], row[1], row[3], row[2], row[4]))
    runner.write_csv("dispersion.csv",
                     ["f_GHz", "k_sigma_rad_per_cell", "k_delta_rad_per_cell",
                      "v_sigma_cell_per_s", "v_delta_cell_per_s"], rows)


def cmd_phase_match(args, runner):
    spec = _load_spec(args)
    omega_p = args.f_pump * GHZ
    eps = _pump_epsilon(args, spec.cell, omega_p)
    pts = matching.solve_corrected(_KIND[args.process], omega_p, eps,
                                   spec.cell)
    runner.write_csv(
        "match_points.csv",
        ["f_s_GHz", "f_i_GHz", "f_p_GHz", "k_s_rad_per_cell",
         "k_i_rad_per_cell", "k_p_rad_per_cell", "kappa_rad_per_cell",
         "delta_rad_per_s"],
        [(p.omega_s / GHZ, p.omega_i / GHZ, p.omega_p / GHZ,
          p.k_s, p.k_i, p.k_p, p.kappa, p.delta) for p in pts])


def cmd_gaps_map(args, runner):
    spec = _load_spec(args)
    kinds = [_KIND[k] for k in args.processes.split(",")]
    pump = _grid(args.pump_min, args.pump_max, args.pump_points)
    if getattr(args, "pump_flux", None) is not None:
        # fixed junction flux: amplitude varies along the pump axis
        curves = {}
        for kind in kinds:
            for direction in Direction:
                rows = []
                for wp in pump:
                    try:
                        eps = _pump_epsilon(args, spec.cell, wp)
                        pts = matching.solve_corrected(kind, wp, eps,
                                                       spec.cell)
                    except TwpcError:
                        continue
                    for p in pts:
                        probe = (p.omega_s if direction is Direction.forward
                                 else p.omega_i)
                        rows.append((wp, probe))
                rows.sort()
                curves[(kind, direction)] = np.array(rows).reshape(-1, 2)
    else:
        eps = args.pump_eps if args.pump_eps is not None else 0.0
        curves = matching.gap_map(kinds, pump, spec.cell, eps)
    for (kind, direction), arr in sorted(
            curves.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)):
        runner.write_csv(
            f"gaps_{kind.value}_{direction.value}.csv",
            ["f_pump_GHz", "f_probe_GHz"],
            [(a / GHZ, b / GHZ) for a, b in arr])
    return curves


def cmd_envelope(args, runner):
    spec = _load_spec(args)
    omega_p = args.f_pump * GHZ
    eps = _pump_epsilon(args, spec.cell, omega_p)
    kind = _KIND[args.process]
    pt = matching.solve_corrected(kind, omega_p, eps, spec.cell)[0]
    if kind is ProcessKind.TunableCoupling:
        cfg = coupled_mode.from_match_point(pt, spec.n_cells,
                                            pump_fw=eps, pump_bw=eps)
    else:
        cfg = coupled_mode.from_match_point(pt, spec.n_cells, pump_bw=eps)
    sol = coupled_mode.solve_uniform(cfg, 1.0)
    runner.write_csv(
        "envelope.csv",
        ["x_cell", "abs_eps_s", "abs_eps_i", "phase_s_rad", "phase_i_rad"],
        [(x, abs(s), abs(i), float(np.angle(s)), float(np.angle(i)))
         for x, s, i in zip(sol.x, sol.eps_s, sol.eps_i)])
    runner.write_json("envelope_summary.json", {
        "f_s_GHz": pt.omega_s / GHZ, "f_i_GHz": pt.omega_i / GHZ,
        "alpha_per_cell": sol.alpha,
        "total_attenuation_dB":
            20 * math.log10(abs(sol.total_attenuation)),
    })


def _local_defect_smatrix(spec, halfwidth=20):
    """Scattering of the defect neighbourhood alone: a short sub-chain
    with the defect at its center and image-matched ports."""
    sub = device.LineSpec(spec.cell, 2 * halfwidth + 1,
                          ((halfwidth, "open_junction"),),
                          0.0, spec.seed)
    net = network.build_chain(sub)
    cache = {}

    def smatrix(omega):
        if omega not in cache:
            cache[omega] = network.linear_scattering(net, omega)
        return cache[omega]

    return smatrix


def _isolation_curves(spec, omega_p, amplitudes, defect_cell):
    """Forward/backward attenuation (dB) of the circulation process vs
    pump amplitude, with optional defect and pump scattering."""
    cell = spec.cell
    rows = []
    for eps in amplitudes:
        pt = matching.solve_corrected(ProcessKind.Circulation, omega_p,
                                      eps, cell)[0]
        if defect_cell is None:
            cfg = coupled_mode.from_match_point(pt, spec.n_cells, pump_bw=eps)
            sol = coupled_mode.solve_uniform(cfg, 1.0)
            fw, bw = sol.total_attenuation, 1.0
        else:
            sm = _local_defect_smatrix(spec)
            s_p = sm(omega_p)
            # pump launched from the right Delta port; the defect splits it
            t_p, r_p = abs(s_p[1, 3]), abs(s_p[3, 3])
            xd = float(defect_cell)
            sections = ((0.0, xd, 0.0, t_p * eps),
                        (xd, spec.n_cells, r_p * eps, eps))
            cfg = coupled_mode.ProcessConfig(
                pt.kind, pt.omega_p, pt.omega_s, pt.k_s, pt.k_i, pt.k_p,
                spec.n_cells, sections=sections)
            fw, bw = coupled_mode.solve_with_defect(cfg, sm, 1.0)
        rows.append((eps, 20 * math.log10(max(abs(fw), 1e-300)),
                     20 * math.log10(max(abs(bw), 1e-300))))
    return rows


def cmd_isolate(args, runner):
    spec = _load_spec(args)
    omega_p = args.f_pump * GHZ
    amplitudes = np.linspace(args.eps_min, args.eps_max, args.eps_points)
    defect = spec.defects[0][0] if spec.defects else None
    rows = _isolation_curves(spec, omega_p, amplitudes, defect)
    runner.write_csv("isolation.csv",
                     ["pump_amplitude", "forward_dB", "backward_dB"], rows)
    return rows


def cmd_scatter(args, runner):
    spec = _load_spec(args)
    ports = args.ports
    if ports not in ("bloch", "lowfreq"):
        ports = tuple(float(z) for z in ports.split(","))
    net = network.build_chain(spec, ports)
    freqs = _grid(args.f_min, args.f_max, args.points)
    s = np.array([network.linear_scattering(net, w) for w in freqs])
    z = network.port_impedances(net, freqs[len(freqs) // 2])
    touchstone.write_touchstone(runner.path("sweep.s4p"),
                                freqs / (2 * math.pi), s, z)
    return freqs, s


def cmd_nld_sim(args, runner):
    spec = _load_spec(args)
    net = network.build_chain(spec)
    omega_p = args.f_pump * GHZ
    eps = _pump_epsilon(args, spec.cell, omega_p)
    basis = HarmonicBasis(args.harmonics)
    drives = [Drive(p, omega_p, incident_amplitude(net, omega_p, p, eps))
              for p in args.pump_ports]
    pump = pump_harmonic_balance(net, drives, basis)
    powers = pump_harmonics_at_ports(pump)
    runner.write_json("pump_solution.json", {
        "f_pump_GHz": args.f_pump,
        "pump_epsilon": eps,
        "harmonics": list(basis.orders),
        "iterations": pump.iterations,
        "residual": pump.residual,
        "peak_junction_flux_quanta": pump.peak_junction_flux() / FLUX_Q,
        "port_powers_W": powers.tolist(),
    })
    sc = sidebands.signal_sidebands(net, pump, args.f_probe * GHZ,
                                    args.n_sidebands)
    s0 = sc.s0()
    rows = []
    for i, w in enumerate(sc.freqs):
        for q in range(4):
            rows.append((i - sc.n_sidebands, w / GHZ, q,
                         abs(sc.s[i, q, sc.n_sidebands, 0]),
                         bool(sc.propagating[i, q])))
    runner.write_csv("sidebands.csv",
                     ["n", "f_GHz", "port", "abs_S_from_sigma_L",
                      "propagating"], rows)
    runner.write_json("scattering_summary.json", {
        "f_probe_GHz": args.f_probe,
        "S_fw_dB": 20 * math.log10(abs(s0[2, 0])),
        "S_bw_dB": 20 * math.log10(abs(s0[0, 2])),
    })


def cmd_nld_map(args, runner):
    spec = _load_spec(args)
    net = network.build_chain(spec)
    pump = _grid(args.pump_min, args.pump_max, args.pump_points)
    probe = _grid(args.probe_min, args.probe_max, args.probe_points)
    basis = HarmonicBasis(args.harmonics)

    def one_row(wp):
        eps = _pump_epsilon(args, spec.cell, wp)
        return sidebands.transmission_map(
            net, [wp], probe, eps, tuple(args.pump_ports), basis,
            args.n_sidebands)

    if args.threads > 1:
        with concurrent.futures.ThreadPoolExecutor(args.threads) as pool:
            results = list(pool.map(one_row, pump))
    else:
        results = [one_row(wp) for wp in pump]

    rows = []
    for i, wp in enumerate(pump):
        fw, bw, _ = results[i]
        for j, wpr in enumerate(probe):
            rows.append((wp / GHZ, wpr / GHZ, fw[0, j], bw[0, j]))
    runner.write_csv("transmission_map.csv",
                     ["f_pump_GHz", "f_probe_GHz", "S_fw_dB", "S_bw_dB"],
                     rows)
    return pump, probe, results


def cmd_tdr(args, runner):
    if args.input.endswith(".s4p"):
        f, s, _ = touchstone.read_touchstone(args.input)
        trace = s[:, args.port, args.port]
    else:
        data = np.genfromtxt(args.input, delimiter=",", names=True)
        f = data["f_Hz"]
        trace = data["s_re"] + 1j * data["s_im"]
    sweep = tdr.FrequencySweep((args.port, args.port), f, trace)
    imp = tdr.impulse_response(sweep, args.window, args.beta)
    runner.write_csv("impulse.csv", ["t_ns", "magnitude", "phase_rad"],
                     [(t, abs(h), float(np.angle(h)))
                      for t, h in zip(imp.t_ns, imp.h)])
    report = {"resolution_ns": imp.resolution_ns, "window": imp.window}
    try:
        est = tdr.locate_defect(imp, args.velocity, args.offset_ns)
        report.update(cell=est.cell, uncertainty_cells=est.uncertainty_cells,
                      t_peak_ns=est.t_peak_ns, magnitude=est.magnitude)
    except TwpcError as exc:
        report["error"] = str(exc)
    runner.write_json("peaks.json", report)


# ---------------------------------------------------------------------------
# figure-reproduction pipelines (bundled fitted-parameter presets)

def _fig_gaps(args, runner):
    args.processes = "Ci,Co,Al"
    args.pump_min, args.pump_max, args.pump_points = 2.0, 5.0, 61
    args.pump_flux, args.pump_eps = 0.12, None
    curves = cmd_gaps_map(args, runner)

    def plot(ax):
        for (kind, direction), arr in curves.items():
            if len(arr):
                ax.plot(arr[:, 0] / GHZ, arr[:, 1] / GHZ, ".",
                        label=f"{kind.value} {direction.value}")
        ax.set_xlabel("pump frequency (GHz)")
        ax.set_ylabel("probe frequency (GHz)")
        ax.legend(fontsize=7)
    _svg_plot(runner, "gap_overlays.svg", plot)


def _fig_isolation(args, runner):
    spec = device.fitted_line(defects=((165, "open_junction"),))
    omega_p = 4.63 * GHZ
    amplitudes = np.linspace(0.01, 0.42, 22)
    rows = _isolation_curves(spec, omega_p, amplitudes, 165)
    runner.write_csv("isolation_defect.csv",
                     ["pump_amplitude", "forward_dB", "backward_dB"], rows)

    def plot(ax):
        arr = np.array(rows)
        ax.plot(arr[:, 0], arr[:, 1], label="forward")
        ax.plot(arr[:, 0], arr[:, 2], label="backward")
        ax.set_xlabel("pump amplitude (reduced)")
        ax.set_ylabel("transmission (dB)")
        ax.legend()
    _svg_plot(runner, "isolation_defect.svg", plot)


def _fig_profile(args, runner):
    spec = device.fitted_line(defects=((165, "open_junction"),))
    net = network.build_chain(spec)
    w = 5.0 * GHZ
    rows = []
    profs = {}
    for port, label in ((0, "sigma_L"), (3, "delta_R")):
        prof = network.wave_amplitude_profile(net, port, w)
        profs[label] = prof
    for n in range(spec.n_cells):
        row = [n]
        for label in ("sigma_L", "delta_R"):
            for mode in (Mode.Sigma, Mode.Delta):
                f, b = profs[label][mode]
                row += [abs(f[n]), abs(b[n])]
        rows.append(row)
    runner.write_csv(
        "wave_profile.csv",
        ["cell",
         "drive_sigmaL_fwd_sigma", "drive_sigmaL_bwd_sigma",
         "drive_sigmaL_fwd_delta", "drive_sigmaL_bwd_delta",
         "drive_deltaR_fwd_sigma", "drive_deltaR_bwd_sigma",
         "drive_deltaR_fwd_delta", "drive_deltaR_bwd_delta"], rows)

    def plot(ax):
        arr = np.array(rows)
        ax.plot(arr[:, 0], arr[:, 1], label="fwd Sigma (Sigma-L drive)")
        ax.plot(arr[:, 0], arr[:, 2], label="bwd Sigma")
        ax.plot(arr[:, 0], arr[:, 7], label="fwd Delta (Delta-R drive)")
        ax.plot(arr[:, 0], arr[:, 8], label="bwd Delta")
        ax.set_xlabel("cell")
        ax.set_ylabel("|amplitude|")
        ax.legend(fontsize=7)
    _svg_plot(runner, "wave_profile.svg", plot)


def _fig_tdr(args, runner):
    spec = device.fitted_line(defects=((165, "open_junction"),))
    net = network.build_chain(spec)
    freqs = np.linspace(4e9, 8e9, 801)
    v = device.derive_constants(spec.cell).v_sigma0 / 1e9  # cell/ns
    report = {}
    curves = {}
    for port, label in ((0, "left"), (2, "right")):
        s11 = np.array([network.linear_scattering(net, 2 * math.pi * f)[
            port, port] for f in freqs])
        sweep = tdr.FrequencySweep((port, port), freqs, s11)
        imp = tdr.impulse_response(sweep)
        est = tdr.locate_defect(imp, v)
        curves[label] = imp
        report[label] = {"cell": est.cell, "t_peak_ns": est.t_peak_ns,
                         "uncertainty_cells": est.uncertainty_cells}
        runner.write_csv(f"tdr_{label}.csv", ["t_ns", "magnitude"],
                         [(t, abs(h)) for t, h in zip(imp.t_ns, imp.h)])
    report["resolution_ns"] = curves["left"].resolution_ns
    runner.write_json("tdr_peaks.json", report)

    def plot(ax):
        for label, imp in curves.items():
            ax.plot(imp.t_ns, np.abs(imp.h), label=f"from {label}")
        ax.set_xlim(0, 12)
        ax.set_xlabel("time (ns)")
        ax.set_ylabel("|impulse response|")
        ax.legend()
    _svg_plot(runner, "tdr.svg", plot)


def cmd_reproduce_fig(args, runner):
    {"2": _fig_gaps, "3b": _fig_isolation,
     "S6": _fig_profile, "S4": _fig_tdr}[args.figure](args, runner)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="twpc",
        description="two-mode Josephson transmission-line design toolkit")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--spec", help="LineSpec JSON file (default: bundled "
                                      "fitted parameters)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out-dir", default=".")

    p = sub.add_parser("dispersion", help="mode dispersion curves")
    common(p)
    p.add_argument("--f-min", type=float, default=0.1)
    p.add_argument("--f-max", type=float, default=22.0)
    p.add_argument("--points", type=int, default=220)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("phase-match", help="solve the conservation system")
    common(p)
    p.add_argument("--process", choices=list(_KIND), default="Ci")
    p.add_argument("--f-pump", type=float, required=True, help="GHz")
    p.add_argument("--pump-eps", type=float, default=None)
    p.add_argument("--pump-flux", type=float, default=None,
                   help="junction flux in flux quanta")
    p.set_defaults(func=cmd_phase_match)

    p = sub.add_parser("gaps-map", help="gap-locus curves vs pump frequency")
    common(p)
    p.add_argument("--processes", default="Ci,Co,Al")
    p.add_argument("--pump-min", type=float, default=2.0)
    p.add_argument("--pump-max", type=float, default=5.0)
    p.add_argument("--pump-points", type=int, default=31)
    p.add_argument("--pump-eps", type=float, default=None)
    p.add_argument("--pump-flux", type=float, default=None)
    p.set_defaults(func=cmd_gaps_map)

    p = sub.add_parser("envelope", help="signal/idler envelope profiles")
    common(p)
    p.add_argument("--process", choices=list(_KIND), default="Ci")
    p.add_argument("--f-pump", type=float, required=True)
    p.add_argument("--pump-eps", type=float, default=None)
    p.add_argument("--pump-flux", type=float, default=None)
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("isolate", help="attenuation vs pump amplitude")
    common(p)
    p.add_argument("--f-pump", type=float, required=True)
    p.add_argument("--eps-min", type=float, default=0.01)
    p.add_argument("--eps-max", type=float, default=0.4)
    p.add_argument("--eps-points", type=int, default=20)
    p.set_defaults(func=cmd_isolate)

    p = sub.add_parser("scatter", help="linear 4-port sweep to Touchstone")
    common(p)
    p.add_argument("--f-min", type=float, default=4.0)
    p.add_argument("--f-max", type=float, default=8.0)
    p.add_argument("--points", type=int, default=1601)
    p.add_argument("--ports", default="bloch",
                   help="bloch | lowfreq | comma-separated 4 ohm values")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("nld-sim", help="single pumped-line operating point")
    common(p)
    p.add_argument("--f-pump", type=float, required=True)
    p.add_argument("--f-probe", type=float, required=True)
    p.add_argument("--pump-eps", type=float, default=None)
    p.add_argument("--pump-flux", type=float, default=None)
    p.add_argument("--pump-ports", type=int, nargs="+", default=[3])
    p.add_argument("--harmonics", type=int, default=3)
    p.add_argument("--n-sidebands", type=int, default=2)
    p.set_defaults(func=cmd_nld_sim)

    p = sub.add_parser("nld-map", help="pump x probe transmission map")
    common(p)
    p.add_argument("--pump-min", type=float, default=2.5)
    p.add_argument("--pump-max", type=float, default=4.5)
    p.add_argument("--pump-points", type=int, default=5)
    p.add_argument("--probe-min", type=float, default=4.0)
    p.add_argument("--probe-max", type=float, default=12.0)
    p.add_argument("--probe-points", type=int, default=81)
    p.add_argument("--pump-eps", type=float, default=None)
    p.add_argument("--pump-flux", type=float, default=None)
    p.add_argument("--pump-ports", type=int, nargs="+", default=[3])
    p.add_argument("--harmonics", type=int, default=3)
    p.add_argument("--n-sidebands", type=int, default=2)
    p.set_defaults(func=cmd_nld_map)

    p = sub.add_parser("tdr", help="impulse response of a reflection sweep")
    common(p)
    p.add_argument("--input", required=True, help=".s4p or CSV sweep")
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--window", default="kaiser",
                   choices=["none", "kaiser", "hann"])
    p.add_argument("--beta", type=float, default=6.0)
    p.add_argument("--velocity", type=float, default=93.6, help="cell/ns")
    p.add_argument("--offset-ns", type=float, default=0.0)
    p.set_defaults(func=cmd_tdr)

    p = sub.add_parser("reproduce-fig", help="bundled figure pipelines")
    common(p)
    p.add_argument("figure", choices=["2", "3b", "S6", "S4"])
    p.set_defaults(func=cmd_reproduce_fig)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func",) and not callable(v)}
    try:
        runner = Runner(args.out_dir, config,
                        args.seed if args.seed is not None else 0)
        args.func(args, runner)
        runner.finish()
    except ConfigError as exc:
        json.dump({"error": "ConfigError",
                   "violations": exc.violations}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except NonConvergence as exc:
        json.dump({"error": "NonConvergence", "message": str(exc),
                   "iterations": exc.iterations,
                   "residual": exc.residual}, sys.stderr)
        sys.stderr.write("\n")
        return 3
    except OSError as exc:
        json.dump({"error": "IOError", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 4
    except TwpcError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)},
                  sys.stderr)
        sys.stderr.write("\n")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
