"""Phase matching of the three-wave mixing processes.

Three processes couple a weak Sigma-mode wave to a strong, slow Delta-mode
pump:

* Circulation (Ci): a forward signal at omega_S absorbs two backward pump
  photons and converts to a backward idler at omega_I = omega_S + 2 omega_P.
  Momentum balance: k_S(omega_S) + k_S(omega_I) = 2 k_D(omega_P).
* Tunable coupling (Co): absorption of one pump photon from each of two
  counterpropagating pumps reflects the signal at its own frequency.
  Momentum balance: k_S(omega_S) = k_D(omega_P).
* Aliased circulation (Al): same photon bookkeeping as Ci but with both
  weak waves' momenta adding up; the discrete lattice supplies one
  reciprocal-lattice quantum 2 pi / a (umklapp), so
  k_S(omega_S) + k_S(omega_I) + 2 k_D(omega_P) = 2 pi / a.

All wavevectors above are magnitudes of the renormalized lumped dispersion:
the pump wavevector is the SPM self-consistent one, and the weak Sigma
waves see the pump through XPM.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .device import A_CELL, CellParams
from .dispersion import Mode, PumpContext, cutoff, pump_wavevector, wavevector
from .errors import NoSolutionInBand, PumpAboveCutoff


class ProcessKind(enum.Enum):
    Circulation = "Ci"
    CirculationAliased = "Al"
    TunableCoupling = "Co"


class Direction(enum.Enum):
    forward = "fw"
    backward = "bw"


@dataclass(frozen=True)
class MatchPoint:
    """One solution of the energy/momentum conservation system.

    Frequencies in rad/s, wavevectors signed in rad/cell (positive =
    forward).  kappa is the residual momentum mismatch of the conservation
    equation at this point, delta the energy detuning; both vanish (to
    solver tolerance) for points returned by the solvers.
    """

    kind: ProcessKind
    omega_s: float
    omega_i: float
    omega_p: float
    k_s: float
    k_i: float
    k_p: float
    kappa: float = 0.0
    delta: float = 0.0


def circulation_point_lowfreq(omega_p: float, v_sigma: float,
                              v_delta: float) -> tuple[float, float]:
    """Dispersionless circulation frequencies.

    General velocity form with signal forward on Sigma, idler backward on
    Sigma, pump backward on Delta:

        omega_S = 2 omega_P (1/v_I - 1/v_P) / (1/v_S - 1/v_I)

    which simplifies to omega_S = omega_P (v_Sigma/v_Delta - 1).
    Returns (omega_S, omega_I) with omega_I = omega_S + 2 omega_P.
    """
    v_s, v_i, v_p = v_sigma, -v_sigma, -v_delta
    omega_s = 2.0 * omega_p * (1.0 / v_i - 1.0 / v_p) / (1.0 / v_s - 1.0 / v_i)
    return omega_s, omega_s + 2.0 * omega_p


def coupler_point_lowfreq(omega_p: float, v_sigma: float,
                          v_delta: float) -> float:
    """Dispersionless tunable-coupling frequency omega_S = omega_P v_S/v_D."""
    return omega_p * abs(v_sigma / v_delta)


def _residual_fn(kind: ProcessKind, omega_p: float, k_p: float,
                 cell: CellParams, ctx: PumpContext | None):
    """Momentum residual as a function of signal frequency (rad/cell)."""
    if kind is ProcessKind.TunableCoupling:
        def res(w):
            return wavevector(Mode.Sigma, w, cell, ctx) - k_p
    elif kind is ProcessKind.Circulation:
        def res(w):
            return (wavevector(Mode.Sigma, w, cell, ctx)
                    + wavevector(Mode.Sigma, w + 2.0 * omega_p, cell, ctx)
                    - 2.0 * k_p)
    else:  # CirculationAliased: lattice supplies 2 pi / a
        def res(w):
            return (wavevector(Mode.Sigma, w, cell, ctx)
                    + wavevector(Mode.Sigma, w + 2.0 * omega_p, cell, ctx)
                    + 2.0 * k_p - 2.0 * math.pi / A_CELL)
    return res


def solve_corrected(kind: ProcessKind, omega_p: float, epsilon_p: float,
                    cell: CellParams, scan_step: float = 2e7 * math.pi,
                    tol: float = 1e-10) -> list[MatchPoint]:
    """All matched signal frequencies of the full transcendental system.

    Brackets sign changes of the momentum residual on a coarse grid
    (default 10 MHz) over the open signal band, then bisects each bracket.
    Roots are returned sorted ascending in omega_s; raises NoSolutionInBand
    when there is none.
    """
    k_p = pump_wavevector(cell, omega_p, epsilon_p)
    ctx = PumpContext(epsilon_p, k_p) if epsilon_p > 0 else None
    co_sigma = cutoff(Mode.Sigma, cell, ctx)

    hi = co_sigma * (1.0 - 1e-9)
    if kind in (ProcessKind.Circulation, ProcessKind.CirculationAliased):
        hi -= 2.0 * omega_p
    lo = min(scan_step, 0.5 * hi)
    if hi <= lo:
        raise NoSolutionInBand(
            f"{kind.value}: empty signal band at f_P = {omega_p/2e9/math.pi:.3f} GHz")

    res = _residual_fn(kind, omega_p, k_p, cell, ctx)
    grid = np.arange(lo, hi, scan_step)
    if grid[-1] < hi:
        grid = np.append(grid, hi)
    vals = np.array([res(w) for w in grid])

    points = []
    for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0):
        if vals[i] == 0.0:
            w_root = grid[i]
        else:
            w_root = brentq(res, grid[i], grid[i + 1], xtol=1e-3, rtol=1e-15)
        r = res(w_root)
        if abs(r) > tol:
            continue
        omega_s = float(w_root)
        if kind is ProcessKind.TunableCoupling:
            omega_i = omega_s
        else:
            omega_i = omega_s + 2.0 * omega_p
        k_s = wavevector(Mode.Sigma, omega_s, cell, ctx)
        k_i = -wavevector(Mode.Sigma, omega_i, cell, ctx)
        points.append(MatchPoint(kind, omega_s, omega_i, omega_p,
                                 k_s, k_i, k_p, kappa=float(r)))
    if not points:
        raise NoSolutionInBand(
            f"{kind.value}: no phase-matched point at "
            f"f_P = {omega_p/2e9/math.pi:.3f} GHz, eps_P = {epsilon_p:.4f}")
    return points


def gap_map(kinds, pump_grid, cell: CellParams, epsilon_p: float) -> dict:
    """Probe-frequency loci of the transmission gaps.

    Returns {(kind, direction): array of (omega_p, omega_probe) rows}.
    Forward curves are at the signal frequency; backward curves at the
    idler frequency (the same process probed from the other port), which
    coincide for the reciprocal coupling process.  Pump points with no
    solution are simply absent from the curve.
    """
    curves = {}
    for kind in kinds:
        for direction in Direction:
            rows = []
            for omega_p in pump_grid:
                try:
                    pts = solve_corrected(kind, omega_p, epsilon_p, cell)
                except (NoSolutionInBand, PumpAboveCutoff):
                    continue
                for pt in pts:
                    probe = (pt.omega_s if direction is Direction.forward
                             else pt.omega_i)
                    rows.append((omega_p, probe))
            rows.sort()
            curves[(kind, direction)] = np.array(rows).reshape(-1, 2)
    return curves
