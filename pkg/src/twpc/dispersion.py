"""Linear and pump-renormalized dispersion of the Sigma and Delta modes.

The lumped-element dispersion of either mode reads

    cos(k a) = 1 + C L omega^2 / (-2 + 2 C_J L omega^2)

with C the mode shunt capacitance (C_g for Sigma, C_g + 2 C_i for Delta)
and L the junction inductance, possibly renormalized by a strong pump:
self-phase modulation (SPM) for the pump's own wavevector,

    L_spm = L_J * x / (2 J1(x)),    x = 4 eps sin(k a / 2),

cross-phase modulation (XPM, twice as strong at leading order) for weak
waves riding on the pumped line,

    L_xpm = L_J / J0(x).

Above-cutoff queries raise AboveCutoff rather than returning an evanescent
complex wavevector; the discrete network solver handles evanescence through
its own linear algebra.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import j0, j1

from .device import A_CELL, PHI0_BAR, CellParams
from .errors import AboveCutoff, AmplitudeOutOfRange, PumpAboveCutoff


class Mode(enum.Enum):
    Sigma = "sigma"
    Delta = "delta"


@dataclass(frozen=True)
class PumpContext:
    """Strong wave whose presence renormalizes the line.

    epsilon_p is the reduced flux amplitude (phi/phi0 units) of the
    traveling wave, k_p its wavevector (rad/cell), mode the mode it
    travels on (the slow Delta mode in normal operation).
    """

    epsilon_p: float
    k_p: float
    mode: Mode = Mode.Delta

    def __post_init__(self):
        if self.epsilon_p < 0:
            raise AmplitudeOutOfRange("epsilon_p must be >= 0")


def _shunt_cap(mode: Mode, cell: CellParams) -> float:
    return cell.c_g if mode is Mode.Sigma else cell.c_g + 2.0 * cell.c_i


# Validity bounds of the single-harmonic truncation: the renormalization
# factor (2 J1(x)/x for SPM, J0(x) for XPM) must stay above 0.5.
X_MAX_SPM = brentq(lambda x: 2.0 * j1(x) / x - 0.5, 1.0, 3.0, xtol=1e-13)
X_MAX_XPM = brentq(lambda x: j0(x) - 0.5, 0.5, 2.4, xtol=1e-13)


def _junction_x(epsilon: float, ka: float) -> float:
    return 4.0 * epsilon * math.sin(0.5 * ka)


def spm_inductance(l_j: float, epsilon: float, ka: float) -> float:
    """Junction inductance seen by a strong wave of reduced amplitude
    epsilon and wavevector ka (self-phase modulation)."""
    x = _junction_x(epsilon, ka)
    if abs(x) > X_MAX_SPM:
        raise AmplitudeOutOfRange(
            f"|x| = {abs(x):.4f} beyond SPM validity bound {X_MAX_SPM:.4f}")
    if x == 0.0:
        return l_j
    return l_j * x / (2.0 * j1(x))


def xpm_inductance(l_j: float, epsilon: float, ka: float) -> float:
    """Junction inductance seen by a weak wave in the presence of a strong
    wave of reduced amplitude epsilon and wavevector ka (cross-phase
    modulation; twice the SPM shift at leading order)."""
    x = _junction_x(epsilon, ka)
    if abs(x) > X_MAX_XPM:
        raise AmplitudeOutOfRange(
            f"|x| = {abs(x):.4f} beyond XPM validity bound {X_MAX_XPM:.4f}")
    return l_j / j0(x)


def _effective_inductance(mode: Mode, cell: CellParams,
                          renorm: PumpContext | None) -> float:
    if renorm is None or renorm.epsilon_p == 0.0:
        return cell.l_j
    if mode is renorm.mode:
        return spm_inductance(cell.l_j, renorm.epsilon_p, renorm.k_p * A_CELL)
    return xpm_inductance(cell.l_j, renorm.epsilon_p, renorm.k_p * A_CELL)


def cutoff(mode: Mode, cell: CellParams,
           renorm: PumpContext | None = None) -> float:
    """Propagation cutoff (rad/s), omega_co = 2/sqrt(L (C + 4 C_J))."""
    l_eff = _effective_inductance(mode, cell, renorm)
    return 2.0 / math.sqrt(l_eff * (_shunt_cap(mode, cell) + 4.0 * cell.c_j))


def wavevector(mode: Mode, omega, cell: CellParams,
               renorm: PumpContext | None = None):
    """Wavevector k(omega) in rad/cell, in (0, pi/a].

    Accepts a scalar or array omega; raises AboveCutoff if any frequency
    is at or above the (renormalized) cutoff.
    """
    l_eff = _effective_inductance(mode, cell, renorm)
    c = _shunt_cap(mode, cell)
    w2 = np.square(np.asarray(omega, dtype=float))
    arg = 1.0 + c * l_eff * w2 / (-2.0 + 2.0 * cell.c_j * l_eff * w2)
    if np.any(arg < -1.0) or np.any(arg > 1.0):
        om = np.max(omega)
        raise AboveCutoff(mode.name, float(om), cutoff(mode, cell, renorm))
    k = np.arccos(arg) / A_CELL
    return float(k) if np.isscalar(omega) else k


def phase_velocity(mode: Mode, omega, cell: CellParams,
                   renorm: PumpContext | None = None):
    """omega / k(omega), cell/s."""
    return omega / wavevector(mode, omega, cell, renorm)


def group_velocity(mode: Mode, omega: float, cell: CellParams,
                   renorm: PumpContext | None = None,
                   domega: float = 2 * math.pi * 1e6) -> float:
    """d(omega)/dk by central difference (cell/s)."""
    k1 = wavevector(mode, omega - domega, cell, renorm)
    k2 = wavevector(mode, omega + domega, cell, renorm)
    return 2.0 * domega / (k2 - k1)


def flux_from_amplitude(epsilon_p: float, k_p: float) -> float:
    """Peak junction flux Phi_JJ = 4 phi0 eps sin(k a / 2), in Wb."""
    return 4.0 * PHI0_BAR * epsilon_p * math.sin(0.5 * k_p * A_CELL)


def amplitude_from_flux(phi_jj: float, k_p: float) -> float:
    """Inverse of flux_from_amplitude."""
    return phi_jj / (4.0 * PHI0_BAR * math.sin(0.5 * k_p * A_CELL))


def pump_wavevector(cell: CellParams, omega_p: float, epsilon_p: float,
                    mode: Mode = Mode.Delta, tol: float = 1e-13,
                    max_iter: int = 200) -> float:
    """Self-consistent pump wavevector.

    The pump renormalizes its own inductance through SPM, which in turn
    changes its wavevector; iterate the fixed point k = k(omega_p; L_spm(k)).
    """
    try:
        k = wavevector(mode, omega_p, cell)
    except AboveCutoff as e:
        raise PumpAboveCutoff(str(e))
    for _ in range(max_iter):
        ctx = PumpContext(epsilon_p, k, mode)
        try:
            k_new = wavevector(mode, omega_p, cell, ctx)
        except AboveCutoff as e:
            raise PumpAboveCutoff(str(e))
        if abs(k_new - k) < tol:
            return k_new
        k = k_new
    raise PumpAboveCutoff(
        f"pump wavevector fixed point did not converge at omega_p={omega_p:.4g}")
