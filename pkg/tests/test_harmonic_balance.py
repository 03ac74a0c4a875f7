import math

import numpy as np
import pytest

from twpc import device, network
from twpc.device import PHI0_BAR
from twpc.dispersion import amplitude_from_flux, pump_wavevector
from twpc.errors import NonConvergence, TruncationWarning
from twpc.harmonic_balance import (Drive, HarmonicBasis, incident_amplitude,
                                   pump_harmonic_balance,
                                   pump_harmonics_at_ports)
from twpc.network import drive_solution

GHZ = 2e9 * math.pi
FLUX_Q = 2 * math.pi * PHI0_BAR


def test_basis_orders():
    assert HarmonicBasis(1).orders == (1,)
    assert HarmonicBasis(3).orders == (1, 3, 5)
    assert HarmonicBasis(4, include_even=True).orders == (1, 2, 3, 4)
    with pytest.raises(ValueError):
        HarmonicBasis(0)


def test_linear_limit_matches_linear_solver(fitted_net):
    """A tiny pump drive must reproduce the linear nodal solution."""
    w = 3 * GHZ
    eps = 1e-5
    a = incident_amplitude(fitted_net, w, 3, eps)
    sol = pump_harmonic_balance(fitted_net, [Drive(3, w, a)],
                                HarmonicBasis(3))
    v_lin = drive_solution(fitted_net, 3, w) * a
    v_hb = 1j * w * PHI0_BAR * sol.phi[0]
    np.testing.assert_allclose(v_hb, v_lin, rtol=1e-4)
    # harmonics >= 3 stay below 1e-6 of the fundamental
    fund = np.max(np.abs(sol.d[0]))
    assert np.max(np.abs(sol.d[1:])) < 1e-6 * fund


def test_quadratic_newton_contraction(fitted_net):
    w = 3 * GHZ
    eps = 0.25
    a = incident_amplitude(fitted_net, w, 3, eps)
    sol = pump_harmonic_balance(fitted_net, [Drive(3, w, a)],
                                HarmonicBasis(3))
    assert sol.residual < 1e-10
    h = [r for r in sol.residual_history if r > 1e-14]
    # final step roughly squares the previous residual (Newton)
    assert h[-1] < 10 * h[-2] ** 2 / h[-3] if len(h) >= 3 else True


def test_peak_flux_tracks_launched_wave(fitted_net):
    w = 3 * GHZ
    kp = pump_wavevector(fitted_net.cell, w, 0.0)
    eps = amplitude_from_flux(0.05 * FLUX_Q, kp)
    a = incident_amplitude(fitted_net, w, 3, eps)
    sol = pump_harmonic_balance(fitted_net, [Drive(3, w, a)],
                                HarmonicBasis(3))
    assert sol.peak_junction_flux() / FLUX_Q == pytest.approx(0.05, rel=0.05)


def test_strong_drive_converges_via_continuation(fitted_net):
    w = 5 * GHZ
    kp = pump_wavevector(fitted_net.cell, w, 0.0)
    eps = amplitude_from_flux(0.12 * FLUX_Q, kp)
    a = incident_amplitude(fitted_net, w, 3, eps)
    sol = pump_harmonic_balance(fitted_net, [Drive(3, w, a)],
                                HarmonicBasis(2))
    assert sol.residual < 1e-10


def test_flux_ceiling_warns(fitted_net):
    w = 3 * GHZ
    kp = pump_wavevector(fitted_net.cell, w, 0.0)
    eps = amplitude_from_flux(0.1 * FLUX_Q, kp)
    a = incident_amplitude(fitted_net, w, 3, eps)
    with pytest.warns(TruncationWarning):
        pump_harmonic_balance(fitted_net, [Drive(3, w, a)], HarmonicBasis(3),
                              flux_ceiling=0.05)


def test_mismatched_drive_frequencies_rejected(fitted_net):
    with pytest.raises(ValueError):
        pump_harmonic_balance(fitted_net,
                              [Drive(1, 3 * GHZ, 1e-7),
                               Drive(3, 4 * GHZ, 1e-7)], HarmonicBasis(2))
    with pytest.raises(ValueError):
        pump_harmonic_balance(fitted_net, [], HarmonicBasis(2))


def test_uniform_line_keeps_harmonics_off_sigma_ports(fitted_net):
    w = 2 * GHZ
    a = incident_amplitude(fitted_net, w, 3, 0.05)
    sol = pump_harmonic_balance(fitted_net, [Drive(3, w, a)],
                                HarmonicBasis(3))
    p = pump_harmonics_at_ports(sol)
    drive_power = a ** 2
    # symmetric line: nothing leaks to the Sigma ports at any harmonic
    assert p[0].max() < 1e-20 * drive_power
    assert p[2].max() < 1e-20 * drive_power


def test_even_harmonics_vanish_on_symmetric_line(fitted_net):
    w = 2 * GHZ
    a = incident_amplitude(fitted_net, w, 3, 0.05)
    sol = pump_harmonic_balance(fitted_net, [Drive(3, w, a)],
                                HarmonicBasis(4, include_even=True))
    tot = pump_harmonics_at_ports(sol).sum(axis=0)  # orders 1..4
    assert tot[1] < 1e-6 * tot[2]  # 2nd harmonic far below 3rd
    assert tot[3] < 1e-6 * tot[2]


def test_defect_pump_transmission_about_five_percent(defect_net):
    """Pump from the right Delta port: the open junction reflects most of
    it; only ~5% of the power continues on the Delta mode."""
    w = 4.63 * GHZ
    eps = 0.05
    a = incident_amplitude(defect_net, w, 3, eps)
    sol = pump_harmonic_balance(defect_net, [Drive(3, w, a)],
                                HarmonicBasis(2))
    p = pump_harmonics_at_ports(sol)
    t_delta = p[1, 0] / a ** 2
    assert t_delta == pytest.approx(0.05, abs=0.05)
    # flux amplitude right of the defect far exceeds the left side
    d1 = np.abs(sol.d[0])
    cells = np.array([c for _, c in sol.branches])
    right = d1[cells > 170].mean()
    left = d1[cells < 160].mean()
    assert right > 3 * left
    # fundamental leaks to the Sigma mode at roughly the -7 dB level
    leak = (p[0, 0] + p[2, 0]) / a ** 2
    assert 10 * math.log10(leak) == pytest.approx(-7.0, abs=3.0)
