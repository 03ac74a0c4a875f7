"""Frequency-domain Newton solve of the pumped chain's periodic steady state.

Unknowns are the reduced node-flux phasors phi_m (phi/phi0, convention
x(t) = X e^{i m w t} + c.c.) at odd pump harmonics m in {1, 3, ..., 2M-1};
even harmonics cannot be generated by the quartic junction nonlinearity on
a symmetric line.  Each junction carries the full current phi0 sin(delta)/L,
whose harmonic content is evaluated by oversampled FFT of the sampled
orbit — numerically identical to the Jacobi-Anger expansion but exact for
multi-harmonic flux drops.  The Newton Jacobian uses the FFT of
cos(delta(t)) as the conversion operator between harmonics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .device import PHI0_BAR
from .errors import NonConvergence, SingularNetwork, TruncationWarning
from .network import (ChainNetwork, capacitance_matrix, junction_incidence,
                      load_conductance, port_basis, port_impedances)

K_SAMPLES = 128  # FFT oversampling of the junction orbit


@dataclass(frozen=True)
class HarmonicBasis:
    """Retained pump harmonics: odd orders {1, 3, ..., 2M-1} by default.

    Even orders cannot be excited on a symmetric line, so excluding them
    is exact there; ``include_even`` retains {1, 2, ..., M} instead,
    useful to verify that even harmonics indeed stay at the numerical
    floor, or for deliberately asymmetric networks.
    """

    m: int = 3
    include_even: bool = False

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need at least one harmonic")

    @property
    def orders(self) -> tuple:
        if self.include_even:
            return tuple(range(1, self.m + 1))
        return tuple(range(1, 2 * self.m, 2))


@dataclass(frozen=True)
class Drive:
    """Incident pump wave: port index, angular frequency, power-wave
    amplitude (sqrt(W)) and phase (rad)."""

    port: int
    omega_p: float
    amplitude: float
    phase: float = 0.0


def incident_amplitude(net: ChainNetwork, omega: float, port: int,
                       epsilon: float) -> float:
    """Power-wave amplitude (sqrt W) launching a traveling wave of reduced
    flux amplitude epsilon on a matched line.

    epsilon is in the per-electrode (mode half-difference/half-sum)
    convention; the orthonormal port variable is sqrt(2) larger.
    """
    z = port_impedances(net, omega)[port]
    return math.sqrt(2.0) * omega * PHI0_BAR * epsilon / math.sqrt(z)


@dataclass(frozen=True)
class PumpSolution:
    net: ChainNetwork
    basis: HarmonicBasis
    omega_p: float
    phi: np.ndarray        # (M, n_nodes) reduced node-flux phasors
    d: np.ndarray          # (M, n_branches) junction flux drops
    g: np.ndarray          # (n_branches,) 1/L per junction
    branches: list         # (electrode, cell) per branch
    drives: tuple
    residual: float
    iterations: int
    residual_history: tuple

    def junction_gamma(self) -> np.ndarray:
        """(n_branches, K) FFT coefficients of cos(delta(t)) along the
        converged pump orbit — the conversion matrix entries used to
        linearize the chain around the pump."""
        if not len(self.d):
            return np.ones((0, K_SAMPLES))
        delta = _orbit(self.d, self.basis.orders)
        return np.fft.fft(np.cos(delta), axis=1) / K_SAMPLES

    def peak_junction_flux(self) -> float:
        """max_t max_j |delta_j(t)| * phi0, in Wb."""
        if not len(self.d):
            return 0.0
        delta = _orbit(self.d, self.basis.orders)
        return float(np.max(np.abs(delta))) * PHI0_BAR


def _orbit(d: np.ndarray, orders) -> np.ndarray:
    """Sampled real orbit delta(t_l) from phasors d (M, n_br)."""
    n_br = d.shape[1]
    x = np.zeros((n_br, K_SAMPLES), complex)
    for h, m in enumerate(orders):
        x[:, m] = d[h]
        x[:, K_SAMPLES - m] = np.conj(d[h])
    return K_SAMPLES * np.fft.ifft(x, axis=1).real


def _real_block(p, q=None):
    """Real 2x2-block form of z -> P z + Q conj(z)."""
    if q is None:
        return sp.bmat([[p.real, -p.imag], [p.imag, p.real]])
    return sp.bmat([[(p + q).real, -(p - q).imag],
                    [(p + q).imag, (p - q).real]])


def pump_harmonic_balance(net: ChainNetwork, drives, basis: HarmonicBasis,
                          tol: float = 1e-10, max_iter: int = 50,
                          flux_ceiling: float = 0.3) -> PumpSolution:
    """Newton harmonic balance of the pump steady state.

    drives: iterable of Drive (or (port, omega_p, amplitude, phase)
    tuples), all at the same omega_p; simultaneous drives from both Delta
    ports realize the coupler configuration.  On failure the drive is
    ramped adaptively (step-halving amplitude continuation, each step
    warm-started from the previous converged state) before NonConvergence
    is raised.  flux_ceiling bounds the converged peak junction flux in
    units of the flux quantum (warning above).
    """
    drives = tuple(d if isinstance(d, Drive) else Drive(*d) for d in drives)
    if not drives:
        raise ValueError("need at least one drive")
    omega_p = drives[0].omega_p
    if any(abs(d.omega_p - omega_p) > 1e-6 for d in drives):
        raise ValueError("all drives must share one pump frequency")

    orders = basis.orders
    n = net.n_nodes
    cap = capacitance_matrix(net)
    dmat, g, branches = junction_incidence(net)
    e = port_basis(net)
    z = port_impedances(net, omega_p)
    loads = load_conductance(net, omega_p)

    i_src = np.zeros(n, complex)
    for d in drives:
        i_src += (e[:, d.port].astype(complex) * 2.0 / math.sqrt(z[d.port])
                  * d.amplitude * np.exp(1j * d.phase))
    scale = np.linalg.norm(i_src)

    # linear complex operator per harmonic acting on reduced flux
    lin = [(1j * m * omega_p * cap + loads) * (1j * m * omega_p * PHI0_BAR)
           for m in orders]

    def residual(phi):
        d_br = np.array([dmat @ phi[h] for h in range(len(orders))])
        delta = _orbit(d_br, orders)
        s = np.fft.fft(np.sin(delta), axis=1) / K_SAMPLES
        res = np.empty_like(phi)
        for h, m in enumerate(orders):
            i_nl = PHI0_BAR * g * s[:, m]
            res[h] = lin[h] @ phi[h] + dmat.T @ i_nl
        res[0] -= i_src
        return res, d_br, delta

    def jacobian(delta):
        gamma = np.fft.fft(np.cos(delta), axis=1) / K_SAMPLES
        blocks = [[None] * len(orders) for _ in orders]
        for h, m in enumerate(orders):
            for h2, m2 in enumerate(orders):
                wm = PHI0_BAR * g * gamma[:, (m - m2) % K_SAMPLES]
                wp = PHI0_BAR * g * gamma[:, (m + m2) % K_SAMPLES]
                p = dmat.T @ sp.diags(wm) @ dmat
                q = dmat.T @ sp.diags(wp) @ dmat
                if h == h2:
                    p = p + lin[h]
                blocks[h][h2] = _real_block(p.tocsr(), q.tocsr())
        return sp.bmat(blocks).tocsc()

    def rnorm_of(res):
        return math.sqrt(sum(np.linalg.norm(r) ** 2 for r in res)) / scale

    def newton(phi, max_iter):
        history = []
        res, d_br, delta = residual(phi)
        rnorm = rnorm_of(res)
        for it in range(max_iter):
            history.append(rnorm)
            if rnorm < tol:
                return phi, d_br, rnorm, it, history
            j = jacobian(delta)
            rhs = np.concatenate([np.concatenate([r.real, r.imag])
                                  for r in res])
            try:
                dx = spla.splu(j).solve(rhs)
            except RuntimeError as exc:
                raise SingularNetwork(str(exc))
            step = np.empty_like(phi)
            for h in range(len(orders)):
                seg = dx[2 * h * n:2 * (h + 1) * n]
                step[h] = seg[:n] + 1j * seg[n:]
            # backtracking line search on the residual norm
            lam = 1.0
            for _ in range(12):
                trial = phi - lam * step
                res_t, d_t, delta_t = residual(trial)
                rn_t = rnorm_of(res_t)
                if rn_t < rnorm:
                    break
                lam *= 0.5
            else:
                return None, d_br, rnorm, it + 1, history
            phi, res, d_br, delta, rnorm = trial, res_t, d_t, delta_t, rn_t
        history.append(rnorm)
        if rnorm < tol:
            return phi, d_br, rnorm, max_iter, history
        return None, d_br, rnorm, max_iter, history

    phi = np.zeros((len(orders), n), complex)
    out = newton(phi, max_iter)
    if out[0] is None:
        # adaptive amplitude continuation: advance the drive fraction with
        # step halving on failure, warm-starting each step by linearly
        # rescaling the last converged state
        full_src = i_src.copy()
        frac, step = 0.0, 0.5
        phi_ok = np.zeros((len(orders), n), complex)
        while frac < 1.0:
            trial_frac = min(1.0, frac + step)
            i_src = full_src * trial_frac
            scale = np.linalg.norm(i_src)
            phi = phi_ok * (trial_frac / frac if frac else 1.0)
            out = newton(phi, max_iter)
            if out[0] is None:
                step *= 0.5
                if step < 0.02:
                    i_src = full_src
                    raise NonConvergence(out[3], out[2])
                continue
            frac, phi_ok = trial_frac, out[0]
        i_src = full_src
    phi, d_br, rnorm, it, history = out

    sol = PumpSolution(net, basis, omega_p, phi, d_br, g, branches,
                       drives, rnorm, it, tuple(history))
    peak = sol.peak_junction_flux() / (2.0 * math.pi * PHI0_BAR)
    if peak > flux_ceiling:
        warnings.warn(
            f"peak junction flux {peak:.3f} flux quanta exceeds the "
            f"{flux_ceiling:.2f} ceiling; harmonic truncation may be "
            "unreliable", TruncationWarning)
    top = np.max(np.abs(d_br[-1])) if len(orders) > 1 else 0.0
    fund = np.max(np.abs(d_br[0])) if d_br.size else 0.0
    if fund > 0 and len(orders) > 1 and top > 0.1 * fund:
        warnings.warn(
            "highest retained pump harmonic carries >10% of the "
            "fundamental flux; increase the basis order", TruncationWarning)
    return sol


def pump_harmonics_at_ports(pump: PumpSolution) -> np.ndarray:
    """Outgoing power |b|^2 (W) at each (port, harmonic).

    Shape (4, M); the incident drive is subtracted at the driven port so
    entries are outgoing waves only.
    """
    net = pump.net
    e = port_basis(net)
    out = np.zeros((4, len(pump.basis.orders)))
    for h, m in enumerate(pump.basis.orders):
        omega_m = m * pump.omega_p
        z = port_impedances(net, omega_m)
        v_ports = e.T @ (1j * omega_m * PHI0_BAR * pump.phi[h])
        b = v_ports / np.sqrt(z)
        if m == 1:
            for d in pump.drives:
                b[d.port] -= d.amplitude * np.exp(1j * d.phase)
        out[:, h] = np.abs(b) ** 2
    return out
