"""Discrete linear 4-port model of the full chain.

The chain is assembled as N symmetric pi-sections: each cell carries its
series junction branches (L shunted by C_J, one per electrode) with half
of the shunt capacitance (C_g to ground, C_i between electrodes) on each
side.  End columns therefore hold half-weight shunts, which makes the
image (Bloch) impedance termination exactly reflectionless at every
frequency below cutoff.

Nodes are the 2(N+1) electrode columns; ports are defined in the
Sigma/Delta mode basis at both ends, ordered

    0: (Sigma, L)   1: (Delta, L)   2: (Sigma, R)   3: (Delta, R).

Mode variables use the orthonormal transform V_Sigma = (V_a + V_b)/sqrt(2),
V_Delta = (V_b - V_a)/sqrt(2) (same for currents), under which the mode
characteristic impedances equal the per-electrode values sqrt(L_J/C_g) and
sqrt(L_J/(C_g + 2 C_i)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .device import CellParams, DerivedConstants, LineSpec, derive_constants, \
    sample_disorder, validate
from .dispersion import Mode, wavevector
from .errors import DecompositionIllConditioned, SingularNetwork

#: port order (mode, side)
PORTS = ((Mode.Sigma, "L"), (Mode.Delta, "L"),
         (Mode.Sigma, "R"), (Mode.Delta, "R"))

# orthonormal mode transform V_m = A_MODE V_e for electrode order (a, b),
# mode order (Sigma, Delta); currents map as I_e = A_MODE.T I_m
_S2 = 1.0 / math.sqrt(2.0)
A_MODE = np.array([[_S2, _S2], [-_S2, _S2]])


@dataclass(frozen=True)
class ChainNetwork:
    """Element values of the chain after disorder/defect application."""

    cell: CellParams
    n_cells: int
    l_table: np.ndarray       # (n_cells, 2) junction inductances, inf = open
    port_z: object            # "bloch" or sequence of 4 reference impedances
    consts: DerivedConstants

    @property
    def n_nodes(self) -> int:
        return 2 * (self.n_cells + 1)


def build_chain(spec: LineSpec, port_z="bloch") -> ChainNetwork:
    """Assemble the chain; deterministic for a given spec seed.

    port_z selects the port reference impedances: "bloch" for the exact
    image impedance of the pi-section (frequency dependent), "lowfreq"
    for the constant long-wavelength values Z_Sigma/Z_Delta, or an
    explicit sequence of 4 ohm values in port order.
    """
    validate(spec)
    table = sample_disorder(spec)
    table.setflags(write=False)
    consts = derive_constants(spec.cell)
    if not isinstance(port_z, str):
        port_z = tuple(float(z) for z in port_z)
        assert len(port_z) == 4
    return ChainNetwork(spec.cell, spec.n_cells, table, port_z, consts)


def bloch_impedance(mode: Mode, omega: float, cell: CellParams) -> complex:
    """Image impedance of one symmetric pi-section (real below cutoff)."""
    c = cell.c_g if mode is Mode.Sigma else cell.c_g + 2.0 * cell.c_i
    z_se = 1.0 / (1.0 / (1j * omega * cell.l_j) + 1j * omega * cell.c_j)
    y_sh = 0.5j * omega * c
    return cmath.sqrt(z_se / (y_sh * (2.0 + z_se * y_sh)))


def port_impedances(net: ChainNetwork, omega: float) -> np.ndarray:
    """Reference impedance of each port at omega (always real)."""
    if isinstance(net.port_z, tuple):
        return np.array(net.port_z)
    if net.port_z == "lowfreq":
        z = (net.consts.z_sigma, net.consts.z_delta)
    else:  # bloch, falling back to the low-frequency value above cutoff
        z = []
        for mode, zl in ((Mode.Sigma, net.consts.z_sigma),
                         (Mode.Delta, net.consts.z_delta)):
            zb = bloch_impedance(mode, omega, net.cell)
            z.append(zb.real if abs(zb.imag) < 1e-9 * abs(zb) else zl)
    return np.array([z[0], z[1], z[0], z[1]])


# ---------------------------------------------------------------------------
# matrix building blocks: Y(omega) = i omega C + Gamma/(i omega) + G_loads

def _node(net, electrode: int, column: int) -> int:
    return electrode * (net.n_cells + 1) + column


def capacitance_matrix(net: ChainNetwork, include_c_j: bool = True):
    """Real sparse nodal capacitance matrix (defect branches removed)."""
    n_col = net.n_cells + 1
    rows, cols, vals = [], [], []

    w = np.ones(n_col)
    w[0] = w[-1] = 0.5
    # shunt C_g on both electrodes
    for e in (0, 1):
        idx = [_node(net, e, c) for c in range(n_col)]
        rows += idx; cols += idx
        vals += list(w * net.cell.c_g)
    # floating C_i between electrodes
    ia = [_node(net, 0, c) for c in range(n_col)]
    ib = [_node(net, 1, c) for c in range(n_col)]
    ci = w * net.cell.c_i
    rows += ia + ib + ia + ib
    cols += ia + ib + ib + ia
    vals += list(ci) + list(ci) + list(-ci) + list(-ci)
    # junction shunt capacitances
    if include_c_j:
        for e in (0, 1):
            for n in range(net.n_cells):
                if not np.isfinite(net.l_table[n, e]):
                    continue
                i, j = _node(net, e, n), _node(net, e, n + 1)
                rows += [i, j, i, j]
                cols += [i, j, j, i]
                vals += [net.cell.c_j, net.cell.c_j,
                         -net.cell.c_j, -net.cell.c_j]
    m = sp.coo_matrix((vals, (rows, cols)),
                      shape=(net.n_nodes, net.n_nodes))
    return m.tocsc()


def inverse_inductance_matrix(net: ChainNetwork):
    """Real sparse 1/L stamp of the junction branches."""
    rows, cols, vals = [], [], []
    for e in (0, 1):
        for n in range(net.n_cells):
            l = net.l_table[n, e]
            if not np.isfinite(l):
                continue
            g = 1.0 / l
            i, j = _node(net, e, n), _node(net, e, n + 1)
            rows += [i, j, i, j]
            cols += [i, j, j, i]
            vals += [g, g, -g, -g]
    m = sp.coo_matrix((vals, (rows, cols)),
                      shape=(net.n_nodes, net.n_nodes))
    return m.tocsc()


def junction_incidence(net: ChainNetwork):
    """Sparse D with (D phi)_j = phi(right) - phi(left) for each junction
    branch (defect branches excluded), and the 1/L value per branch."""
    rows, cols, vals, g = [], [], [], []
    j = 0
    branches = []
    for e in (0, 1):
        for n in range(net.n_cells):
            l = net.l_table[n, e]
            if not np.isfinite(l):
                continue
            rows += [j, j]
            cols += [_node(net, e, n), _node(net, e, n + 1)]
            vals += [-1.0, 1.0]
            g.append(1.0 / l)
            branches.append((e, n))
            j += 1
    d = sp.coo_matrix((vals, (rows, cols)), shape=(j, net.n_nodes)).tocsr()
    return d, np.array(g), branches


def port_basis(net: ChainNetwork):
    """(E, V) with E (n_nodes, 4): nodal injection pattern of unit mode
    current at each port, and V = E.T extracting mode voltages."""
    e = np.zeros((net.n_nodes, 4))
    for p, (mode, side) in enumerate(PORTS):
        col = 0 if side == "L" else net.n_cells
        m = 0 if mode is Mode.Sigma else 1
        # I_e = A_MODE.T I_m
        e[_node(net, 0, col), p] = A_MODE.T[0, m]
        e[_node(net, 1, col), p] = A_MODE.T[1, m]
    return e


def load_conductance(net: ChainNetwork, omega: float):
    """Real sparse stamp of the four port termination resistors."""
    z = port_impedances(net, omega)
    e = port_basis(net)
    # Y_load = sum_p (1/Z_p) e_p e_p^T; each e_p touches two nodes only
    rows, cols, vals = [], [], []
    for p in range(4):
        nz = np.flatnonzero(e[:, p])
        for i in nz:
            for j in nz:
                rows.append(i); cols.append(j)
                vals.append(e[i, p] * e[j, p] / z[p])
    return sp.coo_matrix((vals, (rows, cols)),
                         shape=(net.n_nodes, net.n_nodes)).tocsc()


def admittance_matrix(net: ChainNetwork, omega: float, loads: bool = True):
    y = (1j * omega * capacitance_matrix(net)
         + inverse_inductance_matrix(net) / (1j * omega))
    if loads:
        y = y + load_conductance(net, omega)
    return y.tocsc()


# ---------------------------------------------------------------------------

def _solve(y, b):
    try:
        lu = spla.splu(y)
    except RuntimeError as exc:
        raise SingularNetwork(str(exc))
    x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        raise SingularNetwork("non-finite nodal solution")
    return x


def linear_scattering(net: ChainNetwork, omega: float) -> np.ndarray:
    """4x4 power-wave scattering matrix at omega (linearized junctions).

    Unitary to machine tolerance for a lossless chain; S[2, 0] is the
    Sigma transmission L -> R.
    """
    y = admittance_matrix(net, omega)
    e = port_basis(net)
    z = port_impedances(net, omega)
    # Norton drive of unit incident wave on port p: I_N = 2 / sqrt(Z_p)
    b = e * (2.0 / np.sqrt(z))[None, :]
    v_nodes = _solve(y, b.astype(complex))
    v_ports = e.T @ v_nodes          # mode voltage at port q for drive p
    s = v_ports / np.sqrt(z)[:, None] - np.eye(4)
    return s


def drive_solution(net: ChainNetwork, port: int, omega: float,
                   amplitude: complex = 1.0) -> np.ndarray:
    """Node voltages for an incident wave of power-wave amplitude
    ``amplitude`` on the given port."""
    y = admittance_matrix(net, omega)
    e = port_basis(net)
    z = port_impedances(net, omega)
    b = e[:, port].astype(complex) * (2.0 * amplitude / math.sqrt(z[port]))
    return _solve(y, b)


def wave_amplitude_profile(net: ChainNetwork, port: int, omega: float):
    """Per-cell forward/backward traveling amplitudes of each mode.

    Decomposes the node solution of a unit drive into +/- traveling
    components using adjacent columns and the dispersion wavevector.
    Returns {mode: (forward, backward)} complex arrays of length n_cells.
    """
    v = drive_solution(net, port, omega)
    n_col = net.n_cells + 1
    va, vb = v[:n_col], v[n_col:]
    out = {}
    for mode in Mode:
        vm = _S2 * (va + vb) if mode is Mode.Sigma else _S2 * (vb - va)
        k = wavevector(mode, omega, net.cell)
        if abs(math.sin(k)) < 1e-3:
            raise DecompositionIllConditioned(
                f"{mode.name}: |sin(ka)| = {abs(math.sin(k)):.2e} too small")
        n = np.arange(net.n_cells)
        det = 2j * math.sin(k)
        fwd = (vm[:-1] * np.exp(1j * k * (n + 1))
               - vm[1:] * np.exp(1j * k * n)) / det
        bwd = (vm[1:] * np.exp(-1j * k * n)
               - vm[:-1] * np.exp(-1j * k * (n + 1))) / det
        out[mode] = (fwd * np.exp(-1j * k * n), bwd * np.exp(1j * k * n))
    return out
