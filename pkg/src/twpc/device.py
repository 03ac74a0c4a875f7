"""Device description: unit cell, chain, defects, disorder, derived constants.

A device is a ladder of identical cells, each carrying two Josephson
junctions (inductance L_J shunted by C_J, one per electrode), a capacitance
C_g from each electrode to ground and a capacitance C_i between the two
electrodes.  The two propagation eigenmodes are the common (Sigma) and
differential (Delta) combinations of the electrode fluxes; C_i loads only
the differential mode, which makes it slow and low-impedance.

Cell length ``a`` is the dimensionless unit (1 cell): velocities are in
cell/s and wavevectors in rad/cell throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError

# Reduced flux quantum phi0 = hbar / 2e  (Wb/rad); Phi0 = 2*pi*phi0.
PHI0_BAR = 3.2910597841613324e-16
FLUX_QUANTUM = 2 * math.pi * PHI0_BAR

A_CELL = 1.0  # cell length, fixed

DEFECT_KINDS = ("open_junction",)


@dataclass(frozen=True)
class CellParams:
    """Electrical parameters of one unit cell (SI units).

    Exactly one of ``c_j`` / ``plasma_omega`` is required at construction;
    the other is derived through omega_J = 1/sqrt(L_J C_J).
    """

    l_j: float            # junction inductance (H)
    c_g: float            # ground capacitance per electrode (F)
    c_i: float            # inter-electrode capacitance (F)
    c_j: float = None     # junction capacitance (F)
    plasma_omega: float = None  # junction plasma frequency (rad/s)

    def __post_init__(self):
        if (self.c_j is None) == (self.plasma_omega is None):
            raise ConfigError(
                [("cell.c_j", "give exactly one of c_j and plasma_omega")])
        given = [("cell.l_j", self.l_j), ("cell.c_g", self.c_g),
                 ("cell.c_i", self.c_i)]
        given.append(("cell.c_j", self.c_j) if self.plasma_omega is None
                     else ("cell.plasma_omega", self.plasma_omega))
        bad = [(p, "must be strictly positive") for p, v in given
               if not v > 0]
        if bad:
            raise ConfigError(bad)
        if self.c_j is None:
            object.__setattr__(
                self, "c_j", 1.0 / (self.l_j * self.plasma_omega ** 2))
        else:
            object.__setattr__(
                self, "plasma_omega", 1.0 / math.sqrt(self.l_j * self.c_j))
        errs = []
        for name in ("l_j", "c_g", "c_i", "c_j"):
            if not getattr(self, name) > 0:
                errs.append((f"cell.{name}", "must be strictly positive"))
        if not errs and not self.c_j < self.c_g:
            errs.append(("cell.c_j", "must be below c_g (physical regime)"))
        if errs:
            raise ConfigError(errs)

    @property
    def mu(self) -> float:
        """Mode asymmetry mu = 1 + 2 C_i / C_g = (v_Sigma/v_Delta)^2."""
        return 1.0 + 2.0 * self.c_i / self.c_g

    @property
    def omega_g(self) -> float:
        return 1.0 / math.sqrt(self.l_j * self.c_g)

    @property
    def e_j(self) -> float:
        """Josephson energy phi0^2 / L_J (J)."""
        return PHI0_BAR ** 2 / self.l_j


@dataclass(frozen=True)
class DerivedConstants:
    """Secondary constants of a cell; see :func:`derive_constants`."""

    v_sigma0: float       # cell/s
    v_delta0: float       # cell/s
    z_sigma: float        # Ohm
    z_delta: float        # Ohm
    omega_sigma_co: float  # rad/s
    omega_delta_co: float  # rad/s
    omega_g: float         # rad/s
    omega_j: float         # rad/s
    mu: float


def derive_constants(cell: CellParams) -> DerivedConstants:
    """Velocities, impedances and cutoffs of the two modes.

    v_Sigma = a/sqrt(L_J C_g),      v_Delta = a/sqrt(L_J (C_g + 2 C_i)),
    Z_Sigma = sqrt(L_J/C_g),        Z_Delta = sqrt(L_J/(C_g + 2 C_i)),
    omega_co = 2/sqrt(L_J (C + 4 C_J)) with C the mode's shunt capacitance.
    """
    lj, cg, ci, cj = cell.l_j, cell.c_g, cell.c_i, cell.c_j
    cd = cg + 2.0 * ci
    return DerivedConstants(
        v_sigma0=A_CELL / math.sqrt(lj * cg),
        v_delta0=A_CELL / math.sqrt(lj * cd),
        z_sigma=math.sqrt(lj / cg),
        z_delta=math.sqrt(lj / cd),
        omega_sigma_co=2.0 / math.sqrt(lj * (cg + 4.0 * cj)),
        omega_delta_co=2.0 / math.sqrt(lj * (cd + 4.0 * cj)),
        omega_g=cell.omega_g,
        omega_j=cell.plasma_omega,
        mu=cell.mu,
    )


@dataclass(frozen=True)
class LineSpec:
    """Full chain description: cell, length, defects, disorder, seed."""

    cell: CellParams
    n_cells: int = 400
    defects: tuple = ()            # of (cell_index, kind)
    disorder_halfwidth: float = 0.0
    seed: int = 0

    def __post_init__(self):
        # normalize defects to a tuple of (int, str)
        norm = []
        for d in self.defects:
            if isinstance(d, dict):
                norm.append((int(d["cell"]), d.get("kind", "open_junction")))
            elif isinstance(d, (int, np.integer)):
                norm.append((int(d), "open_junction"))
            else:
                idx, kind = d
                norm.append((int(idx), str(kind)))
        object.__setattr__(self, "defects", tuple(norm))


def validate(spec: LineSpec) -> LineSpec:
    """Check all LineSpec invariants; raise ConfigError listing every
    violation with its field path, or return the spec unchanged."""
    errs = []
    if spec.n_cells < 1:
        errs.append(("n_cells", "must be >= 1"))
    for i, (idx, kind) in enumerate(spec.defects):
        if not 0 <= idx < spec.n_cells:
            errs.append((f"defects[{i}].cell",
                         f"index {idx} out of range [0, {spec.n_cells})"))
        if kind not in DEFECT_KINDS:
            errs.append((f"defects[{i}].kind", f"unknown kind {kind!r}"))
    if not 0.0 <= spec.disorder_halfwidth < 0.5:
        errs.append(("disorder_halfwidth", "must lie in [0, 0.5)"))
    if errs:
        raise ConfigError(errs)
    return spec


def sample_disorder(spec: LineSpec) -> np.ndarray:
    """Per-junction inductance table, shape (n_cells, 2).

    Column 0/1 are the two electrodes.  Junction inductances are drawn
    independently and uniformly from [L_J(1-w), L_J(1+w)]; deterministic
    for a given seed.  Open-junction defects are flagged with +inf on
    electrode 0 of the defect cell.
    """
    validate(spec)
    lj, w = spec.cell.l_j, spec.disorder_halfwidth
    if w > 0:
        rng = np.random.default_rng(spec.seed)
        table = lj * rng.uniform(1.0 - w, 1.0 + w, size=(spec.n_cells, 2))
    else:
        table = np.full((spec.n_cells, 2), lj)
    for idx, kind in spec.defects:
        if kind == "open_junction":
            table[idx, 0] = np.inf
    return table


# ---------------------------------------------------------------------------
# JSON serialization (the interchange schema used by the CLI)

def spec_to_json(spec: LineSpec) -> dict:
    return {
        "l_j_nH": spec.cell.l_j * 1e9,
        "c_g_pF": spec.cell.c_g * 1e12,
        "c_i_pF": spec.cell.c_i * 1e12,
        "plasma_ghz": spec.cell.plasma_omega / (2e9 * math.pi),
        "n_cells": spec.n_cells,
        "defects": [{"cell": i, "kind": k} for i, k in spec.defects],
        "disorder_halfwidth": spec.disorder_halfwidth,
        "seed": spec.seed,
    }


def spec_from_json(doc: dict) -> LineSpec:
    try:
        kwargs = dict(
            l_j=doc["l_j_nH"] * 1e-9,
            c_g=doc["c_g_pF"] * 1e-12,
            c_i=doc["c_i_pF"] * 1e-12,
        )
    except KeyError as e:
        raise ConfigError([(str(e.args[0]), "missing required key")])
    if ("plasma_ghz" in doc) == ("c_j_fF" in doc):
        raise ConfigError(
            [("plasma_ghz", "give exactly one of plasma_ghz and c_j_fF")])
    if "plasma_ghz" in doc:
        kwargs["plasma_omega"] = doc["plasma_ghz"] * 2e9 * math.pi
    else:
        kwargs["c_j"] = doc["c_j_fF"] * 1e-15
    spec = LineSpec(
        cell=CellParams(**kwargs),
        n_cells=int(doc.get("n_cells", 400)),
        defects=tuple(doc.get("defects", ())),
        disorder_halfwidth=float(doc.get("disorder_halfwidth", 0.0)),
        seed=int(doc.get("seed", 0)),
    )
    return validate(spec)


def load_spec(path) -> LineSpec:
    with open(path) as f:
        return spec_from_json(json.load(f))


# ---------------------------------------------------------------------------
# Presets

#: Plasma frequency used when a config gives none (GHz).  Two values are
#: quoted for the device; the fitted-table one is adopted because the
#: quantitative predictions derive from it.
DEFAULT_PLASMA_GHZ = 32.9

# Fitted operating point, reconstructed from the quoted characteristic
# velocities (93.6 and 30.15 cell/ns), the Sigma impedance (85 Ohm) and the
# plasma frequency:
#   L_J = Z_Sigma/v_Sigma,  C_g = 1/(Z_Sigma v_Sigma),
#   C_g + 2 C_i = 1/(L_J v_Delta^2),  C_J = 1/(L_J omega_J^2).
_V_SIGMA_FIT = 93.6e9
_V_DELTA_FIT = 30.15e9
_Z_SIGMA_FIT = 85.0


def fitted_cell() -> CellParams:
    """Cell parameters of the fitted (measured) operating point."""
    lj = _Z_SIGMA_FIT / _V_SIGMA_FIT
    cg = 1.0 / (_Z_SIGMA_FIT * _V_SIGMA_FIT)
    cd = 1.0 / (lj * _V_DELTA_FIT ** 2)
    return CellParams(
        l_j=lj, c_g=cg, c_i=0.5 * (cd - cg),
        plasma_omega=2e9 * math.pi * DEFAULT_PLASMA_GHZ)


def design_cell() -> CellParams:
    """Nominal design-value cell parameters."""
    return CellParams(
        l_j=0.94e-9, c_g=0.13e-12, c_i=0.57e-12,
        plasma_omega=2e9 * math.pi * DEFAULT_PLASMA_GHZ)


def fitted_line(n_cells: int = 400, defects=(), disorder_halfwidth: float = 0.0,
                seed: int = 0) -> LineSpec:
    return validate(LineSpec(fitted_cell(), n_cells, tuple(defects),
                             disorder_halfwidth, seed))
