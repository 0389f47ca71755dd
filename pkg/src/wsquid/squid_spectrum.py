"""Level structure of a single rf-SQUID and its cavity/drive couplings.

The loop flux Hamiltonian

    H = Q^2 / 2C + (Phi - Phi_x)^2 / 2L - E_J cos(2 pi Phi / Phi_0)

is discretized on a uniform flux grid with second-order central
differences for the charge term (Q = -i hbar d/dPhi) and diagonalized as a
symmetric tridiagonal matrix. Internally the grid is scaled by the LC
oscillator length sqrt(hbar / (C omega_LC)) and energies by hbar omega_LC,
so the dimensionless operator reads -1/2 d^2/dx^2 + (x - x_b)^2 / 2 - e_J cos(k x).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy import constants
from scipy.linalg import eigh_tridiagonal

from .errors import GridTooNarrow, NotConverged

HBAR = constants.hbar
MU_0 = constants.mu_0
FLUX_QUANTUM = constants.h / (2 * constants.e)

EDGE_DECAY = 1e-8


@dataclass(frozen=True)
class SquidSpec:
    """Device parameters of one rf-SQUID, SI units.

    Give either ``josephson_energy`` or ``critical_current``; if both are
    given they must satisfy E_J = I_c Phi_0 / 2 pi to 1e-9 relative.
    """

    capacitance: float
    inductance: float
    bias_flux: float
    josephson_energy: float | None = None
    critical_current: float | None = None

    def __post_init__(self):
        if not self.capacitance > 0:
            raise ValueError("capacitance must be positive")
        if not self.inductance > 0:
            raise ValueError("inductance must be positive")
        ej, ic = self.josephson_energy, self.critical_current
        if ej is None and ic is None:
            raise ValueError("need josephson_energy or critical_current")
        if ej is not None and ic is not None:
            ref = ic * FLUX_QUANTUM / (2 * np.pi)
            if abs(ej - ref) > 1e-9 * max(abs(ej), abs(ref)):
                raise ValueError(
                    f"josephson_energy {ej!r} disagrees with critical_current (expects {ref!r})"
                )
        if ej is None:
            object.__setattr__(self, "josephson_energy", ic * FLUX_QUANTUM / (2 * np.pi))
        if self.critical_current is None:
            object.__setattr__(self, "critical_current", 2 * np.pi * ej / FLUX_QUANTUM)
        if self.josephson_energy < 0:
            raise ValueError("josephson_energy must be >= 0")

    @classmethod
    def from_beta(cls, capacitance, inductance, beta_l, bias_flux):
        """Build a spec from the screening parameter beta_L = 2 pi L I_c / Phi_0."""
        ic = beta_l * FLUX_QUANTUM / (2 * np.pi * inductance)
        return cls(capacitance, inductance, bias_flux, critical_current=ic)

    @property
    def plasma_frequency(self):
        """LC oscillator frequency 1/sqrt(LC) in rad/s."""
        return 1.0 / np.sqrt(self.inductance * self.capacitance)

    @property
    def oscillator_length(self):
        """Zero-point flux scale sqrt(hbar / (C omega_LC)) in weber."""
        return np.sqrt(HBAR / (self.capacitance * self.plasma_frequency))

    @property
    def beta_l(self):
        return 2 * np.pi * self.inductance * self.critical_current / FLUX_QUANTUM

    def potential(self, phi):
        phi = np.asarray(phi, dtype=float)
        return (phi - self.bias_flux) ** 2 / (2 * self.inductance) - self.josephson_energy * np.cos(
            2 * np.pi * phi / FLUX_QUANTUM
        )


@dataclass(frozen=True)
class FluxGrid:
    phi_min: float
    phi_max: float
    num_points: int = 4096

    def __post_init__(self):
        if self.num_points < 64:
            raise ValueError("num_points must be >= 64")
        if not self.phi_min < self.phi_max:
            raise ValueError("phi_min must be below phi_max")

    @property
    def points(self):
        return np.linspace(self.phi_min, self.phi_max, self.num_points)

    @property
    def spacing(self):
        return (self.phi_max - self.phi_min) / (self.num_points - 1)

    def refined(self):
        return FluxGrid(self.phi_min, self.phi_max, 2 * self.num_points)


def default_grid(spec: SquidSpec, num_points=4096, margin=14.0):
    """Grid centred on the bias flux, wide enough for the low-lying states.

    The classical equilibria satisfy |Phi - Phi_x| <= L I_c, so the half
    width is L I_c plus ``margin`` oscillator lengths.
    """
    half = spec.inductance * spec.critical_current + margin * spec.oscillator_length
    return FluxGrid(spec.bias_flux - half, spec.bias_flux + half, num_points)


@dataclass(frozen=True)
class CouplingGeometry:
    """Collapsed spatial overlaps of the cavity and microwave fields with the loop.

    ``cavity_overlap`` stands for the integral of the cavity mode field over
    the loop area per unit mode amplitude. Only its product with the
    prefactor sqrt(omega_c / 2 mu_0 hbar) is meaningful, so it acts as an
    effective coupling knob. ``drive_overlap_ratio`` is the microwave overlap
    relative to the cavity one; 1.0 means a collinear drive.
    """

    cavity_frequency: float
    cavity_overlap: float
    drive_overlap_ratio: float = 1.0


@dataclass(frozen=True)
class LevelStructure:
    energies: np.ndarray
    flux_matrix: np.ndarray
    working_levels: tuple = (0, 1, 2)
    grid: np.ndarray | None = field(default=None, repr=False)
    wavefunctions: np.ndarray | None = field(default=None, repr=False)

    @property
    def E0(self):
        return self.energies[self.working_levels[0]]

    @property
    def E1(self):
        return self.energies[self.working_levels[1]]

    @property
    def Ee(self):
        return self.energies[self.working_levels[2]]

    @property
    def flux_matrix_element_0e(self):
        i0, _, ie = self.working_levels
        return self.flux_matrix[i0, ie]

    @property
    def flux_matrix_element_1e(self):
        _, i1, ie = self.working_levels
        return self.flux_matrix[i1, ie]

    @property
    def transition_frequency_0e(self):
        return (self.Ee - self.E0) / HBAR


def _eigenpairs(spec: SquidSpec, grid: FluxGrid, num_levels):
    ell = spec.oscillator_length
    hw = HBAR * spec.plasma_frequency
    x = grid.points / ell
    dx = grid.spacing / ell
    v = spec.potential(grid.points) / hw
    diag = 1.0 / dx**2 + v
    off = np.full(grid.num_points - 1, -0.5 / dx**2)
    w, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, num_levels - 1))
    vecs = vecs / np.sqrt(dx)
    # global phase: largest-magnitude amplitude real positive
    peak = np.argmax(np.abs(vecs), axis=0)
    vecs = vecs * np.sign(vecs[peak, np.arange(num_levels)])
    return w * hw, vecs.T / np.sqrt(ell), x * ell


def solve_flux_levels(
    spec: SquidSpec,
    grid: FluxGrid | None = None,
    num_levels=3,
    working_levels=(0, 1, 2),
    rtol=1e-5,
    keep_wavefunctions=False,
) -> LevelStructure:
    """Lowest eigenpairs of the rf-SQUID Hamiltonian on a flux grid.

    Convergence is certified by re-solving on a grid with twice as many
    points: every requested energy must move by less than
    ``rtol * max(|E|, hbar omega_LC)``. The two solves differ by an O(h^2)
    discretization error, which is cancelled by Richardson extrapolation in
    the returned energies and flux matrix elements. Retained wavefunctions
    are those of the caller's grid.
    """
    if num_levels < 3:
        raise ValueError("num_levels must be >= 3")
    if max(working_levels) >= num_levels:
        raise ValueError("working_levels must index into the solved levels")
    if grid is None:
        grid = default_grid(spec)
    if not grid.phi_min < spec.bias_flux < grid.phi_max:
        raise ValueError("bias flux must lie inside the grid")

    energies, psi, phi = _eigenpairs(spec, grid, num_levels)
    peak = np.max(np.abs(psi), axis=1)
    edge = np.maximum(np.abs(psi[:, 0]), np.abs(psi[:, -1]))
    bad = np.nonzero(edge > EDGE_DECAY * peak)[0]
    if bad.size:
        raise GridTooNarrow(
            f"levels {bad.tolist()} reach relative amplitude {np.max(edge[bad] / peak[bad]):.2e} "
            "at the grid edge; widen the flux range"
        )

    fine, psi_fine, phi_fine = _eigenpairs(spec, grid.refined(), num_levels)
    # symmetric potentials leave the peak-sign convention ambiguous; match the coarse grid
    for k in range(num_levels):
        if np.dot(psi[k], np.interp(phi, phi_fine, psi_fine[k])) < 0:
            psi_fine[k] = -psi_fine[k]
    scale = np.maximum(np.abs(energies), HBAR * spec.plasma_frequency)
    shift = np.abs(fine - energies) / scale
    if np.any(shift > rtol):
        raise NotConverged(
            f"grid doubling moved level {int(np.argmax(shift))} by {shift.max():.2e} (rtol {rtol:.1e})"
        )

    flux = (psi * phi) @ psi.T * grid.spacing
    flux_fine = (psi_fine * phi_fine) @ psi_fine.T * grid.refined().spacing
    return LevelStructure(
        energies=(4 * fine - energies) / 3,
        flux_matrix=(4 * flux_fine - flux) / 3,
        working_levels=tuple(working_levels),
        grid=phi if keep_wavefunctions else None,
        wavefunctions=psi if keep_wavefunctions else None,
    )


def coupling_constants(levels: LevelStructure, geom: CouplingGeometry, spec: SquidSpec):
    """Cavity coupling g and drive Rabi scale, both in rad/s.

    ``omega_scale`` is the Rabi frequency per unit microwave amplitude, where
    the microwave field is the cavity mode profile times that amplitude and
    ``drive_overlap_ratio``. Signs follow the eigenvector phase convention.
    """
    L = spec.inductance
    g = np.sqrt(geom.cavity_frequency / (2 * MU_0 * HBAR)) * levels.flux_matrix_element_0e * geom.cavity_overlap / L
    omega_scale = levels.flux_matrix_element_1e * geom.drive_overlap_ratio * geom.cavity_overlap / (L * HBAR)
    return float(g), float(omega_scale)


def overlap_for_coupling(levels: LevelStructure, spec: SquidSpec, g_target, cavity_frequency=None, drive_overlap_ratio=1.0):
    """Geometry whose cavity overlap produces the requested coupling g."""
    wc = levels.transition_frequency_0e if cavity_frequency is None else cavity_frequency
    pref = np.sqrt(wc / (2 * MU_0 * HBAR)) * levels.flux_matrix_element_0e / spec.inductance
    if pref == 0:
        raise ValueError("forbidden 0-e transition: no overlap gives a finite coupling")
    return CouplingGeometry(wc, g_target / pref, drive_overlap_ratio)


def reference_lambda_spec():
    """Illustrative double-well device with a Lambda configuration.

    Not a claim about any fabricated device: C = 10 fF, L = 100 pH,
    beta_L = 1.2 and the bias slightly off half a flux quantum, so the two
    lowest states sit in opposite wells and the third level lies near the
    barrier top where it overlaps both.
    """
    return SquidSpec.from_beta(1e-14, 1e-10, 1.2, 0.502 * FLUX_QUANTUM)


def write_potential_csv(spec: SquidSpec, levels: LevelStructure, path):
    """Write flux grid, potential and retained wavefunctions as CSV."""
    if levels.wavefunctions is None:
        raise ValueError("solve with keep_wavefunctions=True to export wavefunctions")
    n = levels.wavefunctions.shape[0]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["phi", "potential"] + [f"psi_{k}" for k in range(n)])
        pot = spec.potential(levels.grid)
        for i, phi in enumerate(levels.grid):
            w.writerow([f"{phi:.17g}", f"{pot[i]:.17g}"] + [f"{levels.wavefunctions[k, i]:.17g}" for k in range(n)])
