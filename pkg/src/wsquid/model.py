"""Single-excitation model of N Lambda-type qubits sharing one cavity mode.

Basis ordering for N qubits (dimension 2N + 2):

    0          |0...0>  x |1 photon>
    1..N       |1>_j    x |0 photons>
    N+1..2N    |e>_j    x |0 photons>
    2N+1       |0...0>  x |0 photons>   (absorbing: reached only by a decay)

Energies and rates are in units of the reference coupling g, times in 1/g.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DriveZero

# Experimental values quoted for the scheme (SI, s^-1).
REF_G = 1.8e8
REF_GAMMA = 4e5
REF_GAMMA_STRONG = 4e7
REF_KAPPA = 1.32e6


@dataclass(frozen=True)
class Basis:
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("need at least one qubit")

    @property
    def dim(self):
        return 2 * self.N + 2

    cavity = 0

    def one(self, j):
        """Index of |1>_j (qubits numbered from 1)."""
        return j

    def excited(self, j):
        return self.N + j

    @property
    def absorbed(self):
        return 2 * self.N + 1

    @property
    def one_slice(self):
        return slice(1, self.N + 1)

    @property
    def excited_slice(self):
        return slice(self.N + 1, 2 * self.N + 1)

    @property
    def labels(self):
        return (
            ("cavity",)
            + tuple(f"1_{j}" for j in range(1, self.N + 1))
            + tuple(f"e_{j}" for j in range(1, self.N + 1))
            + ("absorbed",)
        )

    def excitation_number(self):
        n = np.ones(self.dim)
        n[self.absorbed] = 0.0
        return np.diag(n)


@dataclass(frozen=True)
class ModelParams:
    """Couplings g_j and decay rates, all in units of the reference g.

    The drive on qubit j is Omega_j(t) = g_j * envelope(t) / K, i.e. the
    collinear drive that keeps g_j / Omega_j the same for every qubit.
    """

    N: int
    couplings: tuple = None
    gamma: float = 0.0
    kappa: float = 0.0
    K: float = 1.0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("need at least one qubit")
        if self.couplings is None:
            object.__setattr__(self, "couplings", (1.0,) * self.N)
        else:
            object.__setattr__(self, "couplings", tuple(float(c) for c in self.couplings))
        if len(self.couplings) != self.N:
            raise ValueError(f"expected {self.N} couplings, got {len(self.couplings)}")
        # g_j = 0 is allowed so that bare decay can be simulated
        if any(c < 0 for c in self.couplings):
            raise ValueError("couplings must be non-negative")
        if self.gamma < 0 or self.kappa < 0:
            raise ValueError("decay rates must be non-negative")
        if not self.K > 0:
            raise ValueError("K must be positive")

    @classmethod
    def experimental(cls, N, gamma=REF_GAMMA, kappa=REF_KAPPA, g=REF_G):
        """Equal couplings with the SI decay rates scaled by g."""
        return cls(N, gamma=gamma / g, kappa=kappa / g)

    @property
    def basis(self):
        return Basis(self.N)

    def with_(self, **changes):
        kw = dict(N=self.N, couplings=self.couplings, gamma=self.gamma, kappa=self.kappa, K=self.K)
        kw.update(changes)
        if "N" in changes and "couplings" not in changes:
            kw["couplings"] = None
        return ModelParams(**kw)


@dataclass(frozen=True)
class GaussianPulse:
    """amplitude * exp(-(t - center)^2 / (2 width^2))."""

    amplitude: float
    width: float
    center: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")
        if not self.width > 0:
            raise ValueError("width must be positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.exp(-((t - self.center) ** 2) / (2 * self.width**2))

    @property
    def peak(self):
        return self.amplitude


@dataclass(frozen=True)
class PiecewiseLinearPulse:
    """Linear interpolation between (t, value) knots, held constant outside them."""

    knots: tuple = field(default=((0.0, 0.0),))

    def __post_init__(self):
        knots = tuple((float(t), float(v)) for t, v in self.knots)
        if not knots:
            raise ValueError("need at least one knot")
        ts = [k[0] for k in knots]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("knot times must be strictly increasing")
        if any(v < 0 for _, v in knots):
            raise ValueError("knot values must be non-negative")
        object.__setattr__(self, "knots", knots)

    def __call__(self, t):
        ts, vs = zip(*self.knots)
        return np.interp(np.asarray(t, dtype=float), ts, vs)

    @property
    def peak(self):
        return max(v for _, v in self.knots)


def constant_pulse(value):
    return PiecewiseLinearPulse(((0.0, value),))


def reference_pulse():
    """Falling half of 40 g exp(-t^2 / 2 tau^2) with tau = 4/g, peak at t = 0."""
    return GaussianPulse(40.0, 4.0, 0.0)


def _envelope(pulse, t):
    if t < 0:
        raise ValueError("t must be >= 0")
    return float(pulse(t))


def coupling_parts(params: ModelParams):
    """Split H_I(t) = cavity_part + envelope(t) * drive_part (both real symmetric)."""
    b = params.basis
    cav = np.zeros((b.dim, b.dim))
    drive = np.zeros((b.dim, b.dim))
    for j, gj in enumerate(params.couplings, start=1):
        cav[b.cavity, b.excited(j)] = cav[b.excited(j), b.cavity] = gj
        drive[b.one(j), b.excited(j)] = drive[b.excited(j), b.one(j)] = gj / params.K
    return cav, drive


def decay_rates(params: ModelParams):
    """Diagonal of the jump-rate operator kappa P_cav + gamma sum_j P_e,j."""
    b = params.basis
    r = np.zeros(b.dim)
    r[b.cavity] = params.kappa
    r[b.excited_slice] = params.gamma
    return r


def hamiltonian(params: ModelParams, pulse, t):
    """Interaction Hamiltonian H_I(t) in the single-excitation basis."""
    cav, drive = coupling_parts(params)
    return cav + _envelope(pulse, t) * drive


def effective_hamiltonian(params: ModelParams, pulse, t):
    """No-jump generator H_I(t) - (i/2)(kappa P_cav + gamma sum_j P_e,j)."""
    return hamiltonian(params, pulse, t) - 0.5j * np.diag(decay_rates(params))


def dark_state(params: ModelParams, pulse, t):
    """Normalized zero-energy eigenstate of H_I(t) that contains no |e> amplitude.

    Proportional to |0..0>|1> - sum_j (g_j / Omega_j) |1_j>|0>; with the
    collinear drive every ratio equals K / envelope(t). The photon amplitude
    is kept positive.
    """
    env = _envelope(pulse, t)
    if env == 0:
        raise DriveZero("drive envelope is zero; the dark state is the W state (see w_target)")
    b = params.basis
    psi = np.zeros(b.dim, dtype=complex)
    psi[b.cavity] = 1.0
    psi[b.one_slice] = -params.K / env
    return psi / np.linalg.norm(psi)


def w_target(N):
    """(1/sqrt N) sum_j |1_j> with the cavity empty."""
    b = Basis(N)
    psi = np.zeros(b.dim, dtype=complex)
    psi[b.one_slice] = 1.0 / np.sqrt(N)
    return psi


def cavity_photon_state(N):
    """All qubits in |0> and one photon in the cavity."""
    psi = np.zeros(Basis(N).dim, dtype=complex)
    psi[0] = 1.0
    return psi
