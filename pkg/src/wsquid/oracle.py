"""Brute-force simulation in the full tensor-product space.

N three-level qubits (levels ordered 0, 1, e) times a cavity truncated at
n_max photons, qubit 1 being the most significant factor and the cavity
the least. Used to check that restricting to the single-excitation block
loses nothing.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product

import numpy as np

from .dynamics import IntegratorConfig, TrajectoryRecord, align, propagate
from .errors import DimensionGuard, SampleMismatch
from .model import Basis, ModelParams

MAX_QUBITS = 4
MAX_DIM = 2048
LEVELS = ("0", "1", "e")


@dataclass(frozen=True)
class FullSpaceConfig:
    params: ModelParams
    pulse: object
    n_max: int = 2

    def __post_init__(self):
        if self.params.N > MAX_QUBITS:
            raise DimensionGuard(f"full-space oracle supports N <= {MAX_QUBITS}")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.dim > MAX_DIM:
            raise DimensionGuard(f"dimension {self.dim} exceeds {MAX_DIM}")

    @property
    def N(self):
        return self.params.N

    @property
    def dim(self):
        return 3**self.params.N * (self.n_max + 1)

    @property
    def labels(self):
        return tuple(
            "".join(q) + f"|{n}" for *q, n in product(*([LEVELS] * self.N), range(self.n_max + 1))
        )


def _kron(ops):
    return reduce(np.kron, ops)


def _site_op(op, site, N, n_max):
    """Embed a 3x3 qubit operator on ``site`` (0-based)."""
    ops = [np.eye(3)] * N + [np.eye(n_max + 1)]
    ops[site] = op
    return _kron(ops)


def _cavity_op(op, N):
    return _kron([np.eye(3)] * N + [op])


def full_operators(cfg: FullSpaceConfig):
    """Return (cavity part, drive part, decay-rate diagonal, excitation number)."""
    N, nm = cfg.N, cfg.n_max
    a = np.diag(np.sqrt(np.arange(1, nm + 1)), 1)
    A = _cavity_op(a, N)
    num = _cavity_op(a.T @ a, N)
    s0e = np.zeros((3, 3))
    s0e[0, 2] = 1.0
    s1e = np.zeros((3, 3))
    s1e[1, 2] = 1.0
    pe = np.diag([0.0, 0.0, 1.0])
    p1 = np.diag([0.0, 1.0, 0.0])
    cav = np.zeros((cfg.dim, cfg.dim))
    drive = np.zeros_like(cav)
    rates = cfg.params.kappa * np.diag(num).copy()
    nexc = np.diag(num).copy()
    for j, gj in enumerate(cfg.params.couplings):
        S0e = _site_op(s0e, j, N, nm)
        S1e = _site_op(s1e, j, N, nm)
        term = A.T @ S0e
        cav += gj * (term + term.T)
        drive += gj / cfg.params.K * (S1e + S1e.T)
        Pe = np.diag(_site_op(pe, j, N, nm))
        rates += cfg.params.gamma * Pe
        nexc += Pe + np.diag(_site_op(p1, j, N, nm))
    return cav, drive, rates, nexc


def full_space_hamiltonian(cfg: FullSpaceConfig, t):
    cav, drive, _, _ = full_operators(cfg)
    return cav + float(cfg.pulse(t)) * drive


def full_space_effective(cfg: FullSpaceConfig, t):
    _, _, rates, _ = full_operators(cfg)
    return full_space_hamiltonian(cfg, t) - 0.5j * np.diag(rates)


def reduced_embedding(N, n_max):
    """Full-space index of each reduced basis state, in reduced order."""
    def index(levels, n):
        k = 0
        for lv in levels:
            k = 3 * k + lv
        return k * (n_max + 1) + n

    zeros = [0] * N
    idx = [index(zeros, 1)]
    for lv in (1, 2):
        for j in range(N):
            q = list(zeros)
            q[j] = lv
            idx.append(index(q, 0))
    idx.append(index(zeros, 0))
    return np.array(idx)


def embed(psi_reduced, n_max):
    """Lift a reduced-basis vector (or stack of them) into the full space."""
    psi_reduced = np.asarray(psi_reduced)
    N = (psi_reduced.shape[-1] - 2) // 2
    emb = reduced_embedding(N, n_max)
    out = np.zeros(psi_reduced.shape[:-1] + (3**N * (n_max + 1),), dtype=complex)
    out[..., emb] = psi_reduced
    return out


def full_space_evolve(cfg: FullSpaceConfig, psi0, t_span, integrator: IntegratorConfig = IntegratorConfig(), target=None):
    """Same RK4 no-jump evolution as the reduced model, on the full space."""
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (cfg.dim,):
        raise ValueError(f"initial state must have length {cfg.dim}")
    if target is None:
        w = np.zeros(Basis(cfg.N).dim, dtype=complex)
        w[1 : cfg.N + 1] = 1 / np.sqrt(cfg.N)
        target = embed(w, cfg.n_max)
    cav, drive, rates, _ = full_operators(cfg)
    run = propagate(cav - 0.5j * np.diag(rates), drive, cfg.pulse, psi0, t_span, integrator)
    return TrajectoryRecord(run.times, run.states, np.asarray(target, dtype=complex), cfg.labels)


def sector_leakage(record: TrajectoryRecord, cfg: FullSpaceConfig, excitations=1):
    """Largest amplitude found outside the given excitation-number sector."""
    _, _, _, nexc = full_operators(cfg)
    outside = np.abs(nexc - excitations) > 0.5
    return float(np.max(np.abs(record.amplitudes[:, outside]), initial=0.0))


@dataclass(frozen=True)
class SubspaceDeviation:
    success_probability: float
    fidelity: float
    amplitude: float

    @property
    def max(self):
        return max(self.success_probability, self.fidelity, self.amplitude)

    def passes(self, tol=1e-6):
        return self.max <= tol


def compare_subspace(full: TrajectoryRecord, reduced: TrajectoryRecord) -> SubspaceDeviation:
    """Worst-case differences between a full-space and a reduced record.

    Amplitudes are compared after lifting the reduced record into the full
    space, so any weight the full run has outside the single-excitation
    block counts as deviation.
    """
    align(full, reduced)
    d = reduced.amplitudes.shape[1]
    N = (d - 2) // 2
    dim_full = full.amplitudes.shape[1]
    levels, rem = divmod(dim_full, 3**N)
    if rem or d != 2 * N + 2 or levels < 2:
        raise SampleMismatch("records do not describe the same qubit number")
    lifted = embed(reduced.amplitudes, levels - 1)
    return SubspaceDeviation(
        float(np.max(np.abs(full.success_probability - reduced.success_probability))),
        float(np.max(np.abs(full.fidelity - reduced.fidelity))),
        float(np.max(np.abs(full.amplitudes - lifted))),
    )
