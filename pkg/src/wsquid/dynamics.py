"""Conditioned (no-jump) evolution, jump unraveling, and W-state metrics."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import NormGrowth, SampleMismatch, StepResolutionError, ZeroNorm
from .model import GaussianPulse, ModelParams, coupling_parts, decay_rates, w_target

NORM_GROWTH_TOL = 1e-9
MAX_JUMP_PROB = 0.05
ZERO_NORM = 1e-15


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings (times in 1/g).

    ``sample_stride`` is the number of steps between stored samples; the
    final step is always stored.
    """

    dt: float = 1e-3
    method: str = "rk4"
    norm_check_interval: int = 1
    sample_stride: int = 100

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.method != "rk4":
            raise ValueError(f"unknown integrator {self.method!r}; only 'rk4' is provided")
        if self.norm_check_interval < 1 or self.sample_stride < 1:
            raise ValueError("norm_check_interval and sample_stride must be >= 1")

    def halved(self):
        return IntegratorConfig(self.dt / 2, self.method, self.norm_check_interval, 2 * self.sample_stride)


def metrics(psi, target):
    """Success probability, conditioned fidelity and populations of a state."""
    psi = np.asarray(psi)
    pops = np.abs(psi) ** 2
    ps = float(pops.sum())
    if ps < ZERO_NORM:
        raise ZeroNorm(f"state norm^2 {ps:.3e} is zero")
    fid = float(np.abs(np.vdot(target, psi)) ** 2 / ps)
    return ps, fid, pops


@dataclass(frozen=True)
class TrajectoryRecord:
    times: np.ndarray
    amplitudes: np.ndarray
    target: np.ndarray
    labels: tuple

    def __post_init__(self):
        if self.amplitudes.shape != (len(self.times), len(self.target)):
            raise ValueError("amplitudes must be (samples, dim)")
        if len(self.labels) != len(self.target):
            raise ValueError("one label per basis state")

    @cached_property
    def populations(self):
        return np.abs(self.amplitudes) ** 2

    @cached_property
    def success_probability(self):
        return self.populations.sum(axis=1)

    @cached_property
    def fidelity(self):
        ps = self.success_probability
        overlap = np.abs(self.amplitudes @ self.target.conj()) ** 2
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(ps < ZERO_NORM, np.nan, overlap / ps)

    @property
    def final_state(self):
        return self.amplitudes[-1]

    @property
    def final_success(self):
        return float(self.success_probability[-1])

    @property
    def final_fidelity(self):
        return float(self.fidelity[-1])

    def at(self, t):
        """Index of the sample closest to time t."""
        return int(np.argmin(np.abs(self.times - t)))

    def to_csv(self, path):
        write_csv(self, path)


def write_csv(record: TrajectoryRecord, path):
    """Columns t, P_s, F, then pop_<label> per basis state, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "P_s", "F"] + [f"pop_{lab}" for lab in record.labels])
        for i, t in enumerate(record.times):
            row = [t, record.success_probability[i], record.fidelity[i], *record.populations[i]]
            w.writerow([f"{v:.17g}" for v in row])


def read_csv(path):
    """Load a trajectory CSV back into a dict of column arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], np.array(rows[1:], dtype=float)
    return {name: data[:, k] for k, name in enumerate(header)}


def _coo(mat):
    r, c = np.nonzero(mat)
    return r.astype(np.int64), c.astype(np.int64), np.ascontiguousarray(mat[r, c], dtype=np.complex128)


def check_resolution(pulse, dt):
    if isinstance(pulse, GaussianPulse) and dt > pulse.width / 100:
        raise StepResolutionError(f"dt={dt:g} exceeds width/100={pulse.width / 100:g} for the Gaussian pulse")


@dataclass
class _Run:
    times: np.ndarray
    states: np.ndarray
    jump_prob: np.ndarray
    dt: float


def propagate(static, drive, pulse, psi0, t_span, cfg: IntegratorConfig, renormalize=False, rates=None):
    """Integrate d psi/dt = -i (static + envelope(t) drive) psi with fixed-step RK4.

    The step is shrunk to span / ceil(span / cfg.dt) so the run lands exactly
    on t_end. Without ``renormalize`` a norm increase above 1e-9 between
    checks raises NormGrowth.
    """
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise ValueError("t_end must exceed t_start")
    if t0 < 0:
        raise ValueError("times must be >= 0")
    check_resolution(pulse, cfg.dt)
    nsteps = max(1, math.ceil((t1 - t0) / cfg.dt - 1e-9))
    dt = (t1 - t0) / nsteps
    half_grid = t0 + 0.5 * dt * np.arange(2 * nsteps + 1)
    omega = np.ascontiguousarray(pulse(half_grid), dtype=float)
    if rates is None:
        rates = np.zeros(len(psi0))
    ar, ac, av = _coo(np.asarray(static, dtype=complex))
    br, bc, bv = _coo(np.asarray(drive, dtype=complex))
    states, steps, jump_prob, bad = _kernels.rk4(
        ar, ac, av, br, bc, bv, omega,
        np.ascontiguousarray(psi0, dtype=np.complex128),
        dt, nsteps, cfg.sample_stride, cfg.norm_check_interval,
        NORM_GROWTH_TOL, renormalize, np.ascontiguousarray(rates, dtype=float),
    )
    if bad >= 0:
        raise NormGrowth(f"norm^2 grew by more than {NORM_GROWTH_TOL:g} at t={t0 + (bad + 1) * dt:.6g}")
    return _Run(t0 + steps * dt, states, jump_prob, dt)


def _check_normalized(psi0, N):
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (2 * N + 2,):
        raise ValueError(f"initial state must have length {2 * N + 2}")
    if abs(np.vdot(psi0, psi0).real - 1) > 1e-9:
        raise ValueError("initial state must be normalized")
    return psi0


def evolve_conditional(params: ModelParams, pulse, psi0, t_span, cfg: IntegratorConfig = IntegratorConfig(), target=None):
    """No-jump trajectory under H_eff, kept unnormalized.

    The squared norm of the result is the probability that no photon left
    the cavity and no qubit decayed.
    """
    psi0 = _check_normalized(psi0, params.N)
    if target is None:
        target = w_target(params.N)
    cav, drive = coupling_parts(params)
    static = cav - 0.5j * np.diag(decay_rates(params))
    run = propagate(static, drive, pulse, psi0, t_span, cfg)
    return TrajectoryRecord(run.times, run.states, np.asarray(target, dtype=complex), params.basis.labels)


@dataclass(frozen=True)
class MCStats:
    n_trajectories: int
    n_no_jump: int
    seed: int
    jump_times: np.ndarray = field(repr=False)
    histogram: tuple = field(repr=False)

    @property
    def success_probability(self):
        return self.n_no_jump / self.n_trajectories

    @property
    def standard_error(self):
        p = self.success_probability
        return math.sqrt(p * (1 - p) / self.n_trajectories)


def monte_carlo(params: ModelParams, pulse, psi0, t_span, cfg: IntegratorConfig = IntegratorConfig(), n_traj=1000, seed=0, bins=50):
    """First-order jump unraveling of the dissipative dynamics.

    Before each step a trajectory jumps with probability
    dt <psi|kappa P_cav + gamma sum P_e|psi> (psi normalized); otherwise it
    evolves under H_eff and is renormalized. Every jump lands in the
    absorbing vacuum, which H_eff leaves untouched, so all trajectories share
    one no-jump branch and differ only in their random draws. Trajectory i
    draws from its own generator seeded with seed + i.
    """
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    psi0 = _check_normalized(psi0, params.N)
    cav, drive = coupling_parts(params)
    rates = decay_rates(params)
    static = cav - 0.5j * np.diag(rates)
    run = propagate(static, drive, pulse, psi0, t_span, cfg, renormalize=True, rates=rates)
    dp = run.jump_prob
    if dp.max() > MAX_JUMP_PROB:
        raise StepResolutionError(f"jump probability per step reaches {dp.max():.3g} > {MAX_JUMP_PROB}")
    t0 = float(t_span[0])
    jump_times = []
    for i in range(n_traj):
        rng = np.random.default_rng(seed + i)
        hits = np.flatnonzero(rng.random(dp.size) < dp)
        if hits.size:
            jump_times.append(t0 + (hits[0] + 1) * run.dt)
    jump_times = np.array(jump_times)
    hist = np.histogram(jump_times, bins=bins, range=(t0, float(t_span[1])))
    return MCStats(n_traj, n_traj - jump_times.size, seed, jump_times, hist)


def align(a: TrajectoryRecord, b: TrajectoryRecord, atol=1e-12):
    """Raise SampleMismatch unless both records share sample times."""
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, rtol=0, atol=atol):
        raise SampleMismatch("records have different sample times")
