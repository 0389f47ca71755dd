import numpy as np
import pytest

from wsquid.dynamics import (
    IntegratorConfig,
    MCStats,
    TrajectoryRecord,
    align,
    evolve_conditional,
    metrics,
    monte_carlo,
    propagate,
    read_csv,
)
from wsquid.errors import NormGrowth, SampleMismatch, StepResolutionError, ZeroNorm
from wsquid.model import (
    GaussianPulse,
    ModelParams,
    cavity_photon_state,
    coupling_parts,
    dark_state,
    reference_pulse,
    w_target,
)

# frozen from the converged dt = 1e-3 run; dt = 5e-4 agrees to ~2e-9
GOLDEN_2A_F = 0.99447152315241649
GOLDEN_2A_PS = 0.92955629795098293


@pytest.fixture(scope="module")
def run_a():
    return evolve_conditional(ModelParams.experimental(3), reference_pulse(), cavity_photon_state(3), (0.0, 50.0))


@pytest.fixture(scope="module")
def run_b():
    params = ModelParams.experimental(3, gamma=4e7)
    return evolve_conditional(params, reference_pulse(), cavity_photon_state(3), (0.0, 50.0))


def test_integrator_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(dt=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(method="euler")
    h = IntegratorConfig(dt=1e-3, sample_stride=7).halved()
    assert h.dt == 5e-4 and h.sample_stride == 14


def test_metrics_examples():
    w = w_target(3)
    ps, f, pops = metrics(w, w)
    assert ps == pytest.approx(1.0, rel=1e-15) and f == pytest.approx(1.0, rel=1e-15)
    np.testing.assert_array_equal(pops, np.abs(w) ** 2)
    ps, f, _ = metrics(0.5 * w, w)
    assert ps == pytest.approx(0.25, rel=1e-15) and f == pytest.approx(1.0, rel=1e-15)


def test_metrics_zero_norm():
    with pytest.raises(ZeroNorm):
        metrics(np.zeros(8), w_target(3))


def test_fig2a_final_metrics(run_a):
    i = run_a.at(25.0)
    assert run_a.times[i] == 25.0
    assert run_a.fidelity[i] == pytest.approx(0.9946, abs=1e-3)
    assert run_a.fidelity[i] == pytest.approx(GOLDEN_2A_F, abs=1e-10)
    assert run_a.success_probability[i] == pytest.approx(GOLDEN_2A_PS, abs=1e-10)
    _, f, _ = metrics(run_a.amplitudes[i], w_target(3))
    assert f == pytest.approx(0.9946, abs=1e-3)


def test_fig2b_higher_fidelity_lower_success(run_a, run_b):
    i = run_b.at(25.0)
    assert run_b.fidelity[i] == pytest.approx(0.9994, abs=1e-3)
    assert run_b.success_probability[i] < run_a.success_probability[i]
    assert run_b.fidelity[i] > run_a.fidelity[i]


def test_record_invariants(run_a, run_b):
    for rec in (run_a, run_b):
        assert np.all(np.diff(rec.success_probability) <= 1e-9)
        assert np.all(rec.fidelity >= 0) and np.all(rec.fidelity <= 1 + 1e-9)
        np.testing.assert_allclose(rec.populations.sum(axis=1), rec.success_probability, atol=1e-9)


def test_unitary_adiabatic_dark_following():
    params = ModelParams(3)
    pulse = GaussianPulse(40.0, 100.0)
    rec = evolve_conditional(params, pulse, dark_state(params, pulse, 0.0), (0.0, 50.0), IntegratorConfig(dt=2e-3, sample_stride=10))
    assert np.max(np.abs(rec.success_probability - 1)) <= 1e-8
    assert np.max(rec.populations[:, params.basis.excited_slice].sum(axis=1)) <= 1e-4


def test_norm_conserved_without_decay():
    rec = evolve_conditional(ModelParams(4), reference_pulse(), cavity_photon_state(4), (0.0, 100.0))
    assert np.max(np.abs(rec.success_probability - 1)) <= 1e-8


def test_step_halving(run_a):
    cfg = IntegratorConfig()
    fine = evolve_conditional(ModelParams.experimental(3), reference_pulse(), cavity_photon_state(3), (0.0, 50.0), cfg.halved())
    np.testing.assert_array_equal(fine.times, run_a.times)
    assert abs(fine.final_fidelity - run_a.final_fidelity) <= 1e-8
    assert abs(fine.fidelity[fine.at(25)] - run_a.fidelity[run_a.at(25)]) <= 1e-8


def test_resolution_guard():
    with pytest.raises(StepResolutionError):
        evolve_conditional(ModelParams(1), GaussianPulse(1.0, 0.05), cavity_photon_state(1), (0.0, 1.0), IntegratorConfig(dt=1e-3))


def test_norm_growth_detected():
    cav, drive = coupling_parts(ModelParams(1))
    gain = cav + 0.5j * np.diag([0.1, 0, 0, 0])
    with pytest.raises(NormGrowth):
        propagate(gain, drive, reference_pulse(), cavity_photon_state(1), (0.0, 1.0), IntegratorConfig())


def test_bad_initial_state_and_span():
    with pytest.raises(ValueError):
        evolve_conditional(ModelParams(2), reference_pulse(), 2 * cavity_photon_state(2), (0.0, 1.0))
    with pytest.raises(ValueError):
        evolve_conditional(ModelParams(2), reference_pulse(), cavity_photon_state(2), (1.0, 1.0))


def test_samples_include_endpoints():
    rec = evolve_conditional(ModelParams(1), reference_pulse(), cavity_photon_state(1), (0.0, 1.2345), IntegratorConfig(sample_stride=100))
    assert rec.times[0] == 0.0 and rec.times[-1] == pytest.approx(1.2345, rel=1e-15)


def test_dissipation_purifies_at_25(run_a, run_b):
    assert run_b.fidelity[run_b.at(25)] > run_a.fidelity[run_a.at(25)]


def _max_late_drop(rec):
    f = rec.fidelity[rec.times >= 15]
    return -np.min(np.diff(f))


@pytest.mark.xfail(strict=True, reason="residual bright-state ringing gives sample-to-sample dips of up to ~1e-4")
def test_fidelity_non_decreasing_after_15(run_a, run_b):
    for rec in (run_a, run_b):
        assert _max_late_drop(rec) <= 0.0


def test_fidelity_trend_after_15(run_a, run_b):
    for rec in (run_a, run_b):
        assert _max_late_drop(rec) <= 2e-4
        assert rec.final_fidelity >= rec.fidelity[rec.at(25)]
        assert rec.final_fidelity >= rec.fidelity[rec.at(15)]


def _plateau_drift(rec):
    ps = rec.success_probability[rec.times >= 40]
    return (ps[0] - ps[-1]) / ps[0]


@pytest.mark.xfail(strict=True, reason="the final state keeps a small non-dark component that still decays")
def test_success_constant_on_40_50(run_a):
    assert _plateau_drift(run_a) <= 1e-6


def test_success_plateau_on_40_50(run_a, run_b):
    assert 0 <= _plateau_drift(run_a) <= 5e-4
    assert 0 <= _plateau_drift(run_b) <= 5e-4


def test_csv_schema_and_round_trip(tmp_path, run_a):
    path = tmp_path / "a.csv"
    run_a.to_csv(path)
    header = path.read_text().splitlines()[0]
    assert header == "t,P_s,F,pop_cavity,pop_1_1,pop_1_2,pop_1_3,pop_e_1,pop_e_2,pop_e_3,pop_absorbed"
    cols = read_csv(path)
    np.testing.assert_array_equal(cols["t"], run_a.times)
    np.testing.assert_array_equal(cols["F"], run_a.fidelity)
    np.testing.assert_array_equal(cols["pop_e_2"], run_a.populations[:, 5])


def test_csv_deterministic(tmp_path):
    paths = []
    for k in range(2):
        rec = evolve_conditional(ModelParams.experimental(3), reference_pulse(), cavity_photon_state(3), (0.0, 5.0))
        paths.append(tmp_path / f"{k}.csv")
        rec.to_csv(paths[-1])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_fidelity_nan_for_empty_state():
    rec = TrajectoryRecord(np.array([0.0]), np.zeros((1, 4), complex), w_target(1), ("cavity", "1_1", "e_1", "absorbed"))
    assert np.isnan(rec.final_fidelity)


def test_align():
    a = evolve_conditional(ModelParams(1), reference_pulse(), cavity_photon_state(1), (0.0, 1.0))
    b = evolve_conditional(ModelParams(1), reference_pulse(), cavity_photon_state(1), (0.0, 2.0))
    align(a, a)
    with pytest.raises(SampleMismatch):
        align(a, b)


# jump unraveling


def test_mc_no_decay_never_jumps():
    mc = monte_carlo(ModelParams(3), reference_pulse(), cavity_photon_state(3), (0.0, 10.0), n_traj=200, seed=5)
    assert mc.n_no_jump == 200 and mc.jump_times.size == 0


def test_mc_stats_formulae():
    mc = MCStats(100, 80, 0, np.zeros(20), ())
    assert mc.success_probability == 0.8
    assert mc.standard_error == pytest.approx(np.sqrt(0.8 * 0.2 / 100), rel=1e-15)


def test_mc_deterministic_given_seed():
    args = (ModelParams.experimental(3), reference_pulse(), cavity_photon_state(3), (0.0, 25.0), IntegratorConfig(), 500)
    a, b = monte_carlo(*args, seed=11), monte_carlo(*args, seed=11)
    assert a.n_no_jump == b.n_no_jump
    np.testing.assert_array_equal(a.jump_times, b.jump_times)


@pytest.mark.parametrize(
    "params, seed",
    [
        (ModelParams.experimental(3), 1),
        (ModelParams.experimental(3, gamma=4e7), 2),
        (ModelParams.experimental(1), 3),
        (ModelParams.experimental(6, gamma=4e6), 4),
        (ModelParams(2, gamma=0.05, kappa=0.02), 5),
    ],
)
def test_mc_matches_norm(params, seed):
    psi0, span = cavity_photon_state(params.N), (0.0, 25.0)
    det = evolve_conditional(params, reference_pulse(), psi0, span).final_success
    mc = monte_carlo(params, reference_pulse(), psi0, span, n_traj=4000, seed=seed)
    assert abs(mc.success_probability - det) <= 3 * max(mc.standard_error, 1e-12)


def test_mc_exponential_decay():
    params = ModelParams(1, couplings=(0.0,), gamma=0.1)
    psi0 = np.zeros(4, complex)
    psi0[params.basis.excited(1)] = 1.0
    mc = monte_carlo(params, GaussianPulse(0.0, 4.0), psi0, (0.0, 10.0), n_traj=10000, seed=3)
    assert abs(mc.success_probability - np.exp(-1.0)) <= 3 * mc.standard_error
    assert mc.histogram[0].sum() == mc.jump_times.size


def test_mc_coarse_step_rejected():
    params = ModelParams(1, couplings=(0.0,), gamma=100.0)
    psi0 = np.zeros(4, complex)
    psi0[2] = 1.0
    with pytest.raises(StepResolutionError):
        monte_carlo(params, GaussianPulse(0.0, 4.0), psi0, (0.0, 1.0), n_traj=10)
    with pytest.raises(ValueError):
        monte_carlo(ModelParams(1), reference_pulse(), cavity_photon_state(1), (0.0, 1.0), n_traj=0)
