import numpy as np
import pytest

from wsquid.dynamics import IntegratorConfig, evolve_conditional
from wsquid.errors import DimensionGuard, SampleMismatch
from wsquid.model import ModelParams, cavity_photon_state, reference_pulse
from wsquid.oracle import (
    FullSpaceConfig,
    compare_subspace,
    embed,
    full_operators,
    full_space_effective,
    full_space_evolve,
    full_space_hamiltonian,
    reduced_embedding,
    sector_leakage,
)


def _pair(params, t_end, n_max=2, cfg=IntegratorConfig()):
    psi0 = cavity_photon_state(params.N)
    reduced = evolve_conditional(params, reference_pulse(), psi0, (0.0, t_end), cfg)
    full = full_space_evolve(FullSpaceConfig(params, reference_pulse(), n_max), embed(psi0, n_max), (0.0, t_end), cfg)
    return full, reduced


def test_dimension_guard():
    assert FullSpaceConfig(ModelParams(4), reference_pulse(), 2).dim == 243
    with pytest.raises(DimensionGuard):
        FullSpaceConfig(ModelParams(5), reference_pulse())
    with pytest.raises(DimensionGuard):
        FullSpaceConfig(ModelParams(4), reference_pulse(), n_max=30)
    with pytest.raises(ValueError):
        FullSpaceConfig(ModelParams(1), reference_pulse(), n_max=0)


def test_labels_and_embedding():
    cfg = FullSpaceConfig(ModelParams(2), reference_pulse(), 2)
    labels = cfg.labels
    assert labels[0] == "00|0" and labels[-1] == "ee|2"
    names = [labels[k] for k in reduced_embedding(2, 2)]
    assert names == ["00|1", "10|0", "01|0", "e0|0", "0e|0", "00|0"]


def test_full_hamiltonian_is_hermitian_and_damped():
    cfg = FullSpaceConfig(ModelParams.experimental(2), reference_pulse(), 2)
    H = full_space_hamiltonian(cfg, 1.0)
    assert np.max(np.abs(H - H.T)) == 0.0
    Heff = full_space_effective(cfg, 1.0)
    assert np.all(np.diag(Heff).imag <= 0)


def test_reduced_block_of_full_hamiltonian():
    from wsquid.model import hamiltonian

    params = ModelParams(3, couplings=(0.8, 1.0, 1.3), K=1.2)
    cfg = FullSpaceConfig(params, reference_pulse(), 2)
    idx = reduced_embedding(3, 2)
    block = full_space_hamiltonian(cfg, 0.7)[np.ix_(idx, idx)]
    np.testing.assert_array_equal(block, hamiltonian(params, reference_pulse(), 0.7))


def test_excitation_number_conserved():
    cfg = FullSpaceConfig(ModelParams(2, couplings=(0.7, 1.2)), reference_pulse(), 2)
    cav, drive, _, nexc = full_operators(cfg)
    n = np.diag(nexc)
    for op in (cav, drive):
        assert np.max(np.abs(op @ n - n @ op)) <= 1e-12


@pytest.mark.parametrize("sector", [1, 2])
def test_sector_leakage(sector):
    params = ModelParams(2, couplings=(0.9, 1.1))
    cfg = FullSpaceConfig(params, reference_pulse(), 2)
    _, _, _, nexc = full_operators(cfg)
    rng = np.random.default_rng(sector)
    inside = np.abs(nexc - sector) < 0.5
    psi0 = np.zeros(cfg.dim, dtype=complex)
    psi0[inside] = rng.normal(size=inside.sum()) + 1j * rng.normal(size=inside.sum())
    psi0 /= np.linalg.norm(psi0)
    rec = full_space_evolve(cfg, psi0, (0.0, 25.0))
    assert sector_leakage(rec, cfg, sector) <= 1e-12


@pytest.mark.parametrize("N", [1, 2, 3])
def test_full_matches_reduced_over_50(N):
    full, reduced = _pair(ModelParams.experimental(N), 50.0)
    dev = compare_subspace(full, reduced)
    assert dev.passes(1e-6)
    assert dev.max <= 1e-12


def test_cavity_truncation_irrelevant():
    params = ModelParams.experimental(2)
    psi0 = cavity_photon_state(2)
    recs = []
    for n_max in (1, 2):
        cfg = FullSpaceConfig(params, reference_pulse(), n_max)
        recs.append(full_space_evolve(cfg, embed(psi0, n_max), (0.0, 25.0)))
    np.testing.assert_allclose(recs[0].success_probability, recs[1].success_probability, atol=1e-12, rtol=0)
    np.testing.assert_allclose(recs[0].fidelity, recs[1].fidelity, atol=1e-12, rtol=0)


def test_identical_records_zero_deviation():
    _, reduced = _pair(ModelParams.experimental(2), 5.0)
    lifted = type(reduced)(reduced.times, embed(reduced.amplitudes, 2), embed(reduced.target, 2), tuple(range(27)))
    dev = compare_subspace(lifted, reduced)
    assert dev.amplitude == 0.0
    assert dev.max <= 1e-15


def test_perturbed_coupling_detected():
    params = ModelParams.experimental(3)
    full, _ = _pair(params, 25.0)
    bent = params.with_(couplings=(1.0, 1.001, 1.0))
    reduced = evolve_conditional(bent, reference_pulse(), cavity_photon_state(3), (0.0, 25.0))
    dev = compare_subspace(full, reduced)
    assert dev.max > 1e-6 and not dev.passes(1e-6)


def test_sample_mismatch():
    full, _ = _pair(ModelParams.experimental(1), 5.0)
    _, other = _pair(ModelParams.experimental(1), 6.0)
    with pytest.raises(SampleMismatch):
        compare_subspace(full, other)
    _, wrong_n = _pair(ModelParams.experimental(2), 5.0)
    with pytest.raises(SampleMismatch):
        compare_subspace(full, wrong_n)
