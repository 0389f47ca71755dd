# %% [markdown]
# # Does the single-excitation restriction lose anything?
#
# Run the same problem in the full 3^N x (n_max + 1) space and compare.

# %%
from wsquid.dynamics import evolve_conditional
from wsquid.model import ModelParams, cavity_photon_state, reference_pulse
from wsquid.oracle import FullSpaceConfig, compare_subspace, embed, full_space_evolve, sector_leakage

for N in (1, 2, 3):
    params = ModelParams.experimental(N)
    psi0 = cavity_photon_state(N)
    cfg = FullSpaceConfig(params, reference_pulse(), n_max=2)
    full = full_space_evolve(cfg, embed(psi0, 2), (0.0, 50.0))
    reduced = evolve_conditional(params, reference_pulse(), psi0, (0.0, 50.0))
    dev = compare_subspace(full, reduced)
    print(f"N={N} dim={cfg.dim:3d}  max deviation {dev.max:.1e}  leakage {sector_leakage(full, cfg):.1e}")
