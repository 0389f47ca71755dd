# %% [markdown]
# # Quantum jumps versus the conditioned norm
#
# The squared norm of the no-jump state is the probability that nothing
# leaked. Sampling jumps directly should agree with it.

# %%
import numpy as np

from wsquid.dynamics import evolve_conditional, monte_carlo
from wsquid.model import ModelParams, cavity_photon_state, reference_pulse

params = ModelParams.experimental(3)
psi0 = cavity_photon_state(3)
det = evolve_conditional(params, reference_pulse(), psi0, (0.0, 25.0)).final_success
mc = monte_carlo(params, reference_pulse(), psi0, (0.0, 25.0), n_traj=10_000, seed=7)
print(f"norm^2 = {det:.4f}   sampled = {mc.success_probability:.4f} +/- {mc.standard_error:.4f}")

# %% when do the jumps happen?
counts, edges = mc.histogram
for c, lo in zip(counts[:10], edges[:10]):
    print(f"{lo:5.1f}  {'#' * int(c // 5)}")
print("median jump time:", np.median(mc.jump_times))
