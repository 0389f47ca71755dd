# %% [markdown]
# # The dark state and where the photon goes
#
# With a collinear drive every qubit sees the same ratio g_j / Omega_j, so the
# zero-energy eigenstate of the coupling Hamiltonian carries no excited-level
# amplitude and does not depend on the individual couplings.

# %%
import numpy as np

from wsquid.model import ModelParams, constant_pulse, dark_state, hamiltonian, reference_pulse, w_target

params = ModelParams(3)
for t in (0.0, 5.0, 10.0, 15.0):
    d = dark_state(params, reference_pulse(), t)
    print(f"t={t:5.1f}  photon {abs(d[0])**2:.6f}  W overlap {abs(np.vdot(w_target(3), d))**2:.6f}")

# %% as the drive dies the dark state turns into the W state
d = dark_state(params, reference_pulse(), 0.0)
print("residual |H D| at the peak:", np.linalg.norm(hamiltonian(params, reference_pulse(), 0.0) @ d))

# %% unequal couplings give the same dark state
rng = np.random.default_rng(1)
a = dark_state(ModelParams(3, couplings=rng.uniform(0.5, 1.5, 3)), constant_pulse(7.0), 0.0)
b = dark_state(ModelParams(3), constant_pulse(7.0), 0.0)
print("max difference:", np.max(np.abs(a - b)))
