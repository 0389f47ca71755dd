# %% [markdown]
# # Three qubits at two spontaneous emission rates
#
# g = 1.8e8 s^-1, kappa = 1.32e6 s^-1, drive 40 g exp(-t^2 / 32) from its
# peak. A hundredfold larger Gamma purifies the conditioned state but more
# runs are lost.

# %%
from wsquid.dynamics import evolve_conditional
from wsquid.model import ModelParams, cavity_photon_state, reference_pulse

runs = {}
for gamma in (4e5, 4e7):
    params = ModelParams.experimental(3, gamma=gamma)
    runs[gamma] = evolve_conditional(params, reference_pulse(), cavity_photon_state(3), (0.0, 25.0))

for gamma, rec in runs.items():
    print(f"Gamma={gamma:.0e} s^-1   F(25/g)={rec.final_fidelity:.4f}   P_s(25/g)={rec.final_success:.4f}")

# %% trajectory, every 2.5/g
rec = runs[4e5]
for i in range(0, len(rec.times), 25):
    print(f"{rec.times[i]:5.1f}  F={rec.fidelity[i]:.4f}  P_s={rec.success_probability[i]:.4f}")

# %%
rec.to_csv("emission_rates_a.csv")
