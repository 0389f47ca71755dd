# %% [markdown]
# # Scaling with the number of qubits
#
# The state dimension is only 2N + 2, so 80 qubits cost nothing. The success
# probability stays above 0.9 throughout. The fidelity drops slowly with N
# because the initial photon state overlaps the t = 0 dark state only by
# 1 / (1 + N / 1600).

# %%
from wsquid.dynamics import evolve_conditional
from wsquid.model import ModelParams, cavity_photon_state, reference_pulse

print(" N    F(50/g)   P_s(50/g)   1/(1+N/1600)")
for N in (3, 5, 10, 20, 40, 60, 80):
    rec = evolve_conditional(ModelParams.experimental(N), reference_pulse(), cavity_photon_state(N), (0.0, 50.0))
    print(f"{N:2d}   {rec.final_fidelity:.4f}    {rec.final_success:.4f}      {1 / (1 + N / 1600):.4f}")
