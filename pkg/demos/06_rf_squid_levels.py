# %% [markdown]
# # rf-SQUID levels and the coupling they imply
#
# C = 10 fF, L = 100 pH, beta_L = 1.2, bias 0.502 flux quanta. The three
# lowest levels form the Lambda system; the flux matrix elements set g and
# Omega.

# %%
from wsquid.squid_spectrum import (
    HBAR,
    coupling_constants,
    overlap_for_coupling,
    reference_lambda_spec,
    solve_flux_levels,
)

spec = reference_lambda_spec()
levels = solve_flux_levels(spec)
for k, e in enumerate(levels.energies):
    print(f"E_{k} = {e / (HBAR * spec.plasma_frequency):.6f} hbar omega_LC")
print("<0|Phi|e> =", levels.flux_matrix_element_0e)
print("<1|Phi|e> =", levels.flux_matrix_element_1e)

# %% overlap needed for g = 1.8e8 s^-1
geom = overlap_for_coupling(levels, spec, 1.8e8)
g, omega_scale = coupling_constants(levels, geom, spec)
print(geom)
print(f"g = {g:.4e} s^-1, drive per unit field amplitude = {omega_scale:.4e}")
