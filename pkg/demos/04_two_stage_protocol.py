# %% [markdown]
# # Photon preparation followed by W-state generation
#
# Stage one: qubit 1 alone, drive rising, |1>_1|0> -> |0>_1|1>.
# Stage two: everyone re-coupled, drive falling.

# %%
from wsquid.model import GaussianPulse, ModelParams
from wsquid.protocol import ProtocolConfig, run_full_protocol

report = run_full_protocol(ProtocolConfig(ModelParams.experimental(3)))
print(report.summary())

# %% [markdown]
# The mirrored tau = 4/g pulse rises too quickly for a clean transfer. A
# slower rise over 50/g does much better.

# %%
slow = ProtocolConfig(ModelParams.experimental(3), prep_pulse=GaussianPulse(40.0, 8.0, 50.0), prep_duration=50.0)
print(run_full_protocol(slow).summary())
