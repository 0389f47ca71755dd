"""W states of rf-SQUID qubits by adiabatic passage through a shared cavity."""
from .dynamics import IntegratorConfig, TrajectoryRecord, evolve_conditional, metrics, monte_carlo
from .model import GaussianPulse, ModelParams, PiecewiseLinearPulse, cavity_photon_state, dark_state, reference_pulse, w_target
from .protocol import ProtocolConfig, generate_w, prepare_photon, run_full_protocol

__all__ = [
    "GaussianPulse",
    "IntegratorConfig",
    "ModelParams",
    "PiecewiseLinearPulse",
    "ProtocolConfig",
    "TrajectoryRecord",
    "cavity_photon_state",
    "dark_state",
    "evolve_conditional",
    "generate_w",
    "metrics",
    "monte_carlo",
    "reference_pulse",
    "prepare_photon",
    "run_full_protocol",
    "w_target",
]
