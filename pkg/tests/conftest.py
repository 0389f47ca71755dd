import pytest

from wsquid.dynamics import evolve_conditional
from wsquid.model import ModelParams, cavity_photon_state, reference_pulse

# criterion number -> (passed, description), filled by test_acceptance
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def warm_jit():
    """Compile the integrator once so timed runs measure only the work."""
    evolve_conditional(ModelParams(1), reference_pulse(), cavity_photon_state(1), (0.0, 0.01))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {text}")
