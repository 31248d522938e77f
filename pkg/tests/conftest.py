import numpy as np
import pytest

from dynsample.models import Model
from dynsample.signal import ControlBounds, FaprbsSegment


def linear_model(n_controls: int) -> Model:
    """Stable linear test system: x' = -x + mean(u), outputs = states."""
    def rhs(x, u, t):
        return -x + np.mean(u)

    def output_map(x, u):
        return x.copy()

    return Model(
        name=f"linear{n_controls}",
        n_states=2,
        n_controls=n_controls,
        n_outputs=2,
        default_x0=np.array([0.5, -0.5]),
        control_bounds=ControlBounds(
            lower=np.zeros(n_controls),
            upper=np.ones(n_controls),
            faprbs_amplitude=np.full(n_controls, 0.1),
        ),
        rhs=rhs,
        output_map=output_map,
    )


def pytest_terminal_summary(terminalreporter):
    """Print the one-line verdicts collected by the acceptance suite."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def unit_bounds():
    return ControlBounds(np.array([0.0]), np.array([1.0]), np.array([0.2]))


@pytest.fixture
def toy_segments():
    return [FaprbsSegment(0.5, 4), FaprbsSegment(1.0, 2)]
