import pytest

from sphereum.measures import find_packet_centers
from sphereum.quadrature import GridSpec
from sphereum.reproduce import SPHERE_STATES
from sphereum.states import make_state


@pytest.fixture(scope="session")
def spec():
    return GridSpec.default()


@pytest.fixture(scope="session")
def builtin_states(spec):
    """Every built-in sphere state keyed by its short name."""
    return {k: make_state(v, spec) for k, v in SPHERE_STATES.items()}


@pytest.fixture(scope="session")
def builtin_centers(builtin_states, spec):
    return {k: find_packet_centers(s, spec) for k, s in builtin_states.items()}

