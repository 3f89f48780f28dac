import numpy as np
import pytest
from hypothesis import strategies as st

from qwasserstein import GaussianState


def random_state(rng, nu_range=(0.5, 3.0), r_max=1.5):
    """Centered squeezed thermal state with a random orientation."""
    nu = rng.uniform(*nu_range)
    r = rng.uniform(0.0, r_max)
    phi = rng.uniform(0.0, 2 * np.pi)
    return GaussianState.squeezed_thermal(nu, r, phi)


def random_spd(rng, cond_max=1e6):
    """Random 2x2 SPD matrix with condition number at most ``cond_max``."""
    q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
    lo = 10 ** rng.uniform(-3, 3)
    cond = 10 ** rng.uniform(0, np.log10(cond_max))
    return q @ np.diag([lo, lo * cond]) @ q.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# hypothesis: squeezed thermal states with moderate parameters
states = st.builds(
    GaussianState.squeezed_thermal,
    st.floats(0.5, 4.0),
    st.floats(0.0, 1.5),
    st.floats(0.0, 2 * np.pi),
)
mixed_states = st.builds(
    GaussianState.squeezed_thermal,
    st.floats(0.51, 4.0),
    st.floats(0.0, 1.5),
    st.floats(0.0, 2 * np.pi),
)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
