import warnings

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(autouse=True)
def _quiet_epsilon_warnings():
    """The desk-scale tests deliberately use epsilon below the asymptotic floor."""
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="epsilon=.*below")
        yield
