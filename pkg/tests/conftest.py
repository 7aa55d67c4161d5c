import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from severoscan import generate, standard_spec
from severoscan.imagecore import masked_histogram

# Watershed and morphology calls make some property tests slow on one core;
# wall-clock deadlines would only add flakiness there.
settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def infected_phantom():
    """One 512x512 phantom with a solid infection mode, shared where the
    test only reads it."""
    return generate(standard_spec(300, target_rate_percent=10.0))


@pytest.fixture(scope="session")
def trimodal_hist(infected_phantom):
    """Histogram over the body (tissue, infection, and bone modes)."""
    return masked_histogram(infected_phantom.image, infected_phantom.body_mask)


@pytest.fixture(scope="session")
def healthy_phantom():
    return generate(standard_spec(500, target_rate_percent=0.0))


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))
