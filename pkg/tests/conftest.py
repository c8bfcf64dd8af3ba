import os

import pytest
from hypothesis import HealthCheck, settings

from germwork import catalog

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))


# restriction semigroups of the sweep, split by the properties tests care about
RESTRICTION = [n for n in catalog.SWEEP if n != "r:2"]
LOCAL_UNITS = [n for n in RESTRICTION if n != "nolu:3"]


@pytest.fixture(scope="session")
def cat():
    return catalog.semigroup


@pytest.fixture(scope="session")
def four_element_monoid():
    return catalog.semigroup("paper-4")
