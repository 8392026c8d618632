import numpy as np
import pytest

from shearlab import acceptance, profiles, rayleigh


@pytest.fixture(scope="session")
def gevrey():
    return profiles.make_gevrey_profile(2.0)


@pytest.fixture(scope="session")
def two_inflection():
    return profiles.make_two_inflection_profile(1.0, 3.0, 1.0)


@pytest.fixture(scope="session")
def acceptance_ctx():
    return acceptance.AcceptanceContext()


@pytest.fixture(scope="session")
def gevrey_mode(gevrey):
    # eigenvalue near the peak of the growth curve
    return rayleigh.solve_mode(gevrey, 0.6565217391304348,
                               complex(0.145, 0.055))
