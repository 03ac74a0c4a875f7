import dataclasses
import math

import pytest

from twpc import device, network

GHZ = 2e9 * math.pi


@pytest.fixture(scope="session")
def fitted_spec():
    return device.fitted_line()


@pytest.fixture(scope="session")
def fitted_net(fitted_spec):
    return network.build_chain(fitted_spec)


@pytest.fixture(scope="session")
def defect_spec(fitted_spec):
    return dataclasses.replace(fitted_spec, defects=((165, "open_junction"),))


@pytest.fixture(scope="session")
def defect_net(defect_spec):
    return network.build_chain(defect_spec)
