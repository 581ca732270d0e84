import warnings

import pytest

from casimir.dielectric import DrudeModel, DrudeParams, IdealMetal
from casimir.lifshitz import LayerStack
from casimir.materials import UpperLimitPreset

AU = DrudeParams.from_resistivity(1.37e16, 2.25e-8)
AL = DrudeParams.from_resistivity(2.40e16, 2.65e-8)
AUPD = DrudeParams.from_resistivity(1.69e16, 3.0e-7)


@pytest.fixture(autouse=True)
def _quiet_pfa_warning():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="R/a = .* proximity force")
        yield


@pytest.fixture(scope="session")
def preset():
    return UpperLimitPreset()


@pytest.fixture(scope="session")
def au_stack():
    return LayerStack.homogeneous(DrudeModel(AU))


@pytest.fixture(scope="session")
def afm_stack():
    return LayerStack.coated(DrudeModel(AL), DrudeModel(AUPD), 15e-9)


@pytest.fixture(scope="session")
def ideal_stack():
    return LayerStack.homogeneous(IdealMetal())
