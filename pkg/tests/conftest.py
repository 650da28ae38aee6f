import numpy as np
import pytest

from iashedge.fixtures import reference_curve, reference_model, standard_scenario
from iashedge.ias import simulate_notional


@pytest.fixture(scope="session")
def curve():
    return reference_curve()


@pytest.fixture(scope="session")
def hw_model():
    return reference_model()


@pytest.fixture(scope="session")
def rational_bullet():
    """Standard rational bullet hedging fixture: scenario, paths, notional paths."""
    sc = standard_scenario("bullet", "rational", n_paths=5_000, seed=3)
    paths = sc.simulate_paths()
    return sc, paths, simulate_notional(sc, paths)


@pytest.fixture(scope="session")
def sigmoid_bullet():
    sc = standard_scenario("bullet", "sigmoid", n_paths=5_000, seed=3)
    paths = sc.simulate_paths()
    return sc, paths, simulate_notional(sc, paths)


@pytest.fixture(scope="session")
def sigmoid_annuity():
    sc = standard_scenario("annuity", "sigmoid", n_paths=5_000, seed=3)
    paths = sc.simulate_paths()
    return sc, paths, simulate_notional(sc, paths)
