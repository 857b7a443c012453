import numpy as np
import pytest

import citedyn

MASTER_SEED = 42
ENSEMBLE_SIZE = 40195
ENSEMBLE_HORIZON = 25


@pytest.fixture(scope="session")
def default_params():
    return citedyn.ModelParams()


@pytest.fixture(scope="session")
def default_curves():
    return citedyn.default_curves()


@pytest.fixture(scope="session")
def default_ensemble(default_params, default_curves):
    """The calibration-scale ensemble shared by metric and acceptance tests."""
    import time
    t0 = time.time()
    result = citedyn.simulate_ensemble(
        ENSEMBLE_SIZE, default_params, default_curves, master_seed=MASTER_SEED,
        snapshot_years=[2, 5, 10, ENSEMBLE_HORIZON], horizon=ENSEMBLE_HORIZON)
    elapsed = time.time() - t0
    return result, elapsed


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
