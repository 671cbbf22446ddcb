import numpy as np
import pytest

from gssdecon import ErrorModel, GssModel, constant_skew, gss_sample, model_variance, probit_cubic_skew, probit_skew

SKEW_MAKERS = {"pi0": constant_skew, "pi1": probit_skew, "pi2": probit_cubic_skew}


def make_model(skew_name: str) -> GssModel:
    return GssModel(skew=SKEW_MAKERS[skew_name]())


def draw_contaminated(skew_name: str, family: str, nsr: float, n: int, seed):
    """One contaminated sample W = X + U for a named configuration."""
    truth = make_model(skew_name)
    err = ErrorModel(family, nsr * model_variance(truth))
    rng = np.random.default_rng(seed)
    x = gss_sample(n, truth, rng)
    u = err.sample(n, rng)
    return x + u, truth, err


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
