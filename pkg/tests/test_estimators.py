from fractions import Fraction as F

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from ngtrace.estimators import MomentExtender, TracePowerEstimator
from ngtrace.exact import Spectrum, power_sums


def test_extender_reproduces_full_rank():
    s = Spectrum([F(1, 2), F(1, 3), F(1, 6)])
    head = np.array([power_sums(s, 3).as_floats()])
    out = MomentExtender(k=10).fit_transform(head)
    assert out.shape == (1, 10)
    assert np.allclose(out[0], power_sums(s, 10).as_floats(), rtol=1e-12)


def test_extender_rows_independent():
    rows = np.array([[1.0, 0.5], [1.0, 1.0]])
    out = MomentExtender(k=4).fit_transform(rows)
    assert np.allclose(out[0], [1, 0.5, 0.25, 0.125])
    assert np.allclose(out[1], [1, 1, 1, 1])


def test_extender_shape_checks():
    ext = MomentExtender(k=4).fit(np.ones((1, 2)))
    with pytest.raises(ValueError):
        ext.transform(np.ones((1, 3)))
    with pytest.raises(NotFittedError):
        MomentExtender().transform(np.ones((1, 2)))


def test_params_and_clone():
    est = TracePowerEstimator(k=16, epsilon=0.01)
    assert est.get_params() == {"k": 16, "epsilon": 0.01, "t": None, "seed": 0, "exact_oracle": False}
    assert clone(est.set_params(seed=3)).seed == 3


def test_estimator_exact():
    s = Spectrum.uniform(4)
    est = TracePowerEstimator(k=8, epsilon=0.1, exact_oracle=True).fit(s)
    assert est.t_ == 4 and est.n_samples_ == 0
    assert np.allclose(est.predict([1, 8]), [1, 4.0**-7])
    assert est.coef_[0] == 1


def test_estimator_sampled_within_eps():
    est = TracePowerEstimator(k=16, epsilon=0.05, seed=1).fit([0.5, 0.3, 0.2])
    truth = np.array(power_sums(Spectrum([F(1, 2), F(3, 10), F(1, 5)]), 16).as_floats())
    assert est.n_samples_ == 16**2 * 400
    assert np.max(np.abs(est.q_ - truth)) < 0.05


def test_predict_range():
    est = TracePowerEstimator(k=4, exact_oracle=True).fit(Spectrum.uniform(2))
    with pytest.raises(ValueError):
        est.predict([5])


def test_pipeline():
    pipe = make_pipeline(MomentExtender(k=6))
    assert pipe.fit_transform(np.array([[1.0, 0.5]])).shape == (1, 6)
