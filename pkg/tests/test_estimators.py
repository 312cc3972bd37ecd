import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from qgscatter.estimators import (
    ResonanceFinder,
    SuppressionBandDetector,
    TransmissionModel,
    check_graph,
    check_kl,
    check_range,
    peak_table,
)
from qgscatter.graph import GraphError, build_named


def test_get_set_params_and_clone():
    m = TransmissionModel(length=2.0, exact=True)
    assert m.get_params() == {"length": 2.0, "exact": True}
    m.set_params(length=1.0)
    c = clone(m)
    assert c.get_params() == {"length": 1.0, "exact": True}
    assert not hasattr(c, "graph_")


def test_predict_requires_fit():
    with pytest.raises(NotFittedError):
        TransmissionModel().predict([1.0])


@pytest.mark.parametrize("exact", [False, True])
def test_transmission_model(exact):
    m = TransmissionModel(exact=exact).fit("D")
    t2 = m.predict([0.0, math.pi / 2])
    assert t2 == pytest.approx([1, 1], abs=1e-12)
    tr = m.transform(np.array([[0.3], [1.1]]))
    assert tr.shape == (2, 2)
    assert np.allclose(tr.sum(axis=1), 1)


def test_exact_and_numeric_models_agree(rng):
    kl = rng.uniform(0, 2 * math.pi, 64)
    a = TransmissionModel(exact=True).fit("S(Q,X)").predict(kl)
    b = TransmissionModel().fit("S(Q,X)").predict(kl)
    assert np.max(np.abs(a - b)) < 1e-10


def test_score():
    m = TransmissionModel().fit(build_named("X"))
    kl = np.linspace(0, 3, 5)
    assert m.score(kl, m.predict(kl)) == 0


def test_bad_inputs():
    m = TransmissionModel().fit("Q")
    with pytest.raises(ValueError):
        m.predict([np.nan])
    with pytest.raises(ValueError):
        m.predict(np.ones((2, 2)))
    with pytest.raises(ValueError):
        TransmissionModel(length=-1).fit("Q")
    with pytest.raises(TypeError):
        check_graph(3)
    with pytest.raises(GraphError):
        check_graph(build_named("D").with_leads("L", None))


def test_check_helpers():
    assert check_kl(2.0).shape == (1,)
    assert check_kl([[1.0], [2.0]]).tolist() == [1.0, 2.0]
    assert check_range(0, 1) == (0.0, 1.0)
    with pytest.raises(ValueError):
        check_range(1, 0)
    with pytest.raises(ValueError):
        check_range(0, 20, max_span=4 * math.pi)


def test_resonance_finder():
    f = ResonanceFinder(re_range=(3.0, 3.3)).fit("X")
    assert f.predict().shape == (1,)
    assert f.widths_[0] == pytest.approx(0.54408, abs=1e-4)


def test_band_detector():
    d = SuppressionBandDetector(tau=1e-2).fit("Q")
    assert len(d.bands_) == 1
    assert d.predict([math.pi, 0.5]).tolist() == [True, False]
    assert SuppressionBandDetector().fit("X").bands_ == []


def test_peak_table():
    t = peak_table("X")
    assert t.shape == (3, 3)
    assert peak_table("S(D,D)", (0.1, 0.2)).shape[1] == 3
