from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgscatter.amplitudes import VertexSingularityError, delta_amplitudes, nk_amplitudes


@pytest.mark.parametrize("k", [0.3, 1.0, 7.5, 2 + 0.5j])
def test_nk_degree_three(k):
    r, t = delta_amplitudes(3, 0.0, k)
    assert r == pytest.approx(-1 / 3)
    assert t == pytest.approx(2 / 3)


@pytest.mark.parametrize("k", [0.3, 1.0, 7.5])
def test_neumann_vertex_transparent(k):
    r, t = delta_amplitudes(2, 0.0, k)
    assert abs(r) < 1e-15
    assert t == pytest.approx(1)


def test_delta_d3_alpha1_k1():
    r, t = delta_amplitudes(3, 1.0, 1.0)
    assert r == pytest.approx((1 - 1j) / (3j - 1), abs=1e-15)
    assert t == pytest.approx(2j / (3j - 1), abs=1e-15)
    assert abs(r) ** 2 + 2 * abs(t) ** 2 == pytest.approx(1, abs=1e-14)


def test_singular_denominator():
    # i k d = alpha with k = -i alpha / d
    with pytest.raises(VertexSingularityError):
        delta_amplitudes(3, 3.0, -1j)
    with pytest.raises(ZeroDivisionError):
        delta_amplitudes(2, 0.0, 0.0)


def test_bad_arguments():
    with pytest.raises(ValueError):
        delta_amplitudes(0, 0.0, 1.0)
    with pytest.raises(ValueError):
        delta_amplitudes(3, float("nan"), 1.0)
    with pytest.raises(ValueError):
        nk_amplitudes(0)


@pytest.mark.parametrize("d,r,t", [(1, 1, 2), (2, 0, 1), (3, Fraction(-1, 3), Fraction(2, 3)), (4, Fraction(-1, 2), Fraction(1, 2))])
def test_nk_exact(d, r, t):
    pair = nk_amplitudes(d)
    assert pair == (r, t)
    assert isinstance(pair.r, Fraction) and isinstance(pair.t, Fraction)


@pytest.mark.parametrize("d", range(1, 7))
def test_nk_flux(d):
    r, t = nk_amplitudes(d)
    assert r**2 + (d - 1) * t**2 == 1


@settings(max_examples=200, deadline=None)
@given(
    d=st.integers(1, 6),
    alpha=st.floats(-5, 5, allow_nan=False),
    k=st.floats(1e-3, 10, allow_nan=False),
)
def test_flux_identity(d, alpha, k):
    r, t = delta_amplitudes(d, alpha, k)
    assert abs(r) ** 2 + (d - 1) * abs(t) ** 2 == pytest.approx(1, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(d=st.integers(1, 6), k=st.floats(1e-3, 50, allow_nan=False))
def test_delta_reduces_to_nk(d, k):
    r, t = delta_amplitudes(d, 0.0, k)
    rn, tn = nk_amplitudes(d)
    assert r == pytest.approx(float(rn), abs=1e-14)
    assert t == pytest.approx(float(tn), abs=1e-14)


@pytest.mark.parametrize("alpha", [1e6, -1e6])
@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_dirichlet_limit(alpha, d):
    r, t = delta_amplitudes(d, alpha, 1.3)
    assert abs(r + 1) < 1e-5
    assert abs(t) < 1e-5


def test_complex_k_accepted():
    r, t = delta_amplitudes(3, 0.7, 1.2 - 0.3j)
    assert np.isfinite(r) and np.isfinite(t)
