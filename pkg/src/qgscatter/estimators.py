"""scikit-learn style wrappers around the solver and spectral tools.

A "fit" here binds a graph (catalog name, circuit expression, ``@path`` or
a :class:`ScatteringGraph`); ``predict``/``transform`` then act on arrays
of kl values.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .composer import resolve_source
from .graph import GraphError, ScatteringGraph, validate
from .scattering import coefficient, reflection, transmission, transmission_rational
from .spectra import TWO_PI, find_peaks, find_poles, suppression_bands, sweep

__all__ = [
    "check_graph",
    "check_kl",
    "check_range",
    "TransmissionModel",
    "ResonanceFinder",
    "SuppressionBandDetector",
]


def check_graph(graph) -> ScatteringGraph:
    """Resolve ``graph`` to a validated two-lead :class:`ScatteringGraph`."""
    if isinstance(graph, str):
        graph = resolve_source(graph)
    if not isinstance(graph, ScatteringGraph):
        raise TypeError(f"expected a ScatteringGraph or source string, got {type(graph).__name__}")
    report = validate(graph)
    if not report.ok:
        raise GraphError("; ".join(report.problems))
    return graph


def check_kl(kl) -> np.ndarray:
    """1-D float array of finite kl values; a column vector is flattened."""
    arr = np.asarray(kl, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    arr = np.atleast_1d(arr)
    if arr.ndim != 1:
        raise ValueError(f"kl must be 1-D or a single column, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("kl contains NaN or infinity")
    return arr


def check_range(lo: float, hi: float, max_span: float | None = None) -> tuple[float, float]:
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise ValueError(f"invalid range [{lo}, {hi}]")
    if max_span is not None and (lo < 0 or hi > max_span):
        raise ValueError(f"range [{lo}, {hi}] outside [0, {max_span:g}]")
    return lo, hi


class TransmissionModel(BaseEstimator, TransformerMixin):
    """|T(kl)|^2 of a fixed graph.

    Parameters
    ----------
    length : float
        Edge unit; with 1.0 the inputs are kl directly.
    exact : bool
        Evaluate the exact rational T(z) instead of solving numerically
        (Neumann-Kirchhoff graphs only).
    """

    def __init__(self, length: float = 1.0, exact: bool = False):
        self.length = length
        self.exact = exact

    def fit(self, graph, y=None):
        self.graph_ = check_graph(graph)
        if self.length <= 0:
            raise ValueError("length must be positive")
        self.rational_ = transmission_rational(self.graph_) if self.exact else None
        return self

    def amplitude(self, kl) -> np.ndarray:
        check_is_fitted(self, "graph_")
        kl = check_kl(kl)
        if self.rational_ is not None:
            return np.asarray(self.rational_(np.exp(1j * kl * self.length)), dtype=complex)
        return np.asarray(transmission(self.graph_, kl, self.length))

    def predict(self, kl) -> np.ndarray:
        return coefficient(self.amplitude(kl))

    def transform(self, kl) -> np.ndarray:
        """Columns |T|^2 and |R|^2 for each kl."""
        t2 = self.predict(kl)
        r2 = coefficient(reflection(self.graph_, check_kl(kl), self.length))
        return np.column_stack([t2, r2])

    def score(self, kl, t2) -> float:
        """Negative max abs deviation from reference coefficients."""
        return -float(np.max(np.abs(self.predict(kl) - check_kl(t2))))


class ResonanceFinder(BaseEstimator):
    """Poles of the exact transmission with Re(kl) in ``re_range``."""

    def __init__(self, re_range=(0.0, TWO_PI), im_max: float = math.inf, tol: float = 1e-10):
        self.re_range = re_range
        self.im_max = im_max
        self.tol = tol

    def fit(self, graph, y=None):
        self.graph_ = check_graph(graph)
        lo, hi = check_range(*self.re_range)
        self.resonances_ = find_poles(self.graph_, (lo, hi), self.im_max, self.tol)
        return self

    def predict(self, kl=None) -> np.ndarray:
        """Complex pole positions; ``kl`` is ignored."""
        check_is_fitted(self, "resonances_")
        return np.array([r.kl_complex for r in self.resonances_], dtype=complex)

    @property
    def widths_(self) -> np.ndarray:
        check_is_fitted(self, "resonances_")
        return np.array([r.width for r in self.resonances_])


class SuppressionBandDetector(BaseEstimator):
    """Intervals where |T|^2 stays at or below ``tau`` over one period."""

    def __init__(self, tau: float = 1e-2, n_samples: int = 2001, region=(0.0, TWO_PI)):
        self.tau = tau
        self.n_samples = n_samples
        self.region = region

    def fit(self, graph, y=None):
        self.graph_ = check_graph(graph)
        lo, hi = check_range(*self.region)
        self.spectrum_ = sweep(self.graph_, lo, hi, self.n_samples)
        self.bands_ = suppression_bands(self.spectrum_, self.tau)
        return self

    def predict(self, kl) -> np.ndarray:
        """Boolean mask: True where kl falls in a detected band."""
        check_is_fitted(self, "bands_")
        kl = check_kl(kl)
        mask = np.zeros(kl.shape, dtype=bool)
        for b in self.bands_:
            mask |= (kl >= b.lo) & (kl <= b.hi)
        return mask


def peak_table(graph, region=(0.0, TWO_PI), min_height: float = 0.5) -> np.ndarray:
    """(n, 3) array of kl, |T|^2 and FWHM for each peak."""
    peaks = find_peaks(check_graph(graph), region, min_height)
    return np.array([[p.kl, p.t2, p.fwhm] for p in peaks]).reshape(-1, 3)
