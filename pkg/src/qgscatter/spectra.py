"""Transmission spectra: sweeps, differences, bands, peaks and resonance poles.

The abscissa everywhere is the dimensionless ``kl = k * ell``.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import optimize, signal

from .graph import GraphError, ScatteringGraph
from .rational import relative_residual, roots
from .scattering import coefficient, transmission, transmission_rational

__all__ = [
    "Spectrum",
    "Band",
    "Peak",
    "Resonance",
    "DeltaCurve",
    "sweep",
    "difference",
    "zero_crossings",
    "suppression_bands",
    "find_peaks",
    "find_poles",
    "spectrum_to_csv",
    "resonances_to_csv",
    "bands_to_csv",
    "peaks_to_csv",
    "delta_to_csv",
    "t2_function",
    "TWO_PI",
]

TWO_PI = 2 * math.pi
DT2_REFINE = 0.05
MIN_SPACING = 1e-6
# |z| within this of 1 is a real-axis feature, not a resonance
UNIT_CIRCLE_TOL = 1e-12


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def t2_function(g: ScatteringGraph, length: float = 1.0, jobs: int = 1) -> Callable:
    """Vectorised kl -> |T|^2 for ``g``; ``jobs > 1`` splits arrays across threads."""

    def f(kl):
        scalar = np.ndim(kl) == 0
        kl = np.atleast_1d(np.asarray(kl, dtype=float))
        if jobs > 1 and len(kl) >= 2 * jobs:
            chunks = np.array_split(kl, jobs)
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                parts = list(pool.map(lambda c: coefficient(transmission(g, c, length)), chunks))
            out = np.concatenate(parts)
        else:
            out = coefficient(transmission(g, kl, length))
        return float(out[0]) if scalar else out

    return f


@dataclass
class Spectrum:
    """Sampled |T(kl)|^2 on a strictly increasing grid."""

    kl: np.ndarray
    t2: np.ndarray
    refined: np.ndarray
    graph: ScatteringGraph | None = field(default=None, repr=False)
    length: float = 1.0

    def __post_init__(self):
        self.kl = np.asarray(self.kl, dtype=float)
        self.t2 = np.asarray(self.t2, dtype=float)
        self.refined = np.asarray(self.refined, dtype=bool)
        if not (len(self.kl) == len(self.t2) == len(self.refined)):
            raise ValueError("spectrum arrays must have equal length")
        if np.any(np.diff(self.kl) <= 0):
            raise ValueError("kl samples must be strictly increasing")

    def __len__(self) -> int:
        return len(self.kl)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.kl.tolist(), self.t2.tolist()))

    def evaluator(self) -> Callable | None:
        return None if self.graph is None else t2_function(self.graph, self.length)


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float
    max_t2_inside: float
    threshold: float

    def __contains__(self, kl: float) -> bool:
        return self.lo <= kl <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class Peak:
    kl: float
    t2: float
    fwhm: float


@dataclass(frozen=True)
class Resonance:
    kl_complex: complex
    width: float
    z_root: complex
    residual: float

    @property
    def re(self) -> float:
        return self.kl_complex.real


@dataclass
class DeltaCurve:
    """Pointwise difference of two spectra, optionally re-evaluable."""

    kl: np.ndarray
    delta: np.ndarray
    evaluate: Callable | None = field(default=None, repr=False)

    def __iter__(self):
        return iter(zip(self.kl.tolist(), self.delta.tolist()))

    def __len__(self) -> int:
        return len(self.kl)


# -- sweeps -------------------------------------------------------------------

def _pole_projections(g: ScatteringGraph, lo: float, hi: float) -> list[float]:
    if not g.is_neumann_kirchhoff():
        return []
    out = []
    for res in find_poles(g, (0.0, TWO_PI), math.inf):
        base = res.re
        m = math.floor((lo - base) / TWO_PI)
        for shift in range(m, m + int((hi - lo) / TWO_PI) + 2):
            x = base + shift * TWO_PI
            if lo <= x <= hi:
                out.append(x)
    return sorted(out)


def sweep(g: ScatteringGraph, lo: float, hi: float, n_base: int = 2001, adaptive: bool = False,
          *, poles: Sequence[float] | None = None, jobs: int = 1, length: float = 1.0,
          min_spacing: float = MIN_SPACING) -> Spectrum:
    """Sample |T|^2 on ``n_base`` uniform points in [lo, hi].

    With ``adaptive`` the grid is bisected wherever neighbouring samples
    differ by more than 0.05 or straddle the real part of a resonance pole,
    until the local spacing drops to ``min_spacing``.  Pole projections are
    computed from the exact denominator for Neumann-Kirchhoff graphs unless
    given explicitly.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise ValueError(f"invalid sweep range [{lo}, {hi}]")
    if n_base < 2:
        raise ValueError("n_base must be at least 2")
    f = t2_function(g, length, jobs)
    kl = np.linspace(lo, hi, n_base)
    t2 = f(kl)
    refined = np.zeros(n_base, dtype=bool)
    if adaptive:
        seeds = np.asarray(_pole_projections(g, lo, hi) if poles is None else sorted(poles), dtype=float)
        while True:
            gap = np.diff(kl)
            steep = np.abs(np.diff(t2)) > DT2_REFINE
            if len(seeds):
                idx = np.searchsorted(kl, seeds)
                straddle = np.zeros(len(gap), dtype=bool)
                inside = (idx > 0) & (idx < len(kl))
                straddle[idx[inside] - 1] = True
                steep |= straddle
            split = steep & (gap > min_spacing)
            if not split.any():
                break
            mids = 0.5 * (kl[:-1][split] + kl[1:][split])
            kl = np.concatenate([kl, mids])
            t2 = np.concatenate([t2, f(mids)])
            refined = np.concatenate([refined, np.ones(len(mids), dtype=bool)])
            order = np.argsort(kl, kind="stable")
            kl, t2, refined = kl[order], t2[order], refined[order]
    return Spectrum(kl, t2, refined, g, length)


def difference(sa: Spectrum, sb: Spectrum) -> DeltaCurve:
    """|T_a|^2 - |T_b|^2 on a shared grid."""
    if len(sa) != len(sb) or not np.array_equal(sa.kl, sb.kl):
        raise ValueError("spectra are sampled on different grids")
    fa, fb = sa.evaluator(), sb.evaluator()
    ev = (lambda x: fa(x) - fb(x)) if fa is not None and fb is not None else None
    return DeltaCurve(sa.kl.copy(), sa.t2 - sb.t2, ev)


def _as_curve(d) -> DeltaCurve:
    if isinstance(d, DeltaCurve):
        return d
    pts = list(d)
    if not pts:
        return DeltaCurve(np.array([]), np.array([]))
    kl, delta = zip(*pts)
    return DeltaCurve(np.asarray(kl, dtype=float), np.asarray(delta, dtype=float))


def zero_crossings(d, tol: float = 1e-6, zero_eps: float = 1e-12) -> list[float]:
    """Abscissas where the difference changes sign.

    Samples with ``|delta| <= zero_eps`` count as zero; a zero only counts
    as a crossing when the nearest nonzero neighbours have opposite signs.
    Brackets are refined by root bracketing to ``tol`` when the curve can
    be re-evaluated, otherwise by linear interpolation.
    """
    c = _as_curve(d)
    if len(c) < 2:
        return []
    sign = np.where(np.abs(c.delta) <= zero_eps, 0, np.sign(c.delta)).astype(int)
    nz = np.flatnonzero(sign)
    out = []
    for i, j in zip(nz[:-1], nz[1:]):
        if sign[i] == sign[j]:
            continue
        a, b = c.kl[i], c.kl[j]
        if j > i + 1:
            # exact zero samples between the bracket
            out.append(float(c.kl[(i + j) // 2]) if c.evaluate is None else
                       float(optimize.brentq(c.evaluate, a, b, xtol=min(tol, 1e-10))))
            continue
        if c.evaluate is not None:
            out.append(float(optimize.brentq(c.evaluate, a, b, xtol=min(tol, 1e-10))))
        else:
            da, db = c.delta[i], c.delta[j]
            out.append(float(a - da * (b - a) / (db - da)))
    return out


def suppression_bands(s: Spectrum, tau: float = 1e-2, min_width: float = 1e-3) -> list[Band]:
    """Maximal intervals where |T|^2 <= tau, endpoints refined on |T|^2 = tau."""
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    below = s.t2 <= tau
    if not below.any():
        return []
    f = s.evaluator()
    bands = []
    edges = np.diff(np.concatenate([[0], below.astype(int), [0]]))
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1) - 1
    for i0, i1 in zip(starts, stops):
        lo, hi = s.kl[i0], s.kl[i1]
        if i0 > 0:
            lo = _level_crossing(s, f, i0 - 1, i0, tau)
        if i1 < len(s) - 1:
            hi = _level_crossing(s, f, i1, i1 + 1, tau)
        if hi - lo < min_width:
            continue
        bands.append(Band(float(lo), float(hi), float(s.t2[i0 : i1 + 1].max()), tau))
    return bands


def _level_crossing(s: Spectrum, f, i: int, j: int, level: float) -> float:
    a, b = s.kl[i], s.kl[j]
    if f is None:
        ya, yb = s.t2[i] - level, s.t2[j] - level
        return a - ya * (b - a) / (yb - ya)
    return optimize.brentq(lambda x: f(x) - level, a, b, xtol=1e-12)


# -- peaks --------------------------------------------------------------------

def find_peaks(g: ScatteringGraph, region: tuple[float, float] = (0.0, TWO_PI), min_height: float = 0.5,
               *, n_base: int = 2001, length: float = 1.0, jobs: int = 1) -> list[Peak]:
    """Local maxima of |T|^2 above ``min_height`` with their FWHM.

    Uses a pole-seeded adaptive sweep so that narrow resonances are
    resolved.  FWHM is ``nan`` when a half-maximum crossing lies outside
    ``region``.
    """
    lo, hi = region
    s = sweep(g, lo, hi, n_base, adaptive=True, jobs=jobs, length=length)
    f = s.evaluator()
    idx, _ = signal.find_peaks(s.t2, height=min_height, prominence=1e-9)
    peaks = []
    for i in idx:
        a, b = s.kl[i - 1], s.kl[i + 1]
        opt = optimize.minimize_scalar(lambda x: -f(x), bounds=(a, b), method="bounded",
                                       options={"xatol": 1e-13})
        x0, y0 = (float(opt.x), -float(opt.fun)) if -opt.fun >= s.t2[i] else (float(s.kl[i]), float(s.t2[i]))
        half = y0 / 2
        left = _half_point(s, f, i, half, -1)
        right = _half_point(s, f, i, half, +1)
        peaks.append(Peak(x0, y0, right - left))
    return peaks


def _half_point(s: Spectrum, f, i: int, half: float, step: int) -> float:
    j = i
    while 0 <= j + step < len(s):
        j += step
        if s.t2[j] < half:
            a, b = sorted((s.kl[j], s.kl[j - step]))
            return optimize.brentq(lambda x: f(x) - half, a, b, xtol=1e-13)
    return math.nan


# -- poles --------------------------------------------------------------------

def find_poles(g: ScatteringGraph, re_range: tuple[float, float] = (0.0, TWO_PI),
               im_max: float = math.inf, tol: float = 1e-10) -> list[Resonance]:
    """Resonance poles from the roots of the reduced transmission denominator.

    Each root ``z`` with ``|z| > 1`` maps to ``kl = -i Log z`` with the real
    part shifted into [0, 2 pi); width is ``2 |Im kl|``.
    """
    if not g.is_neumann_kirchhoff():
        raise GraphError("pole finding needs the exact transmission (all alpha = 0)")
    T = transmission_rational(g)
    re_lo, re_hi = re_range
    out = []
    if T.den.degree < 1:
        return out
    for z in roots(T.den, tol):
        modulus = abs(z)
        if modulus <= 1 + UNIT_CIRCLE_TOL:
            continue
        re = math.atan2(z.imag, z.real) % TWO_PI
        im = -math.log(modulus)
        if not (re_lo <= re <= re_hi) or abs(im) > im_max:
            continue
        out.append(Resonance(complex(re, im), 2 * abs(im), z, relative_residual(T.den, z)))
    out.sort(key=lambda r: (round(r.re, 9), round(r.kl_complex.imag, 9)))
    return out


# -- export -------------------------------------------------------------------

def _write_rows(header: Sequence[str], rows: Iterable[Sequence[float]], comments: Iterable[str] = ()) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    for line in comments:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def spectrum_to_csv(s: Spectrum) -> str:
    return _write_rows(("kl", "t2"), zip(s.kl, s.t2))


def resonances_to_csv(rs: Sequence[Resonance]) -> str:
    return _write_rows(("re_kl", "im_kl", "width", "residual"),
                       ((r.kl_complex.real, r.kl_complex.imag, r.width, r.residual) for r in rs))


def bands_to_csv(bands: Sequence[Band]) -> str:
    return _write_rows(("lo", "hi", "max_t2", "threshold"),
                       ((b.lo, b.hi, b.max_t2_inside, b.threshold) for b in bands))


def peaks_to_csv(peaks: Sequence[Peak]) -> str:
    return _write_rows(("kl", "t2", "fwhm"), ((p.kl, p.t2, p.fwhm) for p in peaks))


def delta_to_csv(d: DeltaCurve, crossings: Sequence[float]) -> str:
    return _write_rows(("kl", "delta"), zip(d.kl, d.delta),
                       (f"crossing,{_fmt(x)}" for x in crossings))
