"""Vertex scattering amplitudes for delta-type couplings.

Units: hbar^2/2m = 1, so ``alpha`` has the dimension of a wave number.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

__all__ = ["AmplitudePair", "VertexSingularityError", "delta_amplitudes", "nk_amplitudes"]


class VertexSingularityError(ZeroDivisionError):
    """``i k d == alpha``: the vertex amplitudes have a pole."""


class AmplitudePair(NamedTuple):
    r: complex | Fraction
    t: complex | Fraction


def delta_amplitudes(d: int, alpha: float, k: complex) -> AmplitudePair:
    """Reflection and transmission at a degree-``d`` vertex of strength ``alpha``.

    r = (alpha - (d-2) i k) / (i k d - alpha),  t = 2 i k / (i k d - alpha)
    """
    if d < 1:
        raise ValueError(f"vertex degree must be >= 1, got {d}")
    if not math.isfinite(alpha):
        raise ValueError("alpha must be finite")
    ik = 1j * complex(k)
    den = ik * d - alpha
    if den == 0:
        raise VertexSingularityError(f"singular vertex amplitudes at k={k!r} (d={d}, alpha={alpha})")
    return AmplitudePair((alpha - (d - 2) * ik) / den, 2 * ik / den)


def nk_amplitudes(d: int) -> AmplitudePair:
    """Neumann-Kirchhoff amplitudes r = 2/d - 1, t = 2/d as exact fractions."""
    if d < 1:
        raise ValueError(f"vertex degree must be >= 1, got {d}")
    return AmplitudePair(Fraction(2, d) - 1, Fraction(2, d))
