"""Path-family linear system and global transmission/reflection amplitudes.

One unknown per directed half-edge ``h = (u -> v)``: the sum over all
paths that leave ``u`` along the edge and eventually exit through the
target lead.  Arriving at ``v`` the path either reflects back along the
same edge (``r_v``), transmits onto any other edge leaving ``v``
(``t_v``), or, if ``v`` carries the target lead, leaves the graph
(``t_v``).  Edge ``e`` with multiplier ``m`` contributes ``z**m`` with
``z = exp(i k ell)``.

Half-edge ``2*e`` runs ``u -> v`` of edge ``e`` and ``2*e + 1`` runs back.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .amplitudes import AmplitudePair, delta_amplitudes, nk_amplitudes
from .graph import GraphError, ScatteringGraph, validate
from .linsolve import solve_linear_functional
from .rational import Polynomial, RationalFunction

__all__ = [
    "SolverError",
    "HalfEdge",
    "PathFamilySystem",
    "assemble",
    "transmission",
    "reflection",
    "transmission_rational",
    "coefficient",
]

_RESIDUAL_TOL = 1e-10
# circle radius (in k) for the mean-value fallback at exactly singular points
_CONTOUR_RADIUS = 1e-6
_CONTOUR_POINTS = 16
# relative spread on that circle above which the point is a pole, not removable
_POLE_SPREAD = 1e-3
# cap on batch_size * n**2 complex entries held at once
_BATCH_ELEMENTS = 4_000_000


class SolverError(ArithmeticError):
    """The path-family system could not be solved to tolerance."""


@dataclass(frozen=True)
class HalfEdge:
    edge: int
    tail: object
    head: object
    mult: int


@dataclass(frozen=True)
class _Structure:
    half_edges: tuple[HalfEdge, ...]
    # sparse pattern of the off-diagonal terms: row h, column h', vertex index, is_reflection
    rows: np.ndarray
    cols: np.ndarray
    vert: np.ndarray
    is_refl: np.ndarray
    mult: np.ndarray
    rhs_rows: np.ndarray
    entrance_out: np.ndarray
    vertex_ids: tuple
    degrees: np.ndarray
    alphas: np.ndarray
    entrance_idx: int
    target_idx: int


@lru_cache(maxsize=128)
def _structure(g: ScatteringGraph, target) -> _Structure:
    report = validate(g)
    if not report.ok:
        raise GraphError("; ".join(report.problems))
    vids = tuple(g.vertex_ids)
    index = {v: i for i, v in enumerate(vids)}
    half: list[HalfEdge] = []
    for e in g.edges:
        half.append(HalfEdge(e.id, e.u, e.v, e.mult))
        half.append(HalfEdge(e.id, e.v, e.u, e.mult))
    out: dict = {v: [] for v in vids}
    for h, he in enumerate(half):
        out[he.tail].append(h)
    rows, cols, vert, refl = [], [], [], []
    for h, he in enumerate(half):
        for h2 in out[he.head]:
            rows.append(h)
            cols.append(h2)
            vert.append(index[he.head])
            refl.append(h2 == (h ^ 1))
    degs = g.degrees()
    return _Structure(
        half_edges=tuple(half),
        rows=np.array(rows, dtype=int),
        cols=np.array(cols, dtype=int),
        vert=np.array(vert, dtype=int),
        is_refl=np.array(refl, dtype=bool),
        mult=np.array([he.mult for he in half], dtype=float),
        rhs_rows=np.array([h for h, he in enumerate(half) if he.head == target], dtype=int),
        entrance_out=np.array(out[g.entrance], dtype=int),
        vertex_ids=vids,
        degrees=np.array([degs[v] for v in vids], dtype=int),
        alphas=np.array([g.alpha(v) for v in vids], dtype=float),
        entrance_idx=index[g.entrance],
        target_idx=index[target],
    )


@dataclass
class PathFamilySystem:
    """``matrix @ p = rhs`` over the directed half-edges.

    Numeric systems hold complex numpy arrays; exact systems hold nested
    lists of :class:`RationalFunction`.
    """

    half_edges: tuple[HalfEdge, ...]
    matrix: object
    rhs: object
    exact: bool
    target: object
    k: complex | None = None

    @property
    def size(self) -> int:
        return len(self.half_edges)


def _amplitudes(s: _Structure, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-vertex (r, t) arrays of shape (K, V)."""
    K, V = len(k), len(s.vertex_ids)
    r = np.empty((K, V), dtype=complex)
    t = np.empty((K, V), dtype=complex)
    for j in range(V):
        d, a = int(s.degrees[j]), float(s.alphas[j])
        if a == 0:
            nk = nk_amplitudes(d)
            r[:, j], t[:, j] = float(nk.r), float(nk.t)
        else:
            ik = 1j * k
            den = ik * d - a
            if np.any(den == 0):
                # raises VertexSingularityError with a useful message
                delta_amplitudes(d, a, complex(k[np.flatnonzero(den == 0)[0]]))
            r[:, j] = (a - (d - 2) * ik) / den
            t[:, j] = 2 * ik / den
    return r, t


def _numeric_system(s: _Structure, k: np.ndarray, length: float):
    n = len(s.half_edges)
    K = len(k)
    r, t = _amplitudes(s, k)
    z = np.exp(1j * np.outer(k * length, s.mult))  # (K, n)
    A = np.zeros((K, n, n), dtype=complex)
    A[:, np.arange(n), np.arange(n)] = 1.0
    amp = np.where(s.is_refl[None, :], r[:, s.vert], t[:, s.vert])
    A[:, s.rows, s.cols] -= z[:, s.rows] * amp
    b = np.zeros((K, n), dtype=complex)
    if len(s.rhs_rows):
        b[:, s.rhs_rows] = z[:, s.rhs_rows] * t[:, [s.target_idx]]
    return A, b, r, t


def _check_residual(A, b, x):
    res = np.linalg.norm(np.einsum("kij,kj->ki", A, x) - b, axis=1)
    scale = np.linalg.norm(A, axis=(1, 2)) * np.linalg.norm(x, axis=1) + np.linalg.norm(b, axis=1)
    bad = res > _RESIDUAL_TOL * scale
    if np.any(bad):
        raise SolverError(f"residual {res[bad].max():.3g} exceeds tolerance")


def _solve_chunk(s: _Structure, k: np.ndarray, length: float):
    """Return (S, r_entrance, t_entrance) where S = t_i * sum over out(i) of p."""
    A, b, r, t = _numeric_system(s, k, length)
    n = A.shape[1]
    if n == 0:
        x = np.zeros((len(k), 0), dtype=complex)
    else:
        try:
            x = np.linalg.solve(A, b[..., None])[..., 0]
        except np.linalg.LinAlgError:
            x = np.empty_like(b)
            for i in range(len(k)):
                try:
                    x[i] = np.linalg.solve(A[i], b[i])
                except np.linalg.LinAlgError:
                    x[i] = np.nan
        ok = np.all(np.isfinite(x), axis=1)
        if np.any(ok):
            _check_residual(A[ok], b[ok], x[ok])
    ti = t[:, s.entrance_idx]
    S = ti * x[:, s.entrance_out].sum(axis=1)
    return S, r[:, s.entrance_idx], ti


def _path_sum(g: ScatteringGraph, k, target, length: float):
    s = _structure(g, target)
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    n = len(s.half_edges)
    chunk = max(1, _BATCH_ELEMENTS // max(n * n, 1))
    S = np.empty(len(k), dtype=complex)
    r_i = np.empty(len(k), dtype=complex)
    t_i = np.empty(len(k), dtype=complex)
    for lo in range(0, len(k), chunk):
        sl = slice(lo, lo + chunk)
        S[sl], r_i[sl], t_i[sl] = _solve_chunk(s, k[sl], length)
    bad = ~np.isfinite(S)
    if np.any(bad):
        # exactly singular system (embedded eigenvalue decoupled from the
        # leads): the amplitude is analytic there, so take its mean on a
        # small circle around k
        for i in np.flatnonzero(bad):
            ring = k[i] + _CONTOUR_RADIUS * np.exp(2j * np.pi * np.arange(_CONTOUR_POINTS) / _CONTOUR_POINTS)
            Sr, rr, tr = _solve_chunk(s, ring, length)
            if not np.all(np.isfinite(Sr)):
                raise SolverError(f"path-family system singular near k={k[i]!r}")
            mean = Sr.mean()
            if np.abs(Sr - mean).max() > _POLE_SPREAD * (1 + abs(mean)):
                # ring values blow up like 1/radius: a genuine pole of T
                S[i] = complex(np.inf, np.inf)
            else:
                S[i] = mean
            r_i[i], t_i[i] = rr.mean(), tr.mean()
    return S, r_i, t_i


def _require_leads(g: ScatteringGraph):
    if g.entrance is None or g.exit is None:
        raise GraphError("scattering needs both an entrance and an exit lead")


def transmission(g: ScatteringGraph, k, length: float = 1.0):
    """Global transmission amplitude T(k); ``k`` may be complex or an array.

    With the default ``length=1`` the argument is the dimensionless k*ell.
    """
    _require_leads(g)
    scalar = np.ndim(k) == 0
    S, _, t_i = _path_sum(g, k, g.exit, length)
    T = S + t_i if g.entrance == g.exit else S
    return complex(T[0]) if scalar else T


def reflection(g: ScatteringGraph, k, length: float = 1.0):
    """Reflection amplitude back into the entrance lead.

    Uses the same recursion with the target lead placed on the entrance
    vertex: R = r_i + t_i * sum of path families leaving i.
    """
    _require_leads(g)
    scalar = np.ndim(k) == 0
    S, r_i, _ = _path_sum(g, k, g.entrance, length)
    R = r_i + S
    return complex(R[0]) if scalar else R


def coefficient(t) -> float:
    """Squared modulus |t|^2."""
    return np.abs(t) ** 2 if np.ndim(t) else abs(t) ** 2


def assemble(g: ScatteringGraph, k: complex | None = None, *, exact: bool = False,
             length: float = 1.0, target=None) -> PathFamilySystem:
    """Build the path-family system numerically at ``k`` or exactly in ``z``.

    ``target`` defaults to the exit vertex; passing the entrance vertex
    gives the system behind :func:`reflection`.
    """
    _require_leads(g)
    target = g.exit if target is None else target
    s = _structure(g, target)
    n = len(s.half_edges)
    if not exact:
        if k is None:
            raise ValueError("numeric assembly needs a wave number k")
        A, b, _, _ = _numeric_system(s, np.array([complex(k)]), length)
        return PathFamilySystem(s.half_edges, A[0], b[0], False, target, complex(k))
    if not g.is_neumann_kirchhoff():
        raise GraphError("exact mode requires Neumann-Kirchhoff vertices (all alpha = 0)")
    amps = [nk_amplitudes(int(d)) for d in s.degrees]
    zero = RationalFunction(0)
    one = RationalFunction(1)
    zpow = {m: Polynomial.monomial(int(m)) for m in set(s.mult.tolist())}
    A = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for row, col, v, refl in zip(s.rows, s.cols, s.vert, s.is_refl):
        a = amps[v].r if refl else amps[v].t
        if a == 0:
            continue
        term = RationalFunction(zpow[s.mult[row]] * (-a))
        A[row][col] = term if A[row][col] is zero else A[row][col] + term
    b = [zero] * n
    t_target = amps[s.target_idx].t
    for h in s.rhs_rows:
        b[h] = RationalFunction(zpow[s.mult[h]] * t_target)
    return PathFamilySystem(s.half_edges, A, b, True, target)


@lru_cache(maxsize=64)
def transmission_rational(g: ScatteringGraph) -> RationalFunction:
    """Exact T(z), reduced, for a Neumann-Kirchhoff graph.

    Results are memoised per graph; treat the returned object as read-only.
    """
    system = assemble(g, exact=True)
    s = _structure(g, g.exit)
    t_i: Fraction = nk_amplitudes(int(s.degrees[s.entrance_idx])).t
    weights = {int(h): t_i for h in s.entrance_out}
    T = solve_linear_functional(system.matrix, system.rhs, weights)
    if g.entrance == g.exit:
        T = T + RationalFunction(t_i)
    return T


def vertex_amplitudes(g: ScatteringGraph, v, k: complex) -> AmplitudePair:
    """Amplitudes used by the solver at vertex ``v`` (NK vertices are k-independent)."""
    d = g.degrees()[v]
    a = g.alpha(v)
    return nk_amplitudes(d) if a == 0 else delta_amplitudes(d, a, k)
