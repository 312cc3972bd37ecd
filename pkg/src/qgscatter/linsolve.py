"""Exact linear solving over the rational-function field Q(z).

The system is cleared of denominators row by row, giving an integer
polynomial matrix ``M(z)`` and right-hand side ``c(z)``.  Cramer's rule
then expresses every unknown as ``det(M_j) / det(M)``, so all that is
needed are a handful of integer polynomials.  These are recovered by
evaluation at many points modulo word-sized primes (batched Gaussian
elimination in numpy), interpolation, and Chinese remaindering.

The number of primes is fixed in advance from a rigorous coefficient
bound, and the degree from the row degrees, so the result is exact, not
probabilistic.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import reverse_cuthill_mckee
from sympy import prevprime

from .rational import Polynomial, RationalFunction, poly_gcd

__all__ = ["SingularMatrixError", "solve_linear_system", "solve_linear_functional"]

_PRIME_CEILING = 2**31 - 1


class SingularMatrixError(ArithmeticError):
    """The system matrix is singular over Q(z)."""


def _primes():
    p = _PRIME_CEILING + 1
    while True:
        p = prevprime(p)
        yield p


def _poly_lcm(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_constant():
        return b
    if b.is_constant():
        return a
    return (a * b) // poly_gcd(a, b)


def _clear_denominators(A, b) -> tuple[list[list[list[int]]], list[list[int]]]:
    """Scale each row to integer polynomial coefficients (ascending lists)."""
    M, c = [], []
    for row, rhs in zip(A, b):
        entries = list(row) + [rhs]
        den = reduce(_poly_lcm, (e.den for e in entries if not e.is_zero()), Polynomial([1]))
        polys = [e.num * (den // e.den) if not e.is_zero() else Polynomial() for e in entries]
        scale = reduce(lcm, (p.denominator_lcm() for p in polys), 1)
        ints = [[int(x * scale) for x in p.coeffs] for p in polys]
        M.append(ints[:-1])
        c.append(ints[-1])
    return M, c


def _modinv(a: np.ndarray, p: int) -> np.ndarray:
    """Elementwise inverse modulo prime ``p`` via Fermat exponentiation."""
    result = np.ones_like(a)
    base = a % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def _eval_at_points(coef: np.ndarray, pts: np.ndarray, p: int) -> np.ndarray:
    """coef (..., deg+1) residues -> values (P, ...) at ``pts`` mod p."""
    out = np.zeros((len(pts),) + coef.shape[:-1], dtype=np.int64)
    shape = (len(pts),) + (1,) * (coef.ndim - 1)
    z = pts.reshape(shape)
    for d in range(coef.shape[-1] - 1, -1, -1):
        out = (out * z + coef[..., d]) % p
    return out


def _batched_solve_mod(Mv: np.ndarray, cv: np.ndarray, p: int, bl: int, bu: int):
    """Solve M x = c mod p for a batch of banded matrices.

    ``bl``/``bu`` are the lower/upper bandwidths; partial pivoting widens
    the upper band to ``bl + bu``.  Returns (det, det * x, ok mask).
    """
    P, n, _ = Mv.shape
    a = Mv.copy()
    rhs = cv.copy()
    det = np.ones(P, dtype=np.int64)
    ok = np.ones(P, dtype=bool)
    batch = np.arange(P)
    for k in range(n):
        r_end = min(n, k + bl + 1)
        c_end = min(n, k + bl + bu + 1)
        nz = a[:, k:r_end, k] != 0
        has = nz.any(axis=1)
        ok &= has
        piv = k + np.argmax(nz, axis=1)
        swap = piv != k
        if swap.any():
            b, pr = batch[swap], piv[swap]
            row = a[b, k, k:c_end].copy()
            a[b, k, k:c_end] = a[b, pr, k:c_end]
            a[b, pr, k:c_end] = row
            val = rhs[b, k].copy()
            rhs[b, k] = rhs[b, pr]
            rhs[b, pr] = val
            det[b] = (-det[b]) % p
        pivot = a[:, k, k].copy()
        pivot[~has] = 1
        det = det * pivot % p
        if k + 1 < r_end:
            f = a[:, k + 1 : r_end, k] * _modinv(pivot, p)[:, None] % p
            a[:, k + 1 : r_end, k:c_end] = (a[:, k + 1 : r_end, k:c_end] - f[:, :, None] * a[:, None, k, k:c_end]) % p
            rhs[:, k + 1 : r_end] = (rhs[:, k + 1 : r_end] - f * rhs[:, k, None]) % p
    det[~ok] = 0
    x = np.zeros((P, n), dtype=np.int64)
    diag = np.diagonal(a, axis1=1, axis2=2)
    inv_diag = _modinv(np.where(ok[:, None], diag, 1), p)
    for k in range(n - 1, -1, -1):
        c_end = min(n, k + bl + bu + 1)
        s = rhs[:, k]
        if k + 1 < c_end:
            s = (s - (a[:, k, k + 1 : c_end] * x[:, k + 1 : c_end] % p).sum(axis=1)) % p
        x[:, k] = s * inv_diag[:, k] % p
    return det, x * det[:, None] % p, ok


def _band_ordering(M: list[list[list[int]]]) -> tuple[np.ndarray, int, int]:
    """Reverse Cuthill-McKee permutation and the resulting bandwidths."""
    n = len(M)
    pattern = np.array([[bool(e) for e in row] for row in M], dtype=bool) | np.eye(n, dtype=bool)
    perm = reverse_cuthill_mckee(csr_matrix(pattern | pattern.T), symmetric_mode=True)
    i, j = np.nonzero(pattern[np.ix_(perm, perm)])
    return np.asarray(perm), int(max(0, (i - j).max())), int(max(0, (j - i).max()))


def _interpolate_mod(xs: np.ndarray, ys: np.ndarray, p: int) -> np.ndarray:
    """Newton interpolation mod p.  ys (npts, m) -> ascending coeffs (npts, m)."""
    npts = len(xs)
    c = ys.copy() % p
    for j in range(1, npts):
        diff = (xs[j:] - xs[: npts - j]) % p
        c[j:] = (c[j:] - c[j - 1 : npts - 1]) * _modinv(diff, p)[:, None] % p
    # expand Newton form: c0 + c1 (z-x0) + c2 (z-x0)(z-x1) + ...
    coef = np.zeros_like(c)
    coef[0] = c[npts - 1]
    deg = 0
    for j in range(npts - 2, -1, -1):
        # coef <- coef * (z - x_j) + c_j
        shifted = np.zeros_like(coef)
        shifted[1 : deg + 2] = coef[: deg + 1]
        shifted[: deg + 1] = (shifted[: deg + 1] - coef[: deg + 1] * xs[j]) % p
        shifted[0] = (shifted[0] + c[j]) % p
        coef = shifted
        deg += 1
    return coef


def _crt_pair(r1: list[int], m1: int, r2: np.ndarray, m2: int) -> list[int]:
    inv = pow(m1, -1, m2)
    return [a + m1 * (((int(b) - a) * inv) % m2) for a, b in zip(r1, r2)]


def _solve_integer_system(M: list[list[list[int]]], c: list[list[int]]):
    """Return (det, [det(M_j)]) as ascending integer coefficient lists."""
    n = len(M)
    if n == 0:
        return [1], []
    rows_deg = []
    bound = 1
    for i in range(n):
        degs = [len(e) - 1 for e in M[i] if e] + ([len(c[i]) - 1] if c[i] else [])
        rows_deg.append(max(degs) if degs else 0)
        l1 = sum(abs(x) for e in M[i] for x in e) + sum(abs(x) for x in c[i])
        bound *= max(l1, 1)
    degree = sum(rows_deg)
    perm, bl, bu = _band_ordering(M)
    M = [[M[i][j] for j in perm] for i in perm]
    c = [c[i] for i in perm]
    width = max([len(e) for row in M for e in row] + [len(e) for e in c] + [1])

    coefM = [[[0] * width for _ in range(n)] for _ in range(n)]
    coefc = [[0] * width for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for d, x in enumerate(M[i][j]):
                coefM[i][j][d] = x
        for d, x in enumerate(c[i]):
            coefc[i][d] = x

    # a nonzero coefficient is divisible by at most this many of our primes
    max_unlucky = bound.bit_length() // 30 + 1
    residues: list[int] | None = None
    modulus = 1
    unlucky = 0
    npts = degree + 1
    rng = np.random.default_rng(20191)
    for p in _primes():
        if modulus > 2 * bound:
            break
        cM = np.array([[[x % p for x in e] for e in row] for row in coefM], dtype=np.int64)
        cc = np.array([[x % p for x in e] for e in coefc], dtype=np.int64)
        xs_all, vals = [], []
        tried: set[int] = set()
        for _attempt in range(4):
            need = npts - sum(len(x) for x in xs_all)
            if need <= 0:
                break
            cand = []
            while len(cand) < need + 2:
                v = int(rng.integers(1, p))
                if v not in tried:
                    tried.add(v)
                    cand.append(v)
            pts = np.array(cand, dtype=np.int64)
            det, y, ok = _batched_solve_mod(_eval_at_points(cM, pts, p), _eval_at_points(cc, pts, p), p, bl, bu)
            xs_all.append(pts[ok])
            vals.append(np.concatenate([det[ok, None], y[ok]], axis=1))
        xs = np.concatenate(xs_all)[:npts]
        if len(xs) < npts:
            unlucky += 1
            if unlucky > max_unlucky:
                raise SingularMatrixError("matrix is singular over Q(z)")
            continue
        ys = np.concatenate(vals)[:npts]
        coef = _interpolate_mod(xs, ys, p)  # (npts, n+1)
        flat = coef.T.reshape(-1)
        if residues is None:
            residues, modulus = [int(v) for v in flat], p
        else:
            residues = _crt_pair(residues, modulus, flat, p)
            modulus *= p
    half = modulus // 2
    signed = [r - modulus if r > half else r for r in residues]
    polys = [signed[k * npts : (k + 1) * npts] for k in range(n + 1)]
    if not any(polys[0]):
        raise SingularMatrixError("matrix is singular over Q(z)")
    nums = [None] * n
    for pos, j in enumerate(perm):
        nums[j] = polys[pos + 1]
    return polys[0], nums


def _validate(A, b) -> tuple[list[list[RationalFunction]], list[RationalFunction]]:
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("matrix must be square")
    if len(b) != n:
        raise ValueError("right-hand side length does not match the matrix")
    conv = lambda e: e if isinstance(e, RationalFunction) else RationalFunction(e)
    return [[conv(e) for e in row] for row in A], [conv(e) for e in b]


def solve_linear_system(A: Sequence[Sequence], b: Sequence) -> list[RationalFunction]:
    """Exact solution of ``A x = b`` with entries in Q(z).

    Raises :class:`SingularMatrixError` when ``det A`` vanishes identically.
    """
    A, b = _validate(A, b)
    if not A:
        return []
    M, c = _clear_denominators(A, b)
    det, nums = _solve_integer_system(M, c)
    den = Polynomial(det)
    return [RationalFunction(Polynomial(y), den) for y in nums]


def solve_linear_functional(A: Sequence[Sequence], b: Sequence, weights: dict[int, Fraction]) -> RationalFunction:
    """``sum_j weights[j] * x_j`` for the solution of ``A x = b``, reduced once."""
    A, b = _validate(A, b)
    if not A:
        return RationalFunction(0)
    M, c = _clear_denominators(A, b)
    det, nums = _solve_integer_system(M, c)
    acc = [Fraction(0)] * len(det)
    for j, w in weights.items():
        w = Fraction(w)
        for d, y in enumerate(nums[j]):
            acc[d] += w * y
    return RationalFunction(Polynomial(acc), Polynomial(det))
