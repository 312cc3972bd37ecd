"""Exact univariate polynomials and rational functions over Q.

Coefficients are stored in ascending order as :class:`fractions.Fraction`.
The indeterminate is printed as ``z``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Sequence

import mpmath
import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dup_inner_gcd

__all__ = [
    "Polynomial",
    "RationalFunction",
    "poly_gcd",
    "gcd_reduce",
    "rf_equal",
    "roots",
]


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, float):
        if not np.isfinite(c):
            raise ValueError(f"non-finite coefficient {c!r}")
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


class Polynomial:
    """Polynomial in ``z`` with exact rational coefficients (ascending).

    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def _raw(cls, coeffs: tuple) -> "Polynomial":
        # trusted constructor: Fractions, already stripped
        p = object.__new__(cls)
        p.coeffs = coeffs
        return p

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "Polynomial":
        if degree < 0:
            raise ValueError("degree must be non-negative")
        return cls([0] * degree + [coeff])

    @classmethod
    def from_ints_desc(cls, coeffs: Sequence[int]) -> "Polynomial":
        return cls(reversed(list(coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Polynomial([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        return format_poly(self)

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(tuple(-c for c in self.coeffs))

    def __add__(self, other) -> "Polynomial":
        other = _coerce_poly(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(out)

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        other = _coerce_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        other = _coerce_poly(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial._raw(())
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        other = _coerce_poly(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Polynomial._raw(()), self
        quot = [Fraction(0)] * (dq + 1)
        lead = other.coeffs[-1]
        m = len(other.coeffs)
        for i in range(dq, -1, -1):
            q = rem[i + m - 1] / lead
            quot[i] = q
            if q:
                for j, c in enumerate(other.coeffs):
                    rem[i + j] -= q * c
        return Polynomial(quot), Polynomial(rem[: m - 1])

    def __floordiv__(self, other) -> "Polynomial":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Polynomial":
        return divmod(self, other)[1]

    def __call__(self, x):
        """Horner evaluation; works for Fractions, complex scalars and arrays."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(x, Fraction) or isinstance(x, int) else float(c))
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def denominator_lcm(self) -> int:
        return reduce(lcm, (c.denominator for c in self.coeffs), 1)

    def primitive(self) -> tuple[Fraction, list[int]]:
        """Split into ``content * primitive`` with integer primitive part.

        The primitive part has coprime integer coefficients and a positive
        leading coefficient; the zero polynomial gives ``(0, [])``.
        """
        if not self.coeffs:
            return Fraction(0), []
        scale = self.denominator_lcm()
        ints = [int(c * scale) for c in self.coeffs]
        g = reduce(gcd, ints, 0)
        if ints[-1] < 0:
            g = -g
        return Fraction(g, scale), [c // g for c in ints]

    def to_mpmath(self) -> list:
        """Descending mpmath coefficients (for polyval/polyroots)."""
        return [mpmath.mpf(c.numerator) / c.denominator for c in reversed(self.coeffs)]


def _coerce_poly(x):
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return Polynomial([x])
    return NotImplemented


def _fmt_coeff(c: Fraction) -> str:
    return str(c) if c.denominator == 1 else f"({c})"


def format_poly(p: Polynomial, var: str = "z") -> str:
    """Descending-order text form, e.g. ``z^4 - 9`` or ``-8z^2``."""
    if not p.coeffs:
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = _fmt_coeff(a)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if a == 1 else f"{_fmt_coeff(a)}{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Greatest common divisor, normalised to a primitive integer polynomial."""
    if not a:
        return Polynomial(b.primitive()[1]) if b else Polynomial()
    if not b:
        return Polynomial(a.primitive()[1])
    _, pa = a.primitive()
    _, pb = b.primitive()
    h, _, _ = dup_inner_gcd(
        [ZZ(c) for c in reversed(pa)], [ZZ(c) for c in reversed(pb)], ZZ
    )
    return Polynomial(Polynomial.from_ints_desc([int(c) for c in h]).primitive()[1])


class RationalFunction:
    """Ratio of two polynomials in ``z`` kept in canonical reduced form.

    Canonical form: ``gcd(num, den) == 1`` and ``den`` is a primitive
    integer polynomial with positive leading coefficient.  Zero is ``0/1``.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, reduce: bool = True):
        num = num if isinstance(num, Polynomial) else Polynomial([num] if not isinstance(num, (list, tuple)) else num)
        if den is None:
            den = Polynomial([1])
        elif not isinstance(den, Polynomial):
            den = Polynomial([den] if not isinstance(den, (list, tuple)) else den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce:
            num, den = _canonical(num, den)
        self.num: Polynomial = num
        self.den: Polynomial = den

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls(Polynomial([c]))

    def __repr__(self) -> str:
        return f"RationalFunction({self.num!s}, {self.den!s})"

    def __str__(self) -> str:
        if self.den == Polynomial([1]):
            return format_poly(self.num)
        num = format_poly(self.num)
        if len([c for c in self.num.coeffs if c]) > 1:
            num = f"({num})"
        return f"{num}/({format_poly(self.den)})"

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Polynomial)):
            other = RationalFunction(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return rf_equal(self, other)

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def is_zero(self) -> bool:
        return not self.num

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den, reduce=False)

    def __add__(self, other) -> "RationalFunction":
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalFunction":
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "RationalFunction":
        return (-self) + other

    def __mul__(self, other) -> "RationalFunction":
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RationalFunction":
        return _coerce_rf(other) / self

    def __call__(self, x):
        """Evaluate at ``x``.

        Exact for ``Fraction``/``int`` arguments.  Complex scalars and arrays
        are evaluated in double precision after scaling the coefficients.
        """
        if isinstance(x, (int, Fraction)):
            d = self.den(Fraction(x))
            if d == 0:
                raise ZeroDivisionError("evaluation at a pole")
            return self.num(Fraction(x)) / d
        scale = max(abs(c) for c in self.den.coeffs)
        num = [float(c / scale) for c in self.num.coeffs]
        den = [float(c / scale) for c in self.den.coeffs]
        x = np.asarray(x, dtype=complex) if not np.isscalar(x) else complex(x)
        return _horner(num, x) / _horner(den, x)

    def evaluate_precise(self, x, dps: int = 40) -> complex:
        """Evaluate a complex scalar with ``dps`` decimal digits of working precision."""
        with mpmath.workdps(dps):
            xm = mpmath.mpc(x)
            val = mpmath.polyval(self.num.to_mpmath() or [0], xm) / mpmath.polyval(self.den.to_mpmath(), xm)
            return complex(val)


def _horner(coeffs: list[float], x):
    acc = 0j if np.isscalar(x) else np.zeros_like(x)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _coerce_rf(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, (int, Fraction, Polynomial)):
        return RationalFunction(x)
    return NotImplemented


def _canonical(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if not num:
        return Polynomial._raw(()), Polynomial([1])
    if den.is_constant():
        c = den.coeffs[0]
        return Polynomial._raw(tuple(a / c for a in num.coeffs)), Polynomial([1])
    g = poly_gcd(num, den)
    if g.degree > 0:
        num = num // g
        den = den // g
    content, prim = den.primitive()
    return Polynomial._raw(tuple(a / content for a in num.coeffs)), Polynomial(prim)


def gcd_reduce(f: RationalFunction) -> RationalFunction:
    """Return the canonical reduced form of ``f`` (idempotent)."""
    return RationalFunction(f.num, f.den, reduce=True)


def rf_equal(f: RationalFunction, g: RationalFunction) -> bool:
    """True iff ``f.num*g.den - g.num*f.den`` is the zero polynomial."""
    return not (f.num * g.den - g.num * f.den)


def roots(p: Polynomial, tol: float = 1e-10, *, polish_dps: int = 50) -> list[complex]:
    """All complex roots of ``p`` with multiplicity.

    Companion-matrix eigenvalues seed a Newton polish carried out in
    ``polish_dps``-digit arithmetic on the exact coefficients.  Each root
    satisfies ``|p(r)| <= tol * sum_i |c_i||r|^i``.  Roots are ordered by
    (real, imag) after rounding to 1e-9.
    """
    if not p:
        raise ValueError("the zero polynomial has no well-defined roots")
    if p.degree < 1:
        return []
    # strip zero roots exactly
    nzero = next(i for i, c in enumerate(p.coeffs) if c != 0)
    core = Polynomial._raw(p.coeffs[nzero:])
    found: list[complex] = [0j] * nzero
    if core.degree >= 1:
        scale = max(abs(c) for c in core.coeffs)
        approx = np.polynomial.polynomial.polyroots([float(c / scale) for c in core.coeffs])
        desc = core.to_mpmath()
        ddesc = core.derivative().to_mpmath()
        with mpmath.workdps(polish_dps):
            absdesc = [abs(c) for c in desc]
            for r0 in approx:
                r = mpmath.mpc(complex(r0))
                for _ in range(60):
                    fv = mpmath.polyval(desc, r)
                    dv = mpmath.polyval(ddesc, r)
                    if dv == 0:
                        break
                    step = fv / dv
                    r -= step
                    if abs(step) <= mpmath.mpf(10) ** (-polish_dps + 10) * max(1, abs(r)):
                        break
                res = abs(mpmath.polyval(desc, r)) / mpmath.polyval(absdesc, abs(r))
                if res > tol:
                    raise ArithmeticError(f"root polish failed to converge (relative residual {float(res):.3g})")
                found.append(complex(r))
    return sorted(found, key=lambda c: (round(c.real, 9), round(c.imag, 9)))


def relative_residual(p: Polynomial, x: complex, dps: int = 50) -> float:
    """``|p(x)| / sum |c_i||x|^i`` evaluated in extended precision."""
    with mpmath.workdps(dps):
        desc = p.to_mpmath()
        xm = mpmath.mpc(x)
        return float(abs(mpmath.polyval(desc, xm)) / mpmath.polyval([abs(c) for c in desc], abs(xm)))
