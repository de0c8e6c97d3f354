"""Exact rational and multiprecision floating-point scalar arithmetic, plus
dense univariate polynomials over the rationals.

Rationals are gmpy2 ``mpq`` values (always in lowest terms, positive
denominator, exact comparisons).  Floats are gmpy2 ``mpfr`` values; every
``mpfr`` carries the precision it was computed at, and all operations in this
package run inside an explicit precision context supplied by the caller.
There is no module-level precision state.
"""

from __future__ import annotations

import math
from typing import Iterable, Union

import gmpy2
from gmpy2 import mpfr, mpq

__all__ = [
    "BigFloat",
    "BigRational",
    "Polynomial",
    "decimal_str",
    "parse_decimal",
    "poly_add",
    "poly_eval",
    "poly_mul",
    "rational",
    "to_float",
    "workprec",
]

BigRational = type(mpq())
BigFloat = type(mpfr())

RationalLike = Union[int, str, BigRational]

# digits of headroom so that a decimal string reparses to the identical mpfr
_DECIMAL_GUARD = 3


def workprec(bits: int):
    """Context manager running gmpy2 arithmetic at ``bits`` of precision."""
    if bits < 2:
        raise ValueError(f"precision must be at least 2 bits, got {bits}")
    return gmpy2.context(precision=bits)


def rational(num: RationalLike, den: RationalLike = 1) -> BigRational:
    """Exact rational from integers, strings like ``"-3/7"``, or rationals."""
    return mpq(num) / mpq(den) if den != 1 else mpq(num)


def to_float(value, bits: int) -> BigFloat:
    """Round ``value`` (rational, int, float or mpfr) to ``bits`` bits."""
    with workprec(bits):
        return mpfr(value)


def float_bits(x: BigFloat) -> int:
    return x.precision


def decimal_str(x: BigFloat) -> str:
    """Decimal string that reparses (at the same precision) to exactly ``x``."""
    if not gmpy2.is_finite(x):
        return str(x)
    if x == 0:
        return "0"
    ndigits = int(math.ceil(x.precision * math.log10(2))) + _DECIMAL_GUARD
    mantissa, exp10, _ = x.digits(10, ndigits)
    neg = mantissa.startswith("-")
    digits = mantissa[1:] if neg else mantissa
    return ("-" if neg else "") + digits[0] + "." + digits[1:] + f"e{exp10 - 1}"


def parse_decimal(s: str, bits: int) -> BigFloat:
    """Parse a decimal string at ``bits`` bits of precision."""
    with workprec(bits):
        return mpfr(s)


def _as_mpq(value) -> BigRational:
    if isinstance(value, BigRational):
        return value
    return mpq(value)


class Polynomial:
    """Dense univariate polynomial with exact rational coefficients.

    Coefficients are stored ascending by power with no trailing zeros; the
    zero polynomial has an empty coefficient tuple and degree ``-inf``.
    Instances are immutable and hashable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_as_mpq(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @property
    def degree(self) -> float:
        return len(self.coeffs) - 1 if self.coeffs else float("-inf")

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, power: int) -> BigRational:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return mpq(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, BigRational)):
            return self == Polynomial([other])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, BigRational)):
            other = Polynomial([other])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial()
        out = [mpq(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                if cb != 0:
                    out[i + j] += ca * cb
        return Polynomial(out)

    __rmul__ = __mul__

    def __call__(self, x: RationalLike) -> BigRational:
        """Exact evaluation at a rational point."""
        acc = mpq(0)
        xq = _as_mpq(x)
        for c in reversed(self.coeffs):
            acc = acc * xq + c
        return acc

    def evaluate(self, x: BigFloat, bits: int | None = None) -> BigFloat:
        """Horner evaluation at an mpfr point.

        Runs at an internally widened precision and rounds once at the end,
        so the result is within one ulp of the exact value at ``bits`` bits
        (default: the precision carried by ``x``).
        """
        if bits is None:
            bits = x.precision
        guard = 12 + 2 * max(1, len(self.coeffs)).bit_length()
        with workprec(bits + guard):
            acc = mpfr(0)
            for c in reversed(self.coeffs):
                acc = acc * x + mpfr(c)
        with workprec(bits):
            return mpfr(acc)

    def divexact(self, divisor: "Polynomial") -> "Polynomial":
        """Exact polynomial division; raises if the remainder is nonzero."""
        if divisor.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dv = divisor.coeffs
        out = [mpq(0)] * max(0, len(rem) - len(dv) + 1)
        lead = dv[-1]
        while len(rem) >= len(dv):
            k = len(rem) - len(dv)
            c = rem[-1] / lead
            out[k] = c
            for i, d in enumerate(dv):
                rem[k + i] -= c * d
            while rem and rem[-1] == 0:
                rem.pop()
        if rem:
            raise ValueError("inexact polynomial division")
        return Polynomial(out)

    def __repr__(self):
        if self.is_zero:
            return "Polynomial(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*e" if c != 1 else "e")
            else:
                terms.append(f"{c}*e^{i}" if c != 1 else f"e^{i}")
        return "Polynomial(" + " + ".join(terms) + ")"


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    """Exact sum of two polynomials."""
    return a + b


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    """Exact product (convolution) of two polynomials."""
    return a * b


def poly_eval(p: Polynomial, x: BigFloat, bits: int | None = None) -> BigFloat:
    """Evaluate ``p`` at ``x`` to the precision carried by ``x`` (or ``bits``)."""
    return p.evaluate(x, bits)
