"""Exact-arithmetic layer, cross-checked against fractions.Fraction."""

from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr, mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from rpmeig.bigmath import (
    Polynomial,
    decimal_str,
    parse_decimal,
    poly_add,
    poly_eval,
    poly_mul,
    rational,
    to_float,
    workprec,
)

rationals = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=40
)
polys = st.lists(rationals, max_size=8).map(Polynomial)


def as_fracs(p: Polynomial):
    return [Fraction(int(c.numerator), int(c.denominator)) for c in p.coeffs]


def frac_poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    while out and out[-1] == 0:
        out.pop()
    return out


class TestRational:
    def test_lowest_terms_and_positive_denominator(self):
        q = rational(6, -4)
        assert q.numerator == -3 and q.denominator == 2

    def test_string_form(self):
        assert rational("-3/9") == mpq(-1, 3)

    def test_exact_comparison(self):
        assert rational(1, 3) + rational(2, 3) == 1


class TestPolynomialBasics:
    def test_trailing_zeros_stripped(self):
        assert Polynomial([1, 2, 0, 0]).coeffs == (mpq(1), mpq(2))

    def test_zero_polynomial_degree(self):
        z = Polynomial()
        assert z.is_zero and z.degree == float("-inf")

    def test_addition_cancellation(self):
        # (e + 1) + (-e) = 1
        assert Polynomial([1, 1]) + Polynomial([0, -1]) == Polynomial([1])

    def test_addition_identity(self):
        p = Polynomial([mpq(1, 2), 3])
        assert Polynomial() + p == p

    def test_rational_coefficient_sum(self):
        # e/3 + 2e/3 = e
        assert Polynomial([0, mpq(1, 3)]) + Polynomial([0, mpq(2, 3)]) == Polynomial([0, 1])

    def test_product_difference_of_squares(self):
        assert Polynomial([1, 1]) * Polynomial([-1, 1]) == Polynomial([-1, 0, 1])

    def test_product_annihilator(self):
        assert (Polynomial([3, 5, 7]) * Polynomial()).is_zero

    def test_scalar_times_linear(self):
        # (2/5) * (e/3) = 2e/15, the alpha=-1/2 pieces g1*g2
        prod = Polynomial([mpq(2, 5)]) * Polynomial([0, mpq(1, 3)])
        assert prod == Polynomial([0, mpq(2, 15)])

    def test_divexact_roundtrip(self):
        a = Polynomial([1, 2, 1])
        b = Polynomial([1, 1])
        assert a.divexact(b) == b

    def test_divexact_rejects_inexact(self):
        with pytest.raises(ValueError):
            Polynomial([1, 0, 1]).divexact(Polynomial([1, 1]))


class TestEvaluation:
    def test_difference_of_squares_root(self):
        p = Polynomial([-1, 0, 1])
        assert poly_eval(p, to_float(1, 128)) == 0

    def test_linear_at_rational_point(self):
        p = Polynomial([0, mpq(1, 3)])
        x = to_float(mpq(-1, 4), 128)
        assert poly_eval(p, x) == to_float(mpq(-1, 12), 128)

    def test_result_precision_matches_input(self):
        p = Polynomial([1, 1, 1])
        out = poly_eval(p, to_float(mpq(1, 3), 190))
        assert out.precision == 190

    @given(polys, rationals)
    @settings(max_examples=120, deadline=None)
    def test_matches_exact_rational_evaluation_within_one_ulp(self, p, xq):
        bits = 96
        x = to_float(mpq(xq), bits)
        got = poly_eval(p, x)
        # exact value of the polynomial at the binary value of x
        exact = p(mpq(x))
        want = to_float(exact, bits)
        if want == 0:
            assert got == 0
        else:
            ulp = abs(want) * mpfr(2) ** (1 - bits)
            assert abs(got - want) <= ulp

    def test_monotone_refinement(self):
        # raising precision never changes digits that were correct at lower bits
        p = Polynomial([mpq(3, 7), mpq(-22, 5), 0, mpq(9, 13), 1])
        for xq in (mpq(1, 3), mpq(-7, 11), mpq(355, 113)):
            lo = poly_eval(p, to_float(xq, 80))
            hi = poly_eval(p, to_float(xq, 320))
            with workprec(340):
                err = abs(mpfr(lo) - mpfr(hi))
            assert err <= abs(hi) * mpfr(2) ** -76


class TestRingAxioms:
    @given(rationals, rationals, rationals)
    @settings(max_examples=80, deadline=None)
    def test_rational_ring_axioms(self, af, bf, cf):
        a, b, c = mpq(af), mpq(bf), mpq(cf)
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a

    @given(polys, polys, polys)
    @settings(max_examples=60, deadline=None)
    def test_polynomial_ring_axioms(self, a, b, c):
        assert poly_add(poly_add(a, b), c) == poly_add(a, poly_add(b, c))
        assert poly_mul(a, poly_add(b, c)) == poly_add(poly_mul(a, b), poly_mul(a, c))
        assert poly_mul(a, b) == poly_mul(b, a)

    @given(polys, polys)
    @settings(max_examples=60, deadline=None)
    def test_product_against_fraction_reference(self, a, b):
        got = as_fracs(poly_mul(a, b))
        want = frac_poly_mul(as_fracs(a), as_fracs(b))
        assert got == want

    @given(polys, polys)
    @settings(max_examples=60, deadline=None)
    def test_product_degree(self, a, b):
        prod = poly_mul(a, b)
        if a.is_zero or b.is_zero:
            assert prod.is_zero
        else:
            assert prod.degree == a.degree + b.degree


class TestDecimalRoundTrip:
    @given(rationals, st.integers(min_value=60, max_value=400))
    @settings(max_examples=80, deadline=None)
    def test_roundtrip_exact(self, xq, bits):
        x = to_float(mpq(xq), bits)
        assert parse_decimal(decimal_str(x), bits) == x

    def test_zero(self):
        assert decimal_str(to_float(0, 64)) == "0"
