"""Quantization machinery for the radial problem -u'' + [l(l+1)/r^2 + sigma*r^alpha]u = eps*u.

For a rational exponent alpha = p/q the substitution z = r^(1/q) turns the
regularized logarithmic derivative of u into a power series g(z) = sum g_n z^n
whose coefficients g_n are polynomials in the dimensionless energy eps,
generated by an exact rational recurrence.  Candidate energies are the roots
of Hankel determinants built from those coefficients.  This module builds the
coefficient tables and evaluates the determinants; root hunting lives in
:mod:`rpmeig.eigensolve`.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Sequence

import gmpy2
from gmpy2 import mpfr, mpq

from .bigmath import BigFloat, BigRational, Polynomial, workprec

__all__ = [
    "CoefficientTable",
    "DetValue",
    "DomainError",
    "ExponentSpec",
    "ProblemSpec",
    "TableTooShortError",
    "UnitScale",
    "build_coefficients",
    "compress_parity",
    "hankel_det_exact",
    "hankel_det_value",
    "hankel_matrix_indices",
    "min_table_length",
    "reduce_exponent",
    "scale_to_physical",
]

# exact Hankel expansion is a testing oracle; polynomial determinants blow up fast
EXACT_HANKEL_MAX_DIM = 8


class DomainError(ValueError):
    """Raised for potentials outside the supported range (alpha >= -1, alpha != 0)."""


class TableTooShortError(ValueError):
    """Raised when a coefficient table cannot supply a requested index."""


@dataclass(frozen=True)
class ExponentSpec:
    """Reduced rational exponent alpha = p/q with the sign of the coupling.

    ``parity_odd`` is true when both q and p+q are odd; in that case g(z) is
    an odd series and only the coefficients with odd index survive.
    """

    p: int
    q: int
    sigma: int
    parity_odd: bool

    @property
    def alpha(self) -> BigRational:
        return mpq(self.p, self.q)

    def __str__(self):
        sgn = "+" if self.sigma > 0 else "-"
        return f"V(r)={sgn}r^({self.p}/{self.q})"


@dataclass(frozen=True)
class ProblemSpec:
    """An exponent plus the angular momentum quantum number."""

    exponent: ExponentSpec
    l: int

    def __post_init__(self):
        if self.l < 0:
            raise DomainError(f"angular momentum must be >= 0, got {self.l}")


def reduce_exponent(p_raw: int, q_raw: int, sigma: int) -> ExponentSpec:
    """Validate and reduce alpha = p_raw/q_raw to lowest terms with q > 0.

    Rejects alpha < -1 (the series solution does not exist there), alpha = 0
    (no potential), and a ``sigma`` inconsistent with the sign of alpha: the
    dimensionless reduction forces V = sigma*r^alpha with sigma = sign(alpha).
    """
    if q_raw == 0:
        raise DomainError("exponent denominator must be nonzero")
    if sigma not in (-1, 1):
        raise DomainError(f"sigma must be +1 or -1, got {sigma}")
    p, q = p_raw, q_raw
    if q < 0:
        p, q = -p, -q
    if p == 0:
        raise DomainError("alpha = 0 does not define a potential")
    g = math.gcd(abs(p), q)
    p //= g
    q //= g
    if p + q < 0:
        raise DomainError(f"alpha = {p}/{q} < -1 is outside the supported range")
    if (1 if p > 0 else -1) != sigma:
        raise DomainError(
            f"sigma={sigma:+d} inconsistent with alpha = {p}/{q}; "
            "bound states require sigma = sign(alpha)"
        )
    parity_odd = (q % 2 == 1) and ((p + q) % 2 == 1)
    return ExponentSpec(p=p, q=q, sigma=sigma, parity_odd=parity_odd)


class CoefficientTable:
    """The series coefficients g_0..g_n_max for one problem, as polynomials in eps.

    ``compressed`` tables hold only the odd-index coefficients (entry j is
    g_{2j+1} of the parent table); they are what the determinant assembly
    consumes for parity-odd exponents, where the effective expansion variable
    is z^2.
    """

    __slots__ = ("spec", "coeffs", "n_max", "compressed", "_float_cache", "_cache_lock")

    def __init__(self, spec: ProblemSpec, coeffs: Sequence[Polynomial], compressed: bool = False):
        self.spec = spec
        self.coeffs = tuple(coeffs)
        self.n_max = len(self.coeffs) - 1
        self.compressed = compressed
        self._float_cache: dict[int, list[tuple]] = {}
        self._cache_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.coeffs)

    def entry(self, n: int) -> Polynomial:
        if not 0 <= n <= self.n_max:
            raise TableTooShortError(
                f"index {n} outside table (n_max={self.n_max}, compressed={self.compressed})"
            )
        return self.coeffs[n]

    def hankel_view(self) -> "CoefficientTable":
        """The table the determinants should be built from for this problem."""
        if self.spec.exponent.parity_odd and not self.compressed:
            return compress_parity(self)
        return self

    def float_coeffs(self, bits: int) -> list[tuple]:
        """Per-entry coefficient tuples rounded to ``bits`` bits, cached."""
        cached = self._float_cache.get(bits)
        if cached is not None:
            return cached
        with self._cache_lock:
            cached = self._float_cache.get(bits)
            if cached is None:
                with workprec(bits):
                    cached = [tuple(mpfr(c) for c in p.coeffs) for p in self.coeffs]
                self._float_cache[bits] = cached
        return cached


_RECURRENCE_CACHE: dict[tuple[int, int, int, int], list[Polynomial]] = {}
_RECURRENCE_LOCK = threading.Lock()


def _extend_recurrence(spec: ProblemSpec, n_max: int) -> list[Polynomial]:
    """Grow (and cache) the raw coefficient list for ``spec`` up to ``n_max``.

    Implements the exact recurrence

        g_n = [ sum_{j=0}^{n-q} g_j g_{n-q-j}  (present when n >= q)
                + eps * delta(n, q) - sigma * delta(n, p+q) ] / (2l + n/q + 2)

    with the divisor handled as the exact rational (2lq + n + 2q)/q.
    """
    ex = spec.exponent
    key = (ex.p, ex.q, ex.sigma, spec.l)
    with _RECURRENCE_LOCK:
        gs = _RECURRENCE_CACHE.setdefault(key, [])
        p, q, sigma, l = ex.p, ex.q, ex.sigma, spec.l
        for n in range(len(gs), n_max + 1):
            m = n - q
            if m >= 0:
                acc_len = 1 + max(
                    (len(gs[j].coeffs) + len(gs[m - j].coeffs) - 2
                     for j in range(m // 2 + 1)
                     if gs[j].coeffs and gs[m - j].coeffs),
                    default=0,
                )
                acc = [mpq(0)] * max(acc_len, 2)
                for j in range(m // 2 + 1):
                    k = m - j
                    a, b = gs[j].coeffs, gs[k].coeffs
                    if not a or not b:
                        continue
                    scale = 1 if 2 * j == m else 2
                    for ia, ca in enumerate(a):
                        if ca == 0:
                            continue
                        if scale == 2:
                            ca = ca + ca
                        for ib, cb in enumerate(b):
                            if cb != 0:
                                acc[ia + ib] += ca * cb
            else:
                acc = [mpq(0), mpq(0)]
            if n == q:
                acc[1] += 1
            if n == p + q:
                acc[0] -= sigma
            inv = mpq(q, 2 * l * q + n + 2 * q)
            gs.append(Polynomial([c * inv for c in acc]))
        return gs


def build_coefficients(spec: ProblemSpec, n_max: int) -> CoefficientTable:
    """Coefficient table g_0..g_n_max for ``spec``, computed exactly.

    Tables are cached per problem and extended in place, so asking for a
    longer table reuses all previously computed entries.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    gs = _extend_recurrence(spec, n_max)
    return CoefficientTable(spec, gs[: n_max + 1])


def compress_parity(table: CoefficientTable) -> CoefficientTable:
    """Re-index a parity-odd table to its nonzero entries: entry j = g_{2j+1}."""
    if not table.spec.exponent.parity_odd:
        raise DomainError("parity compression requires q and p+q both odd")
    if table.compressed:
        raise DomainError("table is already parity-compressed")
    odd = [table.coeffs[n] for n in range(1, table.n_max + 1, 2)]
    return CoefficientTable(table.spec, odd, compressed=True)


def hankel_matrix_indices(D: int, d: int) -> list[list[int]]:
    """Coefficient indices i+j+d-1 (i, j = 1..D) of the D x D determinant."""
    if D < 1:
        raise ValueError(f"D must be >= 1, got {D}")
    if d < 0:
        raise ValueError(f"d must be >= 0, got {d}")
    return [[i + j + d - 1 for j in range(1, D + 1)] for i in range(1, D + 1)]


def min_table_length(D: int, d: int, parity_odd: bool) -> int:
    """Smallest n_max an uncompressed table needs for the D x D determinant."""
    top = 2 * D + d - 1
    return 2 * top + 1 if parity_odd else top


@dataclass(frozen=True)
class DetValue:
    """A determinant value together with its evaluation noise floor.

    ``indeterminate`` marks values whose magnitude fell below the rounding
    floor of the elimination: the sign cannot be trusted and callers that
    need it must retry at higher precision.
    """

    value: BigFloat
    floor: BigFloat
    indeterminate: bool

    def __float__(self) -> float:
        return float(self.value)

    @property
    def sign(self) -> int:
        """Reliable sign: +1/-1, or 0 when indeterminate."""
        if self.indeterminate:
            return 0
        return gmpy2.sign(self.value)


def _ldexp(x: BigFloat, e: int) -> BigFloat:
    """Exact scaling x * 2**e."""
    if e >= 0:
        return gmpy2.mul_2exp(x, e)
    return gmpy2.div_2exp(x, -e)


def _det_with_floor(entries, entry_errs, bits_internal: int):
    """Full-pivot LU determinant with power-of-two equilibration.

    ``entry_errs[i][j]`` bounds the absolute error already present in
    ``entries[i][j]`` (coefficient rounding plus Horner accumulation).
    Returns (det, floor): ``floor`` estimates the magnitude below which the
    computed determinant is indistinguishable from that input noise plus the
    elimination's own rounding.
    """
    n = len(entries)
    M = [row[:] for row in entries]
    E = [row[:] for row in entry_errs]
    shift = 0
    # row/column scaling by powers of two keeps values exact
    for i in range(n):
        rmax = max(abs(x) for x in M[i])
        if rmax == 0:
            rmax = max(E[i])
            if rmax == 0:
                return mpfr(0), mpfr(0)
        e = gmpy2.get_exp(rmax)
        shift += e
        if e:
            M[i] = [_ldexp(x, -e) if x != 0 else x for x in M[i]]
            E[i] = [_ldexp(x, -e) if x != 0 else x for x in E[i]]
    for j in range(n):
        cmax = max(abs(M[i][j]) for i in range(n))
        if cmax == 0:
            cmax = max(E[i][j] for i in range(n))
            if cmax == 0:
                return mpfr(0), mpfr(0)
        e = gmpy2.get_exp(cmax)
        if e:
            shift += e
            for i in range(n):
                if M[i][j] != 0:
                    M[i][j] = _ldexp(M[i][j], -e)
                if E[i][j] != 0:
                    E[i][j] = _ldexp(E[i][j], -e)
    noise = max(max(row) for row in E)
    noise = max(noise, _ldexp(mpfr(1), -(bits_internal - 2)))
    sign = 1
    det = mpfr(1)
    growth = mpfr(1)
    prod_exlast = mpfr(1)
    for k in range(n):
        pi, pj, pv = k, k, abs(M[k][k])
        for i in range(k, n):
            row = M[i]
            for j in range(k, n):
                a = abs(row[j])
                if a > pv:
                    pi, pj, pv = i, j, a
        if pv == 0:
            det = mpfr(0)
            break
        if pv > growth:
            growth = pv
        if pi != k:
            M[pi], M[k] = M[k], M[pi]
            sign = -sign
        if pj != k:
            for row in M:
                row[pj], row[k] = row[k], row[pj]
            sign = -sign
        piv = M[k][k]
        if k < n - 1:
            prod_exlast *= piv
        det *= piv
        for i in range(k + 1, n):
            f = M[i][k] / piv
            if f == 0:
                continue
            Mi, Mk = M[i], M[k]
            for j in range(k + 1, n):
                Mi[j] -= f * Mk[j]
    if sign < 0:
        det = -det
    # with full pivoting the cancellation concentrates in the last pivot, so
    # the determinant noise is roughly the remaining product times the
    # entry/rounding noise amplified by the elimination growth
    floor = abs(prod_exlast) * growth * noise * (n * n + 4)
    return _ldexp(det, shift), _ldexp(floor, shift)


def hankel_det_value(
    table: CoefficientTable, D: int, d: int, eps: BigFloat, bits: int | None = None
) -> DetValue:
    """Evaluate the D x D determinant with entries g_{i+j+d-1} at ``eps``.

    The coefficient entries are evaluated by Horner at the working precision
    and eliminated with full pivoting at a slightly widened internal
    precision, then rounded once.  Deterministic for fixed inputs and
    precision.  Raises :class:`TableTooShortError` if the table cannot
    supply index 2D+d-1.
    """
    if bits is None:
        bits = eps.precision
    top = 2 * D + d - 1
    if top > table.n_max:
        raise TableTooShortError(
            f"determinant needs index {top}, table holds n_max={table.n_max}"
        )
    bits_internal = bits + 32 + 2 * D
    bits_internal += (-bits_internal) % 64  # quantize so float caches are shared
    fcoeffs = table.float_coeffs(bits_internal)
    with workprec(bits_internal):
        x = mpfr(eps)
        ax = abs(x)
        values = {}
        errs = {}
        err_unit = _ldexp(mpfr(1), -(bits_internal - 2))
        for n in range(d, top + 1):
            acc = mpfr(0)
            cond = mpfr(0)  # sum |c_k| |x|^k bounds the evaluation error
            for c in reversed(fcoeffs[n]):
                acc = acc * x + c
                cond = cond * ax + abs(c)
            values[n] = acc
            errs[n] = cond * err_unit * (len(fcoeffs[n]) + 1)
        entries = [[values[i + j + d - 1] for j in range(1, D + 1)] for i in range(1, D + 1)]
        entry_errs = [[errs[i + j + d - 1] for j in range(1, D + 1)] for i in range(1, D + 1)]
        det, floor = _det_with_floor(entries, entry_errs, bits_internal)
        indeterminate = (det != 0 and abs(det) < floor) or (det == 0 and floor != 0)
    with workprec(bits):
        return DetValue(mpfr(det), mpfr(floor), bool(indeterminate))


def hankel_det_exact(table: CoefficientTable, D: int, d: int) -> Polynomial:
    """The determinant as an exact polynomial in eps (testing oracle).

    Uses fraction-free Bareiss elimination over the polynomial ring and is
    deliberately capped at D <= 8; beyond that the exact expansion is
    intractable and the numeric path is the only sensible route.
    """
    if D > EXACT_HANKEL_MAX_DIM:
        raise ValueError(f"exact Hankel determinant capped at D={EXACT_HANKEL_MAX_DIM}")
    top = 2 * D + d - 1
    if top > table.n_max:
        raise TableTooShortError(
            f"determinant needs index {top}, table holds n_max={table.n_max}"
        )
    M = [[table.coeffs[i + j + d - 1] for j in range(1, D + 1)] for i in range(1, D + 1)]
    sign = 1
    prev = Polynomial([1])
    for k in range(D - 1):
        if M[k][k].is_zero:
            for i in range(k + 1, D):
                if not M[i][k].is_zero:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return Polynomial()
        for i in range(k + 1, D):
            for j in range(k + 1, D):
                num = M[k][k] * M[i][j] - M[i][k] * M[k][j]
                M[i][j] = num.divexact(prev) if not num.is_zero else Polynomial()
        prev = M[k][k]
    out = M[D - 1][D - 1]
    return -out if sign < 0 else out


@dataclass(frozen=True)
class UnitScale:
    """Length/energy units that reduce V = V0*r^alpha to sigma*r^alpha.

    With r0 = [hbar^2 / (2 m |V0|)]^(1/(alpha+2)) and e0 = hbar^2/(2 m r0^2)
    the scaled equation has unit coupling; physical energies are eps * e0.
    Inputs are kept exact (rational) so the scales can be produced at any
    requested precision.
    """

    hbar: BigRational
    mass: BigRational
    v0: BigRational
    alpha: BigRational

    @classmethod
    def from_physical(cls, hbar, mass, v0, alpha) -> "UnitScale":
        scale = cls(
            hbar=mpq(str(hbar)),
            mass=mpq(str(mass)),
            v0=mpq(str(v0)),
            alpha=mpq(str(alpha)),
        )
        if scale.hbar <= 0 or scale.mass <= 0:
            raise DomainError("hbar and mass must be positive")
        if scale.v0 == 0:
            raise DomainError("V0 must be nonzero")
        if scale.alpha < -1:
            raise DomainError("alpha must be >= -1")
        if scale.v0 * scale.alpha <= 0:
            raise DomainError("bound states require V0 and alpha of the same sign")
        return scale

    def r0(self, bits: int = 53) -> BigFloat:
        with workprec(bits + 16):
            base = mpfr(self.hbar) ** 2 / (2 * mpfr(self.mass) * abs(mpfr(self.v0)))
            expo = 1 / (mpfr(self.alpha) + 2)
            out = base**expo
        with workprec(bits):
            return mpfr(out)

    def e0(self, bits: int = 53) -> BigFloat:
        with workprec(bits + 16):
            kin = mpfr(self.hbar) ** 2 / (2 * mpfr(self.mass))
            a = mpfr(self.alpha)
            out = kin ** (a / (a + 2)) * abs(mpfr(self.v0)) ** (2 / (a + 2))
        with workprec(bits):
            return mpfr(out)


def scale_to_physical(units: UnitScale, eps: BigFloat) -> BigFloat:
    """Physical energy E = eps * e0 at the precision carried by ``eps``."""
    bits = eps.precision
    with workprec(bits):
        return eps * units.e0(bits)
