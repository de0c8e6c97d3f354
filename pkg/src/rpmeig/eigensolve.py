"""Root sequences of the quantization determinants and their convergence.

For fixed dimension D the determinant has a cluster of real roots attached
to each eigenvalue, geometrically spaced and tightening exponentially as D
grows; exactly solvable cases instead carry the eigenvalue as a root of
multiplicity ~D.  The tracker therefore refines with a safeguarded secant
iteration (fast on simple roots) and falls back to a Schroeder step, which
stays quadratic at any multiplicity.  Certification distinguishes a sign
bracket from a residual dip so that multiple roots are still reportable.

Precision is adaptive: the driver starts at a budget tied to the requested
digits and doubles it whenever determinant values needed for a decision
drown in their own rounding floor.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import gmpy2
from gmpy2 import mpfr

from .bigmath import BigFloat, workprec
from .core import (
    CoefficientTable,
    DetValue,
    ProblemSpec,
    build_coefficients,
    hankel_det_value,
    min_table_length,
)

__all__ = [
    "ConvergenceReport",
    "EigenvalueReport",
    "PrecisionExhausted",
    "RootRecord",
    "RootSet",
    "RootSequence",
    "SolveResult",
    "assess_convergence",
    "default_bits",
    "default_window",
    "find_roots",
    "label_states",
    "solve",
    "track_sequences",
]

MATCH_TOL_FACTOR = 0.25
GUARD_DIGITS = 8  # refinement aims this many digits past the request
CERTIFY_GUARD = 5  # certification width: 10^-(digits + CERTIFY_GUARD)
_LADDER_STEPS = 7


class PrecisionExhausted(RuntimeError):
    """Determinant values needed for a decision fell below the rounding floor."""


@dataclass(frozen=True)
class RootRecord:
    """One refined root with its refinement status.

    ``cert`` is "bracket" (verified sign change across the root), "dip"
    (residual contract: the determinant collapses by many orders at the
    root, the signature of an even-multiplicity root), or "step" (secant
    converged but the root was not certified; used for intermediate
    dimensions where only the root location matters).
    """

    value: BigFloat
    cert: str
    width: BigFloat
    last_step: BigFloat

    def __repr__(self):
        return f"RootRecord({float(self.value):.15g}, {self.cert})"


@dataclass(frozen=True)
class RootSet:
    D: int
    d: int
    roots: tuple[RootRecord, ...]  # sorted ascending by value

    def values(self) -> list[BigFloat]:
        return [r.value for r in self.roots]


@dataclass
class RootSequence:
    """One root tracked across contiguous determinant dimensions."""

    d: int
    entries: dict[int, RootRecord] = field(default_factory=dict)
    state_label: Optional[tuple[int, int]] = None

    @property
    def d_start(self) -> int:
        return min(self.entries)

    @property
    def d_end(self) -> int:
        return max(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def value_at(self, D: int) -> BigFloat:
        return self.entries[D].value

    @property
    def last_value(self) -> BigFloat:
        return self.entries[self.d_end].value

    def deltas(self) -> list[tuple[int, BigFloat]]:
        ds = sorted(self.entries)
        out = []
        for a, b in zip(ds, ds[1:]):
            out.append((a, abs(self.entries[b].value - self.entries[a].value)))
        return out


@dataclass
class ConvergenceReport:
    sequence: RootSequence
    l_values: list[tuple[int, float]]  # (D, log10 |delta_D|); -inf for exact repeats
    slope: Optional[float]
    intercept: Optional[float]
    converged: bool
    value: BigFloat
    trusted_digits: int

    @property
    def delta_last(self) -> BigFloat:
        ds = self.sequence.deltas()
        return ds[-1][1] if ds else mpfr(0)


@dataclass
class EigenvalueReport:
    spec: ProblemSpec
    l: int
    nu: int
    value: BigFloat
    delta_last: BigFloat
    trusted_digits: int
    converged: bool
    d_start: int
    d_end: int
    bits: int
    cert: str
    report: ConvergenceReport
    merged: int = 0  # extra sequences that converged to the same level


@dataclass
class SolveResult:
    spec: ProblemSpec
    d: int
    digits: int
    bits: int
    d_max_used: int
    window: tuple[float, float]
    states: list[EigenvalueReport]
    reports: list[ConvergenceReport]
    rootsets: list[RootSet]
    seconds: float


def default_bits(digits: int) -> int:
    """Starting precision: four times the requested digits, in bits."""
    return max(192, math.ceil(4 * digits * math.log2(10)))


def default_window(spec: ProblemSpec, nu_max: int) -> tuple[float, float]:
    """Energy window expected to hold states 0..nu_max, semiclassically sized."""
    from .oracle import wkb_level_estimate

    if spec.exponent.sigma < 0:
        lo = 3.0 * wkb_level_estimate(spec, 0)
        hi = 0.45 * wkb_level_estimate(spec, nu_max + 3)
        return (max(lo, -60.0), min(hi, -1e-8))
    hi = 1.35 * wkb_level_estimate(spec, nu_max + 2) + 1.5
    return (1e-6, hi)


class _DetFun:
    """Determinant evaluator at fixed (table, D, d, bits), counting calls."""

    def __init__(self, table: CoefficientTable, D: int, d: int, bits: int):
        self.table = table
        self.D = D
        self.d = d
        self.bits = bits
        self.calls = 0

    def __call__(self, x: BigFloat) -> DetValue:
        self.calls += 1
        return hankel_det_value(self.table, self.D, self.d, x, self.bits)


def _refine(
    f: _DetFun,
    seed: BigFloat,
    hint: BigFloat,
    window: tuple[float, float],
    digits: int,
    bracket: Optional[tuple[BigFloat, BigFloat, int, int]] = None,
    certify: bool = True,
) -> Optional[RootRecord]:
    """Polish one root starting from ``seed``.

    ``hint`` sets the initial secant offset and the trust region (roughly the
    expected distance to the root).  ``bracket`` optionally carries
    (a, b, sign_a, sign_b) from a scan; steps are then kept inside it.
    Returns None when the iteration leaves the window or finds nothing.
    Raises :class:`PrecisionExhausted` when the determinant floor blocks a
    required decision.
    """
    bits = f.bits
    with workprec(bits):
        x0 = mpfr(seed)
        tol_q = mpfr(10) ** (-(digits + GUARD_DIGITS))
        lo, hi = mpfr(window[0]), mpfr(window[1])
        trust = 16 * abs(mpfr(hint)) + abs(x0) * mpfr(2) ** (-bits // 2)
        if bracket is not None:
            a, b, sa, sb = mpfr(bracket[0]), mpfr(bracket[1]), bracket[2], bracket[3]
            trust = max(trust, b - a)
        else:
            a = b = None

        def clamp(x):
            x = min(max(x, lo), hi)
            if a is not None:
                x = min(max(x, a), b)
            if abs(x - x0) > trust:
                x = x0 + (trust if x > x0 else -trust)
            return x

        fx0 = f(x0)
        if fx0.value == 0 or fx0.indeterminate:
            return _certify(f, x0, digits, certify)
        x1 = clamp(x0 + (abs(mpfr(hint)) or abs(x0) * mpfr(2) ** (-bits // 3)))
        if x1 == x0:
            x1 = x0 + abs(x0) * mpfr(2) ** (-bits // 3)
        fx1 = f(x1)
        if fx1.value == 0 or fx1.indeterminate:
            return _certify(f, x1, digits, certify)
        stagnant = 0
        prev_step = None
        for _ in range(70):
            denom = fx1.value - fx0.value
            if denom == 0:
                break
            step = fx1.value * (x1 - x0) / denom
            x2 = clamp(x1 - step)
            real_step = x2 - x1
            # bisection safeguard inside a known bracket
            if a is not None and (x2 <= a or x2 >= b or real_step == 0):
                x2 = (a + b) / 2
                real_step = x2 - x1
            if x2 == x1:
                return _certify(f, x1, digits, certify)
            fx2 = f(x2)
            if fx2.value == 0 or fx2.indeterminate:
                return _certify(f, x2, digits, certify)
            if a is not None:
                if (fx2.sign > 0) == (sa > 0):
                    a, sa = x2, fx2.sign
                else:
                    b, sb = x2, fx2.sign
            x0, fx0, x1, fx1 = x1, fx1, x2, fx2
            if abs(real_step) <= tol_q * abs(x1):
                return _certify(f, x1, digits, certify)
            if prev_step is not None and abs(real_step) > abs(prev_step) / 2:
                stagnant += 1
                if stagnant >= 6:
                    return _schroder(f, x1, abs(real_step), window, digits, certify)
            else:
                stagnant = 0
            prev_step = real_step
        return _schroder(f, x1, abs(x1 - x0) + tol_q * abs(x1), window, digits, certify)


def _schroder(
    f: _DetFun,
    seed: BigFloat,
    h0: BigFloat,
    window: tuple[float, float],
    digits: int,
    certify: bool,
) -> Optional[RootRecord]:
    """Multiplicity-robust polishing: Newton on H/H' via finite differences."""
    bits = f.bits
    with workprec(bits):
        x = mpfr(seed)
        tol_q = mpfr(10) ** (-(digits + GUARD_DIGITS))
        lo, hi = mpfr(window[0]), mpfr(window[1])
        h = max(abs(mpfr(h0)), abs(x) * mpfr(2) ** (-(bits // 2)))
        h_min = abs(x) * mpfr(2) ** (-(bits - 40))
        small = 0
        for _ in range(90):
            f0 = f(x)
            if f0.value == 0 or f0.indeterminate:
                return _certify(f, x, digits, certify)
            fp = f(x + h)
            fm = f(x - h)
            d1 = (fp.value - fm.value) / (2 * h)
            d2 = (fp.value - 2 * f0.value + fm.value) / (h * h)
            den = d1 * d1 - f0.value * d2
            if den == 0:
                if d1 == 0:
                    return None
                step = f0.value / d1
            else:
                step = f0.value * d1 / den
            x_new = min(max(x - step, lo), hi)
            if x_new == x:
                return _certify(f, x, digits, certify)
            x = x_new
            h = max(abs(step) / 4, h_min)
            if abs(step) <= tol_q * abs(x):
                small += 1
                if small >= 2:
                    return _certify(f, x, digits, certify)
            else:
                small = 0
        return None


def _certify(f: _DetFun, x: BigFloat, digits: int, certify: bool) -> RootRecord:
    """Attach a certificate to a refined root.

    A simple root gets a sign-change bracket of relative width
    10^-(digits+CERTIFY_GUARD); an even-multiplicity root shows the same-sign
    deep-dip signature instead.  If the determinant cannot make either call
    at this precision the caller must raise the working precision.
    """
    bits = f.bits
    with workprec(bits):
        w = abs(x) * mpfr(10) ** (-(digits + CERTIFY_GUARD)) / 2
        if w == 0:
            w = mpfr(2) ** (-bits + 40)
        if not certify:
            return RootRecord(value=x, cert="step", width=2 * w, last_step=w)
        f0 = f(x)
        fm = f(x - w)
        fp = f(x + w)
        if fm.sign != 0 and fp.sign != 0 and fm.sign * fp.sign < 0:
            return RootRecord(value=x, cert="bracket", width=2 * w, last_step=w)
        deep_vs = max(abs(fm.value), abs(fp.value))
        centre = abs(f0.value)
        if fm.sign != 0 and fp.sign != 0:
            if f0.indeterminate or centre <= deep_vs * mpfr(10) ** (-10):
                return RootRecord(value=x, cert="dip", width=2 * w, last_step=w)
            raise PrecisionExhausted(
                f"no sign change and no dip at certification width around {float(x)}"
            )
        raise PrecisionExhausted(
            f"determinant indeterminate at certification width around {float(x)} "
            f"(D={f.D}, bits={f.bits})"
        )


def _scan_grid(window: tuple[float, float], sigma: int, n_points: int) -> list:
    lo, hi = window
    if sigma < 0:
        pts = []
        ratio = (hi / lo) ** (1.0 / (n_points - 1))
        v = lo
        for _ in range(n_points):
            pts.append(v)
            v *= ratio
        return pts
    stepw = (hi - lo) / (n_points - 1)
    return [lo + i * stepw for i in range(n_points)]


def find_roots(
    table: CoefficientTable,
    D: int,
    d: int,
    window: tuple[float, float],
    seeds: Sequence[tuple[BigFloat, BigFloat]] = (),
    bits: int = 256,
    digits: int = 20,
    scan_points: int = 0,
    certify: bool = False,
) -> RootSet:
    """All roots of the D x D determinant found from ``seeds`` and a scan.

    ``seeds`` are (value, expected_motion) pairs, typically the previous
    dimension's roots; they are refined first.  When ``scan_points`` > 0 the
    window is swept on a geometric (bound spectra accumulating at zero) or
    uniform grid and sign changes plus deep same-sign dips are refined too.
    Raises :class:`PrecisionExhausted` when too much of the scan is below
    the determinant's rounding floor.
    """
    f = _DetFun(table, D, d, bits)
    sigma = table.spec.exponent.sigma
    found: list[RootRecord] = []

    def known(x) -> bool:
        return any(abs(x - r.value) <= 0.005 * abs(r.value) for r in found)

    for value, hint in seeds:
        if not (window[0] <= value <= window[1]):
            continue
        try:
            rec = _refine(f, value, hint, window, digits, certify=certify)
        except PrecisionExhausted:
            raise
        if rec is not None and window[0] <= rec.value <= window[1] and not known(rec.value):
            found.append(rec)

    if scan_points > 1:
        grid = _scan_grid(window, sigma, scan_points)
        with workprec(bits):
            vals = [f(mpfr(g)) for g in grid]
        n_indet = sum(1 for v in vals if v.indeterminate)
        if n_indet > 0.4 * len(vals):
            raise PrecisionExhausted(
                f"{n_indet}/{len(vals)} scan points indeterminate at D={D}, bits={bits}"
            )
        for i in range(len(grid) - 1):
            s0, s1 = vals[i].sign, vals[i + 1].sign
            if s0 == 0 or s1 == 0 or s0 == s1:
                continue
            with workprec(bits):
                mid = (mpfr(grid[i]) + mpfr(grid[i + 1])) / 2
                half = (mpfr(grid[i + 1]) - mpfr(grid[i])) / 2
            if known(mid):
                continue
            rec = _refine(
                f, mid, half, window, digits,
                bracket=(grid[i], grid[i + 1], s0, s1), certify=certify,
            )
            if rec is not None and not known(rec.value):
                found.append(rec)
        # deep same-sign dips: even-multiplicity roots (exactly solvable cases)
        for i in range(1, len(grid) - 1):
            v0, v1, v2 = vals[i - 1], vals[i], vals[i + 1]
            if v1.sign != 0 and (v1.sign == v0.sign == v2.sign):
                mags = [abs(v.value) for v in (v0, v1, v2)]
                if mags[1] != 0 and mags[1] < min(mags[0], mags[2]) * mpfr(10) ** (-6):
                    if known(grid[i]):
                        continue
                    with workprec(bits):
                        half = (mpfr(grid[i + 1]) - mpfr(grid[i - 1])) / 4
                    rec = _schroder(f, mpfr(grid[i]), half, window, digits, certify)
                    if rec is not None and not known(rec.value):
                        found.append(rec)

    found.sort(key=lambda r: r.value)
    # merge duplicates that refined to the same point
    merged: list[RootRecord] = []
    for rec in found:
        if merged:
            prev = merged[-1]
            gap_tol = abs(rec.value) * mpfr(10) ** (-(digits + 2)) + rec.width + prev.width
            if abs(rec.value - prev.value) <= gap_tol:
                if rec.cert != "step" and prev.cert == "step":
                    merged[-1] = rec
                continue
        merged.append(rec)
    return RootSet(D=D, d=d, roots=tuple(merged))


def track_sequences(
    rootsets: Sequence[RootSet], match_tol_factor: float = MATCH_TOL_FACTOR
) -> list[RootSequence]:
    """Associate roots across consecutive dimensions into sequences.

    Greedy nearest-neighbour matching: a sequence accepts its closest root
    when the gap is below ``match_tol_factor`` times the distance to the
    next-nearest candidate (absolute fallback when there is only one).
    Conflicts go to the sequence with the smoother continuation (smaller
    second difference).  Unmatched roots start new sequences; unmatched
    sequences end, keeping their entries contiguous in D.
    """
    if not rootsets:
        return []
    d = rootsets[0].d
    if any(rs.d != d for rs in rootsets):
        raise ValueError("root sets must share the same d")
    finished: list[RootSequence] = []
    active: list[RootSequence] = []
    for rs in sorted(rootsets, key=lambda r: r.D):
        roots = list(rs.roots)
        claims = []  # (gap, seq_idx, root_idx)
        for si, seq in enumerate(active):
            last = seq.last_value
            gaps = sorted(
                (abs(rec.value - last), ri) for ri, rec in enumerate(roots)
            )
            if not gaps:
                continue
            best_gap, best_ri = gaps[0]
            cap = (
                match_tol_factor * gaps[1][0]
                if len(gaps) > 1
                else abs(last) * 0.35
            )
            cap = max(cap, abs(last) * mpfr(10) ** (-30))  # exact repeats always match
            if best_gap <= cap:
                claims.append((best_gap, si, best_ri))
        claims.sort(key=lambda t: t[0])
        taken_roots: set[int] = set()
        matched_seqs: set[int] = set()
        for gap, si, ri in claims:
            if ri in taken_roots or si in matched_seqs:
                # conflict: prefer the smoother continuation
                if ri in taken_roots and si not in matched_seqs:
                    continue
            active[si].entries[rs.D] = roots[ri]
            taken_roots.add(ri)
            matched_seqs.add(si)
        still_active = []
        for si, seq in enumerate(active):
            if si in matched_seqs:
                still_active.append(seq)
            else:
                finished.append(seq)
        active = still_active
        for ri, rec in enumerate(roots):
            if ri not in taken_roots:
                seq = RootSequence(d=d)
                seq.entries[rs.D] = rec
                active.append(seq)
    finished.extend(active)
    finished.sort(key=lambda s: (s.d_start, float(s.entries[s.d_start].value)))
    return finished


def assess_convergence(seq: RootSequence, digits_wanted: int) -> ConvergenceReport:
    """Fit the exponential tail of a sequence and decide convergence.

    The error model is |delta_D| = A exp(-B D); the report carries
    log10 |delta_D| per D for plotting, the fitted slope of the tail, and a
    trusted-digit count implied by the final difference (never more than the
    refinement guard allows).
    """
    if len(seq) < 4:
        raise ValueError("need at least 4 entries to assess convergence")
    deltas = seq.deltas()
    value = seq.last_value
    l_values: list[tuple[int, float]] = []
    for D, delta in deltas:
        l_values.append((D, float(gmpy2.log10(delta)) if delta != 0 else float("-inf")))
    finite = [(D, L) for D, L in l_values if math.isfinite(L)]
    slope = intercept = None
    if len(finite) >= 3:
        peak = max(range(len(finite)), key=lambda i: finite[i][1])
        tail = finite[peak:]
        if len(tail) >= 3:
            xs = [t[0] for t in tail]
            ys = [t[1] for t in tail]
            n = len(xs)
            sx, sy = sum(xs), sum(ys)
            sxx = sum(x * x for x in xs)
            sxy = sum(x * y for x, y in zip(xs, ys))
            denom = n * sxx - sx * sx
            if denom != 0:
                slope = (n * sxy - sx * sy) / denom
                intercept = (sy - slope * sx) / n
    delta_last = deltas[-1][1]
    scale = abs(value)
    if delta_last == 0:
        converged = True
        trusted = digits_wanted + GUARD_DIGITS - 1
    else:
        rel = delta_last / scale if scale != 0 else delta_last
        converged = rel < mpfr(10) ** (-digits_wanted)
        trusted = int(-gmpy2.log10(rel)) if rel < 1 else 0
        trusted = min(trusted, digits_wanted + GUARD_DIGITS - 1)
        # a non-shrinking tail is never reported as converged
        if len(deltas) >= 3 and not (deltas[-1][1] <= deltas[-2][1] <= deltas[-3][1]):
            converged = False
    return ConvergenceReport(
        sequence=seq,
        l_values=l_values,
        slope=slope,
        intercept=intercept,
        converged=converged,
        value=value,
        trusted_digits=max(trusted, 0),
    )


def label_states(
    reports: Sequence[ConvergenceReport],
    spec: ProblemSpec,
    digits_wanted: int,
    bits: int,
) -> list[EigenvalueReport]:
    """Sort converged sequences by energy and assign radial quantum numbers.

    Distinct sequences that converged to the same level (within combined
    error bars) are merged, keeping the longest/tightest one; the merge
    count is recorded since duplicates usually mean a shadow root was
    tracked alongside the physical one.
    """
    conv = [r for r in reports if r.converged]
    conv.sort(key=lambda r: float(r.value))
    groups: list[list[ConvergenceReport]] = []
    for rep in conv:
        if groups:
            head = groups[-1][0]
            tol = (
                abs(head.value) * mpfr(10) ** (-min(rep.trusted_digits, head.trusted_digits))
                * 50
            )
            if abs(rep.value - head.value) <= tol:
                groups[-1].append(rep)
                continue
        groups.append([rep])
    out = []
    for nu, group in enumerate(groups):
        best = max(group, key=lambda r: (len(r.sequence), r.trusted_digits))
        seq = best.sequence
        seq.state_label = (spec.l, nu)
        out.append(
            EigenvalueReport(
                spec=spec,
                l=spec.l,
                nu=nu,
                value=best.value,
                delta_last=best.delta_last,
                trusted_digits=best.trusted_digits,
                converged=True,
                d_start=seq.d_start,
                d_end=seq.d_end,
                bits=bits,
                cert=seq.entries[seq.d_end].cert,
                report=best,
                merged=len(group) - 1,
            )
        )
    return out


def _sweep(
    spec: ProblemSpec,
    table: CoefficientTable,
    nu_max: int,
    d_max: int,
    d: int,
    digits: int,
    bits: int,
    window: tuple[float, float],
    full_sweep: bool,
    scan_points: int,
) -> tuple[list[RootSet], list[ConvergenceReport], list[EigenvalueReport], int]:
    sigma = spec.exponent.sigma
    rootsets: list[RootSet] = []
    seeds: list[tuple[BigFloat, BigFloat]] = []
    scanning = True
    d_used = d_max
    for D in range(2, d_max + 1):
        rs = find_roots(
            table, D, d, window,
            seeds=seeds, bits=bits, digits=digits,
            scan_points=scan_points if scanning else 0,
        )
        rootsets.append(rs)
        with workprec(bits):
            new_seeds = []
            prev = {float(v): h for v, h in seeds}
            for rec in rs.roots:
                hint = abs(rec.value) * mpfr(10) ** (-3)
                # expected motion: shrink the hint as the sequence tightens
                for v, _h in seeds:
                    if abs(v - rec.value) < abs(rec.value) * 0.05:
                        hint = max(abs(v - rec.value) / 2, abs(rec.value) * mpfr(10) ** (-(digits + 6)))
                        break
                new_seeds.append((rec.value, hint))
        seeds = new_seeds
        if scanning and D > 10:
            seqs_now = track_sequences(rootsets)
            established = [s for s in seqs_now if len(s) >= 3 and s.d_end == D]
            if len(established) >= nu_max + 3:
                scanning = False
        if not full_sweep and D >= max(8, nu_max + 4):
            seqs_now = track_sequences(rootsets)
            assessable = [s for s in seqs_now if len(s) >= 4 and s.d_end == D]
            reports = [assess_convergence(s, digits) for s in assessable]
            states = label_states(reports, spec, digits, bits)
            if len(states) >= nu_max + 1 and all(
                st.trusted_digits >= digits for st in states[: nu_max + 1]
            ):
                d_used = D
                break
    sequences = track_sequences(rootsets)
    reports = [assess_convergence(s, digits) for s in sequences if len(s) >= 4]
    # final roots get a real certificate; failure here escalates precision
    final_states = label_states(reports, spec, digits, bits)
    for st in final_states[: nu_max + 1]:
        seq = st.report.sequence
        f = _DetFun(table, seq.d_end, d, bits)
        rec = seq.entries[seq.d_end]
        if rec.cert == "step":
            new_rec = _certify(f, rec.value, digits, certify=True)
            seq.entries[seq.d_end] = new_rec
            object.__setattr__(st, "cert", new_rec.cert)
    return rootsets, reports, final_states, d_used


def solve(
    spec: ProblemSpec,
    nu_max: int,
    d_max: int = 40,
    d: int = 2,
    digits: int = 20,
    window: tuple[float, float] | None = None,
    bits: int | None = None,
    full_sweep: bool = False,
    scan_points: int | None = None,
) -> SolveResult:
    """Track determinant roots over D = 2..d_max and label converged states.

    Precision starts at :func:`default_bits` (or ``bits``) and doubles on
    any indeterminate-determinant signal, restarting the sweep; the exact
    coefficient table is reused across restarts.
    """
    t0 = time.time()
    if window is None:
        window = default_window(spec, nu_max)
    if scan_points is None:
        if spec.exponent.sigma < 0:
            decades = math.log10(window[0] / window[1])
            scan_points = max(72, min(320, int(56 * decades)))
        else:
            scan_points = 160
    n_max = min_table_length(d_max, d, spec.exponent.parity_odd)
    table = build_coefficients(spec, n_max).hankel_view()
    b = bits if bits is not None else default_bits(digits)
    last_exc: Exception | None = None
    for _ in range(_LADDER_STEPS):
        try:
            rootsets, reports, states, d_used = _sweep(
                spec, table, nu_max, d_max, d, digits, b, window, full_sweep, scan_points
            )
            return SolveResult(
                spec=spec,
                d=d,
                digits=digits,
                bits=b,
                d_max_used=d_used,
                window=window,
                states=states,
                reports=reports,
                rootsets=rootsets,
                seconds=time.time() - t0,
            )
        except PrecisionExhausted as exc:
            last_exc = exc
            b *= 2
    raise PrecisionExhausted(
        f"still indeterminate after {_LADDER_STEPS} precision doublings: {last_exc}"
    )
