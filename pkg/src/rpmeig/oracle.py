"""Independent double-precision eigenvalue solver by two-sided shooting.

Validates the determinant-based results through a completely different route:
direct integration of -u'' + [l(l+1)/r^2 + sigma*r^alpha] u = eps*u.

The radial equation is integrated on a logarithmic mesh x = ln r with
v = u / sqrt(r), which satisfies v'' = Q(x) v,
Q = (l + 1/2)^2 + r^2 (sigma*r^alpha - eps).  A Numerov sweep runs outward
from a power-series start at r_min and inward from a WKB-decaying start at
r_max; the matching residual is the discrete Wronskian of the two solutions,
which for the Numerov three-term recurrence is exactly conserved, so its
zeros in eps are exactly the eigenvalues of the discretized problem.
Solutions are renormalized whenever they grow large, which preserves signs
(and therefore node counts) while avoiding overflow in classically
forbidden regions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import ProblemSpec

__all__ = [
    "OracleError",
    "OracleResult",
    "ShootConfig",
    "StateNotFoundError",
    "default_config",
    "oracle_eigenvalue",
    "oracle_spectrum",
    "shoot_diagnostics",
    "shoot_mismatch",
    "wkb_level_estimate",
]

ENERGY_FLOOR = 0.05  # |eps| below this switches tolerances to an absolute scale
_DEPTH = 34.0  # WKB decay e-foldings kept beyond the outer turning point
_PHASE_STEP_CLASSICAL = 1.2e-3  # h * sqrt(|Q|) cap where the solution oscillates
_PHASE_STEP_GLOBAL = 0.02  # h * sqrt(Q) cap in the forbidden tail


class OracleError(RuntimeError):
    pass


class StateNotFoundError(OracleError):
    pass


@dataclass(frozen=True)
class ShootConfig:
    """Radial cutoffs and mesh size for one shooting run."""

    r_min: float
    r_max: float
    points: int

    def __post_init__(self):
        if not 0 < self.r_min < self.r_max:
            raise ValueError("need 0 < r_min < r_max")
        if self.points < 1000:
            raise ValueError("mesh too coarse")


@dataclass(frozen=True)
class OracleResult:
    l: int
    nu: int
    value: float
    bound: float
    nodes: int


@njit(cache=True)
def _sweep(A, B, h, l_half_sq, sigma, eps, im, v0, v1, w_prev, w_last):
    """Two-sided Numerov sweep; returns (mismatch, total node count).

    A = r^(alpha+2) and B = r^2 on the mesh, so Q_k = l_half_sq + sigma*A_k
    - eps*B_k.  The sweep works in y = (1 - h^2 Q / 12) v, whose sign equals
    the sign of v for our step sizes.
    """
    n = A.size
    c = h * h / 12.0
    big = 1e250
    inv_big = 1e-250

    # outward, keeping y at the matching index im and at im+1
    q0 = l_half_sq + sigma * A[0] - eps * B[0]
    q1 = l_half_sq + sigma * A[1] - eps * B[1]
    y_prev = (1.0 - c * q0) * v0
    y_cur = (1.0 - c * q1) * v1
    nodes = 0
    if im >= 1 and y_prev != 0.0 and (y_prev > 0.0) != (y_cur > 0.0):
        nodes += 1  # pair (0, 1)
    y_out_m = y_prev if im == 0 else y_cur  # correct preset for im <= 1
    for k in range(1, im + 1):
        q_k = l_half_sq + sigma * A[k] - eps * B[k]
        y_next = 2.0 * y_cur - y_prev + h * h * q_k * (y_cur / (1.0 - c * q_k))
        if k < im and y_cur != 0.0 and (y_next > 0.0) != (y_cur > 0.0):
            nodes += 1  # pair (k, k+1), counted only left of the match point
        y_prev = y_cur
        y_cur = y_next
        if abs(y_cur) > big:
            y_cur *= inv_big
            y_prev *= inv_big
            y_out_m *= inv_big
        if k + 1 == im:
            y_out_m = y_cur
    y_out_m1 = y_cur  # index im+1

    # inward, keeping y at im and im+1
    qn1 = l_half_sq + sigma * A[n - 1] - eps * B[n - 1]
    qn2 = l_half_sq + sigma * A[n - 2] - eps * B[n - 2]
    y_prev = (1.0 - c * qn1) * w_last
    y_cur = (1.0 - c * qn2) * w_prev
    if y_cur != 0.0 and (y_prev > 0.0) != (y_cur > 0.0):
        nodes += 1  # pair (n-2, n-1)
    y_in_m1 = y_prev if im + 1 == n - 1 else y_cur  # preset for im+1 >= n-2
    for k in range(n - 2, im, -1):
        q_k = l_half_sq + sigma * A[k] - eps * B[k]
        y_next = 2.0 * y_cur - y_prev + h * h * q_k * (y_cur / (1.0 - c * q_k))
        if y_cur != 0.0 and (y_next > 0.0) != (y_cur > 0.0):
            nodes += 1  # pair (k-1, k)
        y_prev = y_cur
        y_cur = y_next
        if abs(y_cur) > big:
            y_cur *= inv_big
            y_prev *= inv_big
            y_in_m1 *= inv_big
        if k - 1 == im + 1:
            y_in_m1 = y_cur
    y_in_m = y_cur  # index im

    norm = (abs(y_out_m) + abs(y_out_m1)) * (abs(y_in_m) + abs(y_in_m1))
    wron = y_out_m1 * y_in_m - y_out_m * y_in_m1
    if norm == 0.0:
        return 0.0, nodes
    return wron / norm, nodes


class _Grid:
    """Mesh arrays shared by every energy evaluated under one config."""

    def __init__(self, spec: ProblemSpec, cfg: ShootConfig):
        self.spec = spec
        self.cfg = cfg
        alpha = float(spec.exponent.p) / float(spec.exponent.q)
        self.alpha = alpha
        self.sigma = float(spec.exponent.sigma)
        self.l = spec.l
        self.l_half_sq = (spec.l + 0.5) ** 2
        x = np.linspace(math.log(cfg.r_min), math.log(cfg.r_max), cfg.points)
        self.h = float(x[1] - x[0])
        self.r = np.exp(x)
        self.A = self.r ** (alpha + 2.0)
        self.B = self.r**2
        self.x = x

    def q_values(self, eps: float) -> np.ndarray:
        return self.l_half_sq + self.sigma * self.A - eps * self.B

    def match_index(self, eps: float) -> int:
        q = self.q_values(eps)
        im = int(np.argmin(q))
        return min(max(im, 2), self.cfg.points - 4)

    def outward_start(self, eps: float) -> tuple[float, float]:
        # u = r^(l+1) (1 + a r^(alpha+2) + b r^2), v = u / sqrt(r)
        alpha, l, sigma = self.alpha, self.l, self.sigma
        a = sigma / ((alpha + 2.0) * (2 * l + 3 + alpha))
        b = -eps / (4 * l + 6)
        out = []
        for r in (self.r[0], self.r[1]):
            u = r ** (l + 1) * (1.0 + a * r ** (alpha + 2.0) + b * r * r)
            out.append(u / math.sqrt(r))
        return out[0], out[1]

    def inward_start(self, eps: float) -> tuple[float, float]:
        # decaying WKB tail integrated inward over one mesh step
        q = self.q_values(eps)
        q1, q2 = q[-1], q[-2]
        if q1 <= 0 or q2 <= 0:
            raise OracleError(
                f"outer boundary not in the forbidden region at eps={eps}; "
                "r_max is too small"
            )
        w_last = 1e-200
        grow = math.exp(0.5 * self.h * (math.sqrt(q1) + math.sqrt(q2)))
        w_prev = w_last * (q1 / q2) ** 0.25 * grow
        return w_prev, w_last

    def mismatch(self, eps: float) -> tuple[float, int]:
        im = self.match_index(eps)
        v0, v1 = self.outward_start(eps)
        w_prev, w_last = self.inward_start(eps)
        f, nodes = _sweep(
            self.A, self.B, self.h, self.l_half_sq, self.sigma, eps, im,
            v0, v1, w_prev, w_last,
        )
        return f, nodes


def _turning_point(alpha: float, eps: float) -> float:
    # sigma*r^alpha = eps has a single positive solution for the supported range
    return abs(eps) ** (1.0 / alpha)


def _wkb_decay_radius(alpha: float, sigma: float, eps: float, depth: float) -> float:
    """Radius where the WKB decay integral past the turning point reaches ``depth``."""
    rt = _turning_point(alpha, eps)
    r_hi = rt
    for _ in range(200):
        r_hi *= 1.3
        rs = np.geomspace(rt * (1 + 1e-9), r_hi, 400)
        integrand = np.sqrt(np.maximum(sigma * rs**alpha - eps, 0.0))
        total = float(np.trapezoid(integrand, rs))
        if total >= depth:
            return r_hi
    raise OracleError("could not find a decaying outer region")


def default_config(spec: ProblemSpec, eps_lo: float, eps_hi: float) -> ShootConfig:
    """Mesh covering energies in [eps_lo, eps_hi] for this problem.

    The outer cutoff is pushed deep enough into the forbidden region that
    boundary truncation is negligible at the oracle's accuracy target; the
    step is set by the phase rate sqrt(|Q|), resolved tightly where the
    solution oscillates and loosely in the decaying tail.
    """
    alpha = float(spec.exponent.p) / float(spec.exponent.q)
    sigma = float(spec.exponent.sigma)
    targets = [e for e in (eps_lo, eps_hi) if (e < 0 if sigma < 0 else e > 0)]
    if not targets:
        raise OracleError("energy window does not intersect the bound-state range")
    r_max = max(_wkb_decay_radius(alpha, sigma, e, _DEPTH) for e in targets)
    r_min = 1e-6
    x_range = math.log(r_max) - math.log(r_min)
    l_half_sq = (spec.l + 0.5) ** 2
    q_classical = max(
        2.0 * abs(e) * _turning_point(alpha, e) ** 2 for e in targets
    ) + l_half_sq + 1.0
    q_global = max(
        abs(sigma * r_max**alpha - e) * r_max**2 for e in targets
    ) + l_half_sq
    h1 = _PHASE_STEP_CLASSICAL / math.sqrt(max(q_classical, 1.0))
    h2 = _PHASE_STEP_GLOBAL / math.sqrt(max(q_global, 1.0))
    points = int(min(max(x_range / min(h1, h2), 4e4), 3e6))
    return ShootConfig(r_min=r_min, r_max=r_max, points=points)


def shoot_mismatch(spec: ProblemSpec, cfg: ShootConfig, eps: float) -> float:
    """Log-derivative matching residual at ``eps`` (zero at eigenvalues)."""
    return _Grid(spec, cfg).mismatch(eps)[0]


def shoot_diagnostics(spec: ProblemSpec, cfg: ShootConfig, eps: float) -> tuple[float, int]:
    """(mismatch, node count) at ``eps``."""
    return _Grid(spec, cfg).mismatch(eps)


def wkb_level_estimate(spec: ProblemSpec, nu: int) -> float:
    """Semiclassical (signed) estimate of level nu; ~25% accuracy is enough
    to center search windows."""
    ex = spec.exponent
    alpha = float(ex.p) / float(ex.q)
    s = np.linspace(0.0, 1.0, 20001)[1:-1]
    if ex.sigma > 0:
        integ = np.sqrt(np.maximum(1.0 - s**alpha, 0.0))
    else:
        integ = np.sqrt(np.maximum(s**alpha - 1.0, 0.0))
    i_alpha = float(np.trapezoid(integ, s)) + 1e-12
    phase = math.pi * (nu + 0.5 * spec.l + 0.75)
    return ex.sigma * (phase / i_alpha) ** (2.0 * alpha / (alpha + 2.0))


def _state_window(spec: ProblemSpec, nu: int, widen: float) -> tuple[float, float]:
    center = wkb_level_estimate(spec, nu)
    if spec.exponent.sigma < 0:
        return (center * widen, center / widen)
    lo = max(1e-4, center / widen - 0.5 * widen)
    return (lo, center * widen + 0.5 * widen)


def _enclosing_window(spec: ProblemSpec, nu: int) -> tuple[float, float, "_Grid"]:
    """Window whose edges have node counts that straddle state ``nu``.

    Starts from the semiclassical estimate and moves whichever edge is on
    the wrong side, so a poor estimate costs a couple of integrations
    instead of a rescan of the whole window.
    """
    sigma = spec.exponent.sigma
    lo, hi = _state_window(spec, nu, 1.7)
    for _ in range(24):
        grid = _Grid(spec, default_config(spec, lo, hi))
        n_lo = grid.mismatch(lo)[1]
        n_hi = grid.mismatch(hi)[1]
        if n_lo <= nu < n_hi:
            return lo, hi, grid
        if n_lo > nu:
            lo = lo * 1.7 if sigma < 0 else max(1e-5, lo / 1.7 - 0.5)
        elif n_hi <= nu:
            hi = hi / 1.6 if sigma < 0 else hi * 1.6 + 0.5
        if sigma < 0 and hi > -1e-14:
            raise StateNotFoundError(f"ran out of window for nu={nu}, {spec.exponent}")
    raise StateNotFoundError(f"no enclosing window for nu={nu}, {spec.exponent}, l={spec.l}")


def _bracket_candidates(grid: _Grid, lo: float, hi: float, sigma: int):
    if sigma < 0:
        n = max(48, int(26 * math.log10(lo / hi)) + 8)
        points = -np.geomspace(-lo, -hi, n)
    else:
        points = np.linspace(lo, hi, 72)
    values = [grid.mismatch(float(e)) for e in points]
    out = []
    for i in range(len(points) - 1):
        f0, f1 = values[i][0], values[i + 1][0]
        if f0 == 0.0:
            out.append((float(points[i]), float(points[i]), values[i][1]))
        elif (f0 > 0) != (f1 > 0):
            out.append((float(points[i]), float(points[i + 1]), values[i][1]))
    return out


def oracle_eigenvalue(
    spec: ProblemSpec, nu: int, window: tuple[float, float] | None = None
) -> OracleResult:
    """The bound state with nu radial nodes, node-confirmed and bisected.

    Scans a window for sign changes of the matching residual, bisecting the
    candidates whose left-edge node count matches, nearest-first.
    """
    if nu < 0:
        raise ValueError("nu must be >= 0")
    if window is not None:
        lo, hi = window
        grid = _Grid(spec, default_config(spec, lo, hi))
    else:
        lo, hi, grid = _enclosing_window(spec, nu)
    brackets = _bracket_candidates(grid, lo, hi, spec.exponent.sigma)
    # the state with nu nodes is the bracket where the count steps past nu
    ordered = [br for br in brackets if br[2] == nu] + [br for br in brackets if br[2] != nu]
    for a, b, nodes_left in ordered:
        if nodes_left > nu:
            continue
        value, width = _bisect(grid, a, b)
        _, nodes = grid.mismatch(value)
        if nodes != nu:
            continue
        scale = max(abs(value), ENERGY_FLOOR)
        bound = max(4.0 * width, 4e-11 * scale)
        return OracleResult(l=spec.l, nu=nu, value=value, bound=bound, nodes=nodes)
    raise StateNotFoundError(
        f"state nu={nu} not found in ({lo}, {hi}) for {spec.exponent}, l={spec.l}"
    )


def oracle_spectrum(
    spec: ProblemSpec, nu_max: int, window: tuple[float, float] | None = None
) -> list[OracleResult]:
    """Eigenvalues nu = 0..nu_max, each located independently."""
    return [oracle_eigenvalue(spec, nu, window) for nu in range(nu_max + 1)]


def _bisect(grid: _Grid, a: float, b: float) -> tuple[float, float]:
    if a == b:
        return a, 0.0
    fa = grid.mismatch(a)[0]
    fb = grid.mismatch(b)[0]
    if fa == 0.0:
        return a, 0.0
    if fb == 0.0:
        return b, 0.0
    if (fa > 0) == (fb > 0):
        raise OracleError("lost the sign change while bisecting")
    target = 1e-13 * max(abs(a), abs(b), ENERGY_FLOOR)
    for _ in range(200):
        m = 0.5 * (a + b)
        if m == a or m == b or (b - a) < target:
            break
        fm = grid.mismatch(m)[0]
        if fm == 0.0:
            return m, 0.0
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return 0.5 * (a + b), b - a
