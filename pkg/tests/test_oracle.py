"""Shooting oracle against closed-form spectra and spot values.

Exact anchors: hydrogen-like eps = -1/(4(nu+l+1)^2) for alpha=-1,
harmonic oscillator eps = 4nu+2l+3 for alpha=2, and the linear potential
whose l=0 ground state is the negative of the first zero of Ai.
"""

import pytest

from rpmeig.core import ProblemSpec, reduce_exponent
from rpmeig.oracle import (
    StateNotFoundError,
    default_config,
    oracle_eigenvalue,
    oracle_spectrum,
    shoot_diagnostics,
    shoot_mismatch,
    wkb_level_estimate,
)

AIRY_FIRST_ZERO = 2.33810741045976703848919725245  # -a_1, first zero of Ai


def problem(p, q, sigma, l=0):
    return ProblemSpec(exponent=reduce_exponent(p, q, sigma), l=l)


class TestMismatch:
    def test_hydrogen_ground_state_residual(self):
        spec = problem(-1, 1, -1)
        cfg = default_config(spec, -0.3, -0.2)
        assert abs(shoot_mismatch(spec, cfg, -0.25)) < 1e-8

    def test_oscillator_ground_state_residual(self):
        spec = problem(2, 1, 1)
        cfg = default_config(spec, 2.0, 4.0)
        assert abs(shoot_mismatch(spec, cfg, 3.0)) < 1e-8

    def test_sign_change_brackets_hydrogen(self):
        spec = problem(-1, 1, -1)
        cfg = default_config(spec, -0.3, -0.2)
        lo = shoot_mismatch(spec, cfg, -0.27)
        hi = shoot_mismatch(spec, cfg, -0.23)
        assert lo * hi < 0

    def test_node_counts(self):
        spec = problem(-1, 1, -1)
        cfg = default_config(spec, -0.3, -0.01)
        for nu, eps in [(0, -0.25), (1, -0.0625), (2, -1.0 / 36.0)]:
            mism, nodes = shoot_diagnostics(spec, cfg, eps)
            assert nodes == nu, f"eps={eps}"


class TestHydrogen:
    @pytest.mark.parametrize("l", [0, 1])
    @pytest.mark.parametrize("nu", [0, 1, 2])
    def test_levels(self, l, nu):
        n = nu + l + 1
        exact = -1.0 / (4.0 * n * n)
        got = oracle_eigenvalue(problem(-1, 1, -1, l), nu)
        assert got.nodes == nu
        assert abs(got.value - exact) <= got.bound
        assert abs(got.value - exact) <= 1e-10 * abs(exact)


class TestOscillator:
    @pytest.mark.parametrize("l", [0, 1])
    @pytest.mark.parametrize("nu", [0, 1, 2])
    def test_levels(self, l, nu):
        exact = 4.0 * nu + 2 * l + 3
        got = oracle_eigenvalue(problem(2, 1, 1, l), nu)
        assert got.nodes == nu
        assert abs(got.value - exact) <= got.bound
        assert abs(got.value - exact) <= 1e-10 * exact


class TestLinearPotential:
    def test_ground_state_is_airy_zero(self):
        got = oracle_eigenvalue(problem(1, 1, 1), 0)
        assert abs(got.value - AIRY_FIRST_ZERO) < 1e-10 * AIRY_FIRST_ZERO


class TestPublishedSpotValues:
    def test_inverse_sqrt_ground_state(self):
        got = oracle_eigenvalue(problem(-1, 2, -1), 0)
        assert got.value == pytest.approx(-0.4380412419, abs=1e-9)

    def test_sqrt_l2_ground_state(self):
        got = oracle_eigenvalue(problem(1, 2, 1, l=2), 0)
        assert got.value == pytest.approx(2.6575633683, abs=1e-9)


class TestRobustness:
    def test_spectrum_ordering(self):
        out = oracle_spectrum(problem(-1, 2, -1), 3)
        vals = [o.value for o in out]
        assert vals == sorted(vals)
        assert [o.nu for o in out] == [0, 1, 2, 3]

    def test_cutoff_invariance(self):
        # doubling r_max and halving r_min must not move the eigenvalue
        for p, q, sigma in [(-1, 2, -1), (1, 2, 1), (-2, 3, -1), (3, 2, 1)]:
            for l in (0, 1):
                spec = problem(p, q, sigma, l)
                base = oracle_eigenvalue(spec, 1)
                pad = 1e-5 * abs(base.value)
                w = (base.value - pad, base.value + pad)
                cfg = default_config(spec, *w)
                cfg2 = type(cfg)(r_min=cfg.r_min / 2, r_max=cfg.r_max * 2,
                                 points=int(cfg.points * 1.1))
                from rpmeig.oracle import _Grid, _bisect
                g2 = _Grid(spec, cfg2)
                val2, _ = _bisect(g2, w[0], w[1])
                assert val2 == pytest.approx(base.value, rel=3e-10, abs=1e-11)

    def test_state_not_found(self):
        with pytest.raises(StateNotFoundError):
            oracle_eigenvalue(problem(-1, 1, -1), 0, window=(-9.0, -5.0))

    def test_wkb_estimate_sane(self):
        # within ~35% of the exact oscillator levels
        spec = problem(2, 1, 1)
        for nu, exact in [(0, 3.0), (1, 7.0), (2, 11.0)]:
            est = wkb_level_estimate(spec, nu)
            assert abs(est - exact) / exact < 0.35
