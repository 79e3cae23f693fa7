import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qresb import (
    BehavioralParams,
    DomainError,
    NoConvergence,
    NotContraction,
    contraction_modulus,
    find_all_fixed_points,
    fixed_point_map,
    logit_prob_x,
    map_derivative,
    solve,
    solve_banach,
)

from conftest import contraction_params, games

# mpmath at 40 digits: roots of f(p) = p for game (6,7,1,2), kappa = 1.5
ROOTS_BETA1 = [
    0.012422089308455973397,
    0.41613328951025319723,
    0.99575407559594309198,
]
ROOT_BETA03 = 0.63596612662985217712


def params(beta, kappa=1.5):
    return BehavioralParams(beta, kappa)


class TestLogit:
    def test_zero_precision(self):
        assert logit_prob_x(0.0, 123.4) == 0.5
        assert logit_prob_x(0.0, -1e300) == 0.5

    def test_zero_advantage(self):
        assert logit_prob_x(1.0, 0.0) == 0.5

    def test_known_value(self):
        assert logit_prob_x(1.0, 4.5) == pytest.approx(0.010986942630593180039, rel=1e-14)

    def test_negative_beta(self):
        with pytest.raises(DomainError):
            logit_prob_x(-0.1, 1.0)

    def test_no_overflow_at_extreme_arguments(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert logit_prob_x(1e3, 10.0) == pytest.approx(math.exp(-1e4), abs=0)
            assert logit_prob_x(1e3, -10.0) == 1.0
            assert logit_prob_x(50.0, 4.5) > 0

    def test_array_input(self):
        out = logit_prob_x(2.0, np.array([-1.0, 0.0, 1.0]))
        assert out.shape == (3,)
        assert out[1] == 0.5
        assert out[0] + out[2] == pytest.approx(1.0)

    @given(st.floats(0, 100), st.floats(-100, 100))
    def test_complement_symmetry(self, beta, delta):
        assert logit_prob_x(beta, delta) + logit_prob_x(beta, -delta) == pytest.approx(1.0)


class TestMap:
    def test_threshold_point(self, example):
        assert fixed_point_map(example, params(1), 0.5, 0.5) == 0.5

    @given(st.floats(0, 1))
    def test_zero_precision_constant(self, p):
        assert fixed_point_map(__import__("qresb").new_game(6, 7, 1, 2), params(0), 0.0, p) == 0.5

    def test_printed_point_is_not_fixed(self, example):
        assert fixed_point_map(example, params(1), 0.0, 0.78) == pytest.approx(
            0.96442881072736382722, rel=1e-13
        )

    @given(games(), st.floats(0.01, 5), st.floats(0, 3), st.floats(0, 2),
           st.floats(0, 1), st.floats(0, 1))
    def test_increasing_in_p(self, game, beta, kappa, t, p1, p2):
        bp = BehavioralParams(beta, kappa)
        f1, f2 = fixed_point_map(game, bp, t, p1), fixed_point_map(game, bp, t, p2)
        if p2 > p1:
            assert f2 >= f1
        assert 0.0 <= f1 <= 1.0

    def test_strict_monotonicity_in_p_t_kappa(self, example):
        bp = params(0.3)
        assert fixed_point_map(example, bp, 0, 0.6) > fixed_point_map(example, bp, 0, 0.4)
        assert fixed_point_map(example, bp, 1, 0.4) < fixed_point_map(example, bp, 0, 0.4)
        assert fixed_point_map(example, params(0.3, 2.0), 0, 0.4) > fixed_point_map(example, bp, 0, 0.4)


class TestDerivative:
    def test_zero_precision(self, example):
        assert map_derivative(example, params(0), 0, 0.3) == 0

    def test_peak_at_indifference(self, example):
        assert map_derivative(example, params(1), 0.5, 0.5) == 2.5

    @settings(max_examples=100)
    @given(games(), st.floats(0, 2), st.floats(0, 3), st.floats(0, 2), st.floats(1e-6, 1 - 1e-6))
    def test_central_difference(self, game, beta, kappa, t, p):
        bp = BehavioralParams(beta, kappa)
        h = 1e-6
        lo, hi = max(p - h, 0.0), min(p + h, 1.0)
        fd = (fixed_point_map(game, bp, t, hi) - fixed_point_map(game, bp, t, lo)) / (hi - lo)
        assert abs(map_derivative(game, bp, t, p) - fd) < 1e-6 * max(1.0, beta * game.slope)

    @given(games(), st.floats(0, 5), st.floats(0, 1))
    def test_bounded_by_modulus(self, game, beta, p):
        bp = BehavioralParams(beta, 1.0)
        assert 0 <= map_derivative(game, bp, 0, p) <= contraction_modulus(game, bp) * (1 + 1e-12)


@pytest.mark.parametrize("beta, expected", [(1, 2.5), (0.3, 0.75), (0, 0)])
def test_contraction_modulus(example, beta, expected):
    assert contraction_modulus(example, params(beta)) == pytest.approx(expected, abs=1e-15)


class TestBanach:
    def test_example_contraction_regime(self, example):
        eq = solve_banach(example, params(0.3))
        assert eq.residual < 1e-12
        assert eq.p == pytest.approx(ROOT_BETA03, abs=1e-10)
        assert eq.stable and eq.contraction_modulus == pytest.approx(0.75)

    def test_zero_precision_is_immediate(self, example):
        eq = solve_banach(example, params(0))
        assert eq.p == 0.5 and eq.iterations <= 2

    def test_refuses_outside_contraction(self, example):
        with pytest.raises(NotContraction) as info:
            solve_banach(example, params(1))
        assert info.value.modulus == 2.5

    def test_iteration_budget(self, example):
        with pytest.raises(NoConvergence):
            solve_banach(example, params(0.39), max_iter=3)

    def test_bad_tolerance(self, example):
        with pytest.raises(DomainError):
            solve_banach(example, params(0.3), tol=0)

    @given(games(), st.data())
    def test_start_independence(self, game, data):
        bp = data.draw(contraction_params(game))
        t = data.draw(st.floats(0, 2))
        results = [solve_banach(game, bp, t, p0=s, check_starts=False).p for s in (0.0, 0.5, 1.0)]
        assert max(results) - min(results) < 1e-10

    def test_comparative_statics(self, example):
        ps = [solve_banach(example, params(0.3, k)).p for k in (0, 0.75, 1.5, 2.25, 3)]
        assert all(b > a for a, b in zip(ps, ps[1:]))
        ps = [solve_banach(example, params(0.3), t).p for t in (0, 0.25, 0.5, 0.75, 1)]
        assert all(b < a for a, b in zip(ps, ps[1:]))

    @given(games(), st.data())
    def test_comparative_statics_property(self, game, data):
        bp = data.draw(contraction_params(game))
        k2 = bp.kappa + data.draw(st.floats(0.01, 1))
        lo = solve_banach(game, bp).p
        hi = solve_banach(game, BehavioralParams(bp.beta, k2)).p
        assert hi >= lo
        # strictness is only observable away from double-precision saturation
        if bp.beta > 1e-3 and hi < 1 - 1e-6:
            assert hi > lo

    def test_geometric_residual_decay(self, example):
        bp = params(0.3)
        modulus = contraction_modulus(example, bp)
        p = 0.0
        r0 = abs(fixed_point_map(example, bp, 0, p) - p)
        for k in range(1, 40):
            p = fixed_point_map(example, bp, 0, p)
            assert abs(fixed_point_map(example, bp, 0, p) - p) <= modulus**k * r0 / (1 - modulus) + 1e-15


class TestEnumeration:
    def test_three_equilibria_at_unit_precision(self, example):
        eqs = find_all_fixed_points(example, params(1), 0.0, grid_n=10_000)
        assert [e.p for e in eqs] == pytest.approx(ROOTS_BETA1, abs=1e-11)
        assert [e.stable for e in eqs] == [True, False, True]
        assert all(e.residual < 1e-11 for e in eqs)
        assert all(not e.marginal for e in eqs)

    def test_agrees_with_banach_in_contraction(self, example):
        eqs = find_all_fixed_points(example, params(0.3), 0.0)
        assert len(eqs) == 1
        assert eqs[0].p == pytest.approx(solve_banach(example, params(0.3)).p, abs=1e-10)

    def test_zero_precision(self, example):
        eqs = find_all_fixed_points(example, params(0), 0.0)
        assert [e.p for e in eqs] == [0.5]

    @pytest.mark.parametrize("grid_n, tol", [(99, 1e-12), (1000, 0), (100.5, 1e-12)])
    def test_bad_arguments(self, example, grid_n, tol):
        with pytest.raises(DomainError):
            find_all_fixed_points(example, params(1), 0.0, grid_n=grid_n, tol=tol)

    def test_saturated_endpoint_is_reported(self, example):
        # at beta = 50 the upper root rounds to exactly 1.0 in double precision
        eqs = find_all_fixed_points(example, params(50), 0.0)
        stable = [e.p for e in eqs if e.stable]
        assert stable[0] < 1e-3 and stable[-1] == 1.0

    @settings(max_examples=30, deadline=None)
    @given(games(), st.floats(0, 3), st.floats(0, 3), st.floats(0, 2))
    def test_roots_sorted_and_nonempty(self, game, beta, kappa, t):
        eqs = find_all_fixed_points(game, BehavioralParams(beta, kappa), t, grid_n=500)
        ps = [e.p for e in eqs]
        assert ps and ps == sorted(ps)
        assert all(0.0 <= q <= 1.0 and e.residual < 1e-9 for q, e in zip(ps, eqs))


def test_solve_dispatch(example):
    assert len(solve(example, params(0.3))) == 1
    assert len(solve(example, params(1))) == 3
