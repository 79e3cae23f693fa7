import pytest
from hypothesis import given
from hypothesis import strategies as st

from qresb import (
    BehavioralParams,
    ComparisonReport,
    DomainError,
    NotContraction,
    RegimeLabel,
    classify_regime,
    compare_policies,
    deletion_outcome,
    fixed_point_map,
    new_game,
    sweep,
    threshold_tax,
    welfare,
    welfare_gap,
)

from conftest import contraction_params, games


def params(beta=0.3, kappa=1.5):
    return BehavioralParams(beta, kappa)


@pytest.mark.parametrize("kappa, expected", [(1.5, 0.5), (1.0, 0.0), (0.2, -0.8)])
def test_threshold_examples(example, kappa, expected):
    assert threshold_tax(example, params(kappa=kappa)) == expected


def test_threshold_symmetric_case():
    g = new_game(5, 6, 2, 1)  # alpha = gamma = 4
    assert threshold_tax(g, params(kappa=0)) == 0


@given(games(), st.floats(0, 3), st.lists(st.floats(0, 20), min_size=2, max_size=4))
def test_threshold_ignores_beta(game, kappa, betas):
    values = {threshold_tax(game, BehavioralParams(b, kappa)) for b in betas}
    assert len(values) == 1


@pytest.mark.parametrize("beta", [0.01, 0.3, 1, 10])
def test_half_is_fixed_at_threshold(example, beta):
    bp = params(beta)
    assert fixed_point_map(example, bp, threshold_tax(example, bp), 0.5) == 0.5


@pytest.mark.parametrize(
    "t, label",
    [
        (0.5, RegimeLabel.INDIFFERENT),
        (0.2, RegimeLabel.STATUS_QUO_PERSISTS),
        (0.9, RegimeLabel.TRANSITION),
    ],
)
def test_classify_examples(example, t, label):
    assert classify_regime(example, params(), t) is label


def test_classify_refuses_multiple_equilibria(example):
    with pytest.raises(NotContraction):
        classify_regime(example, params(beta=1), 0.5)


def test_classify_needs_positive_tie_tol(example):
    with pytest.raises(DomainError):
        classify_regime(example, params(), 0.5, tie_tol=0)


@given(games(), st.data())
def test_classification_follows_threshold_sign(game, data):
    bp = data.draw(contraction_params(game))
    t = data.draw(st.floats(0, 5))
    t_bar = threshold_tax(game, bp)
    label = classify_regime(game, bp, t)
    if label is RegimeLabel.STATUS_QUO_PERSISTS:
        assert t < t_bar
    elif label is RegimeLabel.TRANSITION:
        assert t > t_bar


@pytest.mark.parametrize("payoffs, expected", [((6, 7, 1, 2), (0.0, 7.0)), ((3, 4, 1, 2), (0.0, 4.0))])
def test_deletion_outcome(payoffs, expected):
    assert deletion_outcome(new_game(*payoffs)) == expected


class TestWelfareGap:
    def test_at_threshold(self, example):
        assert welfare_gap(example, params(), 0.5) == pytest.approx(3.0, abs=1e-12)

    @given(games(), st.floats(0, 5))
    def test_zero_precision(self, game, t):
        gap = welfare_gap(game, BehavioralParams(0, 1), t)
        assert gap == game.b - welfare(game, 0.5)
        assert gap > 0

    def test_large_tax_small_but_positive(self, example):
        gap = welfare_gap(example, params(), 50.0)
        assert 0 < gap < 1e-5

    def test_lists_every_fixed_point_outside_contraction(self, example):
        gaps = welfare_gap(example, params(beta=1), 0.0)
        assert len(gaps) == 3
        assert all(g > 0 for g, _ in gaps)
        assert [eq.stable for _, eq in gaps] == [True, False, True]

    def test_rejects_negative_tax(self, example):
        with pytest.raises(DomainError):
            welfare_gap(example, params(), -1)


class TestSweep:
    def test_tax_sweep_decreasing(self, example):
        rows = sweep(example, params(), "t", [0, 0.25, 0.5, 0.75, 1.0])
        ps = [r.p for r in rows]
        assert all(b < a for a, b in zip(ps, ps[1:]))
        assert [r.regime.value for r in rows] == [
            "status_quo_persists", "status_quo_persists", "indifferent", "transition", "transition",
        ]
        assert all(r.welfare == welfare(example, r.p) for r in rows)

    def test_kappa_sweep_increasing(self, example):
        ps = [r.p for r in sweep(example, params(), "kappa", [0, 1, 2, 3])]
        assert all(b > a for a, b in zip(ps, ps[1:]))

    def test_beta_sweep_with_zero(self, example):
        rows = sweep(example, params(), "beta", [0, 0.3])
        assert rows[0].p == 0.5

    def test_multiple_rows_per_point(self, example):
        rows = sweep(example, params(), "beta", [1.0])
        assert len(rows) == 3 and all(r.regime is None for r in rows)

    def test_errors_recorded_per_row(self, example):
        rows = sweep(example, params(), "kappa", [-1.0, 1.0])
        assert rows[0].error and rows[0].p is None
        assert rows[1].error is None

    def test_bad_arguments(self, example):
        with pytest.raises(DomainError):
            sweep(example, params(), "gamma", [1])
        with pytest.raises(DomainError):
            sweep(example, params(), "t", [])


class TestCompare:
    def test_certified_in_contraction(self, example):
        report = compare_policies(example, params(), [0, 0.5, 1])
        assert report.dominance_certified
        assert report.threshold_tax == 0.5
        assert report.deletion_p == 0.0 and report.deletion_welfare == 7.0
        assert all(gap > 0 for _, gap in report.welfare_gaps)
        assert report.min_gap == pytest.approx(7 - welfare(example, report.tax_equilibria[2].equilibrium.p))
        assert not report.dominance_violated

    def test_empty_taxes(self, example):
        report = compare_policies(example, params(), [])
        assert report.tax_equilibria == [] and report.welfare_gaps == []
        assert report.deletion_welfare == 7.0
        assert report.min_gap is None

    def test_worst_case_outside_contraction(self, example):
        report = compare_policies(example, params(beta=1), [0])
        best = max(o.welfare for o in report.tax_equilibria)
        assert report.welfare_gaps == [(0.0, 7.0 - best)]
        assert report.notes

    def test_rejects_bad_taxes(self, example):
        with pytest.raises(DomainError):
            compare_policies(example, params(), [float("inf")])
        with pytest.raises(DomainError):
            compare_policies(example, params(), [-0.5])

    def test_violation_flag_only_for_monotone_games(self):
        report = ComparisonReport(threshold_tax=0.0, welfare_monotone=False,
                                  welfare_gaps=[(0.0, -1.0)])
        assert not report.dominance_violated
        report.welfare_monotone = True
        assert report.dominance_violated
