"""Tax and deletion interventions, the indifference threshold, and sweeps."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from qresb.equilibrium import (
    DEFAULT_GRID_N,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    Equilibrium,
    contraction_modulus,
    solve,
    solve_banach,
)
from qresb.errors import DomainError, NotContraction, QRESBError
from qresb.game import BehavioralParams, CoordinationGame, welfare

DEFAULT_TIE_TOL = 1e-9


class RegimeLabel(str, Enum):
    STATUS_QUO_PERSISTS = "status_quo_persists"
    INDIFFERENT = "indifferent"
    TRANSITION = "transition"


@dataclass(frozen=True)
class TaxOutcome:
    """One equilibrium under tax ``t``.

    ``regime`` is None outside the contraction regime, where the
    classification is not backed by uniqueness.
    """

    t: float
    equilibrium: Equilibrium
    welfare: float
    regime: RegimeLabel | None


@dataclass
class ComparisonReport:
    threshold_tax: float
    welfare_monotone: bool
    tax_equilibria: list[TaxOutcome] = field(default_factory=list)
    deletion_p: float = 0.0
    deletion_welfare: float = 0.0
    welfare_gaps: list[tuple[float, float]] = field(default_factory=list)
    dominance_certified: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def min_gap(self) -> float | None:
        if not self.welfare_gaps:
            return None
        return min(gap for _, gap in self.welfare_gaps)

    @property
    def dominance_violated(self) -> bool:
        """Monotone game, every p_t > 0, yet some gap is not positive.

        The model rules this out, so True means a numerical defect.
        """
        if not self.welfare_monotone:
            return False
        if any(o.equilibrium.p <= 0.0 for o in self.tax_equilibria):
            return False
        return any(gap <= 0 for _, gap in self.welfare_gaps)

    def to_dict(self) -> dict:
        return {
            "threshold_tax": self.threshold_tax,
            "welfare_monotone": self.welfare_monotone,
            "tax_equilibria": [
                {
                    "t": o.t,
                    "equilibrium": o.equilibrium.to_dict(),
                    "welfare": o.welfare,
                    "regime": o.regime.value if o.regime else None,
                }
                for o in self.tax_equilibria
            ],
            "deletion_p": self.deletion_p,
            "deletion_welfare": self.deletion_welfare,
            "welfare_gaps": [[t, gap] for t, gap in self.welfare_gaps],
            "dominance_certified": self.dominance_certified,
            "min_gap": self.min_gap,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class SweepRow:
    param: str
    value: float
    p: float | None = None
    welfare: float | None = None
    regime: RegimeLabel | None = None
    stable: bool | None = None
    residual: float | None = None
    error: str | None = None


def threshold_tax(game: CoordinationGame, params: BehavioralParams) -> float:
    """Tax at which both actions are equally likely: ``kappa - (alpha-gamma)/2``.

    Does not depend on ``beta``.  A negative value means X already loses the
    coin-flip comparison without any tax.
    """
    return params.kappa - (game.alpha - game.gamma) / 2.0


def _label(p: float, tie_tol: float) -> RegimeLabel:
    if p > 0.5 + tie_tol:
        return RegimeLabel.STATUS_QUO_PERSISTS
    if p < 0.5 - tie_tol:
        return RegimeLabel.TRANSITION
    return RegimeLabel.INDIFFERENT


def classify_regime(
    game: CoordinationGame,
    params: BehavioralParams,
    t: float,
    tie_tol: float = DEFAULT_TIE_TOL,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> RegimeLabel:
    """Whether the unique equilibrium under tax ``t`` favours X, Y or neither.

    Only defined in the contraction regime.  The solver's verdict is
    cross-checked against the sign of ``threshold - t``; a mismatch outside
    the tie band raises :class:`QRESBError`.
    """
    if not tie_tol > 0:
        raise DomainError(f"tie_tol must be > 0, got {tie_tol!r}")
    modulus = contraction_modulus(game, params)
    if modulus >= 1.0:
        raise NotContraction(modulus)
    eq = solve_banach(game, params, t, tol=tol, max_iter=max_iter)
    label = _label(eq.p, tie_tol)
    gap = threshold_tax(game, params) - t
    expected = (
        RegimeLabel.STATUS_QUO_PERSISTS if gap > 0
        else RegimeLabel.TRANSITION if gap < 0
        else RegimeLabel.INDIFFERENT
    )
    if label is not RegimeLabel.INDIFFERENT and label is not expected:
        raise QRESBError(
            f"regime {label.value} at p={eq.p!r} contradicts threshold sign {gap!r}"
        )
    return label


def deletion_outcome(game: CoordinationGame) -> tuple[float, float]:
    """Play and welfare once X is removed: ``(0.0, b)``."""
    return 0.0, game.b


def _tax_outcomes(game, params, t, tie_tol, tol, max_iter, grid_n):
    contraction = contraction_modulus(game, params) < 1.0
    equilibria = solve(game, params, t, tol=tol, max_iter=max_iter, grid_n=grid_n)
    return [
        TaxOutcome(
            t=t,
            equilibrium=eq,
            welfare=welfare(game, eq.p),
            regime=_label(eq.p, tie_tol) if contraction else None,
        )
        for eq in equilibria
    ]


def welfare_gap(
    game: CoordinationGame,
    params: BehavioralParams,
    t: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    grid_n: int = DEFAULT_GRID_N,
):
    """``W(0) - W(p_t)``.

    Returns a float in the contraction regime and otherwise a list of
    ``(gap, equilibrium)`` pairs, one per fixed point.
    """
    if t < 0:
        raise DomainError(f"tax rate must be >= 0, got {t!r}")
    _, w0 = deletion_outcome(game)
    equilibria = solve(game, params, t, tol=tol, max_iter=max_iter, grid_n=grid_n)
    if contraction_modulus(game, params) < 1.0:
        return w0 - welfare(game, equilibria[0].p)
    return [(w0 - welfare(game, eq.p), eq) for eq in equilibria]


def sweep(
    game: CoordinationGame,
    params: BehavioralParams,
    which: str,
    grid,
    t: float = 0.0,
    tie_tol: float = DEFAULT_TIE_TOL,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    grid_n: int = DEFAULT_GRID_N,
) -> list[SweepRow]:
    """Solve along one parameter (``"t"``, ``"kappa"`` or ``"beta"``).

    Rows follow grid order, one per equilibrium.  A grid value that cannot be
    solved produces a single row carrying ``error`` instead of aborting.
    """
    if which not in ("t", "kappa", "beta"):
        raise DomainError(f"unknown sweep parameter {which!r}")
    grid = list(grid)
    if not grid:
        raise DomainError("sweep grid is empty")
    rows: list[SweepRow] = []
    for value in grid:
        value = float(value)
        try:
            if which == "t":
                point_params, point_t = params, value
            elif which == "kappa":
                point_params, point_t = BehavioralParams(params.beta, value), t
            else:
                point_params, point_t = BehavioralParams(value, params.kappa), t
            if point_t < 0:
                raise DomainError(f"tax rate must be >= 0, got {point_t!r}")
            outcomes = _tax_outcomes(
                game, point_params, point_t, tie_tol, tol, max_iter, grid_n
            )
        except QRESBError as exc:
            rows.append(SweepRow(which, value, error=str(exc)))
            continue
        for o in outcomes:
            rows.append(
                SweepRow(
                    param=which,
                    value=value,
                    p=o.equilibrium.p,
                    welfare=o.welfare,
                    regime=o.regime,
                    stable=o.equilibrium.stable,
                    residual=o.equilibrium.residual,
                )
            )
    return rows


def compare_policies(
    game: CoordinationGame,
    params: BehavioralParams,
    taxes,
    tie_tol: float = DEFAULT_TIE_TOL,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    grid_n: int = DEFAULT_GRID_N,
) -> ComparisonReport:
    """Tax outcomes side by side with deletion.

    Outside the contraction regime every fixed point is listed and the gap
    for each tax is the worst case (the equilibrium with the highest
    welfare).
    """
    taxes = [float(t) for t in taxes]
    for t in taxes:
        if not t >= 0 or t == float("inf"):
            raise DomainError(f"tax rate must be finite and >= 0, got {t!r}")
    p_del, w_del = deletion_outcome(game)
    report = ComparisonReport(
        threshold_tax=threshold_tax(game, params),
        welfare_monotone=game.welfare_monotone,
        deletion_p=p_del,
        deletion_welfare=w_del,
    )
    if contraction_modulus(game, params) >= 1.0 and taxes:
        report.notes.append(
            "multiple equilibria possible: gaps are worst case over all fixed points"
        )
    for t in taxes:
        outcomes = _tax_outcomes(game, params, t, tie_tol, tol, max_iter, grid_n)
        report.tax_equilibria.extend(outcomes)
        report.welfare_gaps.append((t, w_del - max(o.welfare for o in outcomes)))

    if not game.welfare_monotone:
        report.notes.append(
            "dominance not certified: c + d > a + b, welfare ordering hypothesis fails"
        )
    elif any(gap <= 0 for _, gap in report.welfare_gaps):
        report.notes.append("dominance not certified: non-positive welfare gap")
    else:
        report.dominance_certified = True
    return report
