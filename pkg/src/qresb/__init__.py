"""Logit quantal response equilibria with a status-quo switching cost.

Symmetric 2x2 coordination games where deviating from the default action X
costs ``kappa``; compares a tax on X against deleting X outright.
"""

from qresb.equilibrium import (
    Equilibrium,
    contraction_modulus,
    find_all_fixed_points,
    fixed_point_map,
    logit_prob_x,
    map_derivative,
    solve,
    solve_banach,
)
from qresb.errors import DomainError, InvalidGame, NoConvergence, NotContraction, QRESBError
from qresb.game import (
    BehavioralParams,
    CoordinationGame,
    Policy,
    PolicyKind,
    expected_payoff_x,
    expected_payoff_y,
    new_game,
    payoff_difference,
    welfare,
    welfare_rearranged,
)
from qresb.policy import (
    ComparisonReport,
    RegimeLabel,
    SweepRow,
    TaxOutcome,
    classify_regime,
    compare_policies,
    deletion_outcome,
    sweep,
    threshold_tax,
    welfare_gap,
)

__version__ = "0.1.0"
