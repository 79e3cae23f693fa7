"""Logit fixed-point map and symmetric equilibrium solvers.

The equilibrium condition is ``p = f(p) = 1 / (1 + exp(beta * delta_t(p)))``
where ``delta_t`` is :func:`qresb.game.payoff_difference`.  Because
``delta_t`` decreases in ``p``, ``f`` is nondecreasing in ``p``.

Two solvers are provided:

* :func:`solve_banach` -- plain fixed-point iteration, only valid when
  ``beta * (alpha + gamma) / 4 < 1`` so that ``f`` is a contraction;
* :func:`find_all_fixed_points` -- grid scan of ``f(p) - p`` followed by
  bisection, which works in any regime and reports every fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qresb.errors import DomainError, NoConvergence, NotContraction
from qresb.game import BehavioralParams, CoordinationGame, payoff_difference

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000
DEFAULT_GRID_N = 10_000


@dataclass(frozen=True)
class Equilibrium:
    """A symmetric fixed point of the logit map.

    ``slope`` is ``f'(p)`` at the fixed point; ``stable`` is ``slope < 1``
    (the boundary ``slope == 1`` counts as unstable, see ``marginal``).
    """

    p: float
    residual: float
    iterations: int
    stable: bool
    contraction_modulus: float
    slope: float = float("nan")

    @property
    def marginal(self) -> bool:
        return self.slope == 1.0

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "residual": self.residual,
            "iterations": self.iterations,
            "stable": self.stable,
            "contraction_modulus": self.contraction_modulus,
            "slope": self.slope,
        }


def _scalar_or_array(values, like):
    if np.ndim(like) == 0:
        return float(values)
    return values


def logit_prob_x(beta: float, delta):
    """Probability of X under the logit rule, ``1 / (1 + exp(beta*delta))``.

    Evaluated through ``exp(-|beta*delta|)`` so no positive exponent is ever
    taken.  Returns exactly 0.5 when ``beta*delta == 0``.
    """
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta!r}")
    if np.ndim(delta) == 0:
        x = beta * float(delta)
        e = math.exp(-abs(x))
        return e / (1.0 + e) if x > 0 else 1.0 / (1.0 + e)
    x = beta * np.asarray(delta, dtype=float)
    e = np.exp(-np.abs(x))
    out = np.where(x > 0, e / (1.0 + e), 1.0 / (1.0 + e))
    return _scalar_or_array(out, delta)


def _logistic_slope(x):
    # e^x / (1+e^x)^2, symmetric in x
    if np.ndim(x) == 0:
        e = math.exp(-abs(float(x)))
        return e / ((1.0 + e) * (1.0 + e))
    e = np.exp(-np.abs(x))
    return e / ((1.0 + e) * (1.0 + e))


def fixed_point_map(
    game: CoordinationGame, params: BehavioralParams, t: float, p
):
    return logit_prob_x(params.beta, payoff_difference(game, params, t, p))


def map_derivative(
    game: CoordinationGame, params: BehavioralParams, t: float, p
):
    """``f'(p) = beta*(alpha+gamma) * L(beta*delta_t(p))`` with ``L(x) = e^x/(1+e^x)^2``.

    Never negative.
    """
    x = params.beta * np.asarray(payoff_difference(game, params, t, p), dtype=float)
    out = params.beta * game.slope * _logistic_slope(x)
    return _scalar_or_array(out, p)


def contraction_modulus(game: CoordinationGame, params: BehavioralParams) -> float:
    """Uniform bound ``beta*(alpha+gamma)/4`` on ``|f'|``."""
    return params.beta * game.slope / 4.0


def _make_equilibrium(game, params, t, p, iterations):
    slope = map_derivative(game, params, t, p)
    return Equilibrium(
        p=float(p),
        residual=abs(fixed_point_map(game, params, t, p) - p),
        iterations=iterations,
        stable=slope < 1.0,
        contraction_modulus=contraction_modulus(game, params),
        slope=slope,
    )


def _iterate(game, params, t, p0, tol, max_iter):
    p = p0
    for k in range(max_iter + 1):
        fp = fixed_point_map(game, params, t, p)
        if abs(fp - p) <= tol:
            return p, k
        p = fp
    raise NoConvergence(
        f"no convergence after {max_iter} iterations (last residual {abs(fp - p):.3g})"
    )


def solve_banach(
    game: CoordinationGame,
    params: BehavioralParams,
    t: float = 0.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    p0: float = 0.5,
    check_starts: bool = True,
) -> Equilibrium:
    """Unique equilibrium by fixed-point iteration.

    Iterates ``p <- f(p)`` from ``p0`` until ``|f(p) - p| <= tol``.  With
    ``check_starts`` the iteration is repeated from 0 and 1 and the three
    answers must agree within ``max(10*tol, 2*tol/(1 - modulus))``, the
    a-priori error bound of a residual-``tol`` iterate.

    Raises :class:`NotContraction` when the modulus is >= 1 and
    :class:`NoConvergence` when ``max_iter`` is exhausted.
    """
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol!r}")
    modulus = contraction_modulus(game, params)
    if modulus >= 1.0:
        raise NotContraction(modulus)
    p, iterations = _iterate(game, params, t, p0, tol, max_iter)
    if check_starts:
        window = max(10 * tol, 2 * tol / (1.0 - modulus))
        for start in (0.0, 1.0):
            q, _ = _iterate(game, params, t, start, tol, max_iter)
            if abs(q - p) > window:
                raise NoConvergence(
                    f"start {start} converged to {q!r}, start {p0} to {p!r}"
                )
    return _make_equilibrium(game, params, t, p, iterations)


def _bisect(g, lo, hi, g_lo, tol):
    steps = 0
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        g_mid = g(mid)
        steps += 1
        if g_mid == 0.0:
            return mid, steps
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi), steps


def find_all_fixed_points(
    game: CoordinationGame,
    params: BehavioralParams,
    t: float = 0.0,
    grid_n: int = DEFAULT_GRID_N,
    tol: float = DEFAULT_TOL,
) -> list[Equilibrium]:
    """Every fixed point of the logit map on [0, 1], sorted ascending.

    ``g(p) = f(p) - p`` is sampled on ``grid_n + 1`` uniform points; each sign
    change is bisected to width < ``tol``, grid points where ``g`` is exactly
    zero are roots themselves, and roots closer than ``10*tol`` are merged.
    """
    if int(grid_n) != grid_n or grid_n < 100:
        raise DomainError(f"grid_n must be an integer >= 100, got {grid_n!r}")
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol!r}")
    grid = np.linspace(0.0, 1.0, int(grid_n) + 1)
    values = fixed_point_map(game, params, t, grid) - grid

    def g(p):
        return fixed_point_map(game, params, t, p) - p

    signs = np.sign(values)
    roots = [(float(grid[i]), 0) for i in np.flatnonzero(signs == 0)]
    for i in np.flatnonzero(signs[:-1] * signs[1:] < 0):
        roots.append(_bisect(g, float(grid[i]), float(grid[i + 1]), values[i], tol))

    merged: list[tuple[float, int]] = []
    for root in sorted(roots):
        if merged and root[0] - merged[-1][0] < 10 * tol:
            continue
        merged.append(root)
    return [_make_equilibrium(game, params, t, p, steps) for p, steps in merged]


def solve(
    game: CoordinationGame,
    params: BehavioralParams,
    t: float = 0.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    grid_n: int = DEFAULT_GRID_N,
) -> list[Equilibrium]:
    """Banach iteration in the contraction regime, full enumeration otherwise."""
    if contraction_modulus(game, params) < 1.0:
        return [solve_banach(game, params, t, tol=tol, max_iter=max_iter)]
    return find_all_fixed_points(game, params, t, grid_n=grid_n, tol=tol)
