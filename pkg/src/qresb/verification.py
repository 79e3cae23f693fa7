"""Independent oracles and property checks for the solver modules.

The fixed-point oracle deliberately avoids :mod:`qresb.equilibrium`: it
rebuilds the payoff difference from the expected-payoff primitives, uses
``scipy.special.expit`` for the logistic, and ``scipy.optimize.bisect`` for
refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect
from scipy.special import expit

from qresb.equilibrium import (
    DEFAULT_GRID_N,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    contraction_modulus,
    find_all_fixed_points,
    fixed_point_map,
    map_derivative,
    solve_banach,
)
from qresb.errors import DomainError, InvalidGame, NotContraction
from qresb.game import (
    BehavioralParams,
    CoordinationGame,
    expected_payoff_x,
    expected_payoff_y,
    new_game,
    payoff_difference,
    welfare,
    welfare_rearranged,
)
from qresb.policy import classify_regime, deletion_outcome, threshold_tax

DEFAULT_SEED = 0
ORACLE_XTOL = 1e-12

# Worked example: payoffs, switching cost and precision, with the numbers
# printed alongside it (equilibria at t = 0, t_bar, 1 and their welfare).
EXAMPLE_PAYOFFS = (6.0, 7.0, 1.0, 2.0)
EXAMPLE_KAPPA = 1.5
EXAMPLE_BETA = 1.0
PRINTED_THRESHOLD = 0.5
PRINTED_EQUILIBRIA = {0.0: 0.78, 0.5: 0.5, 1.0: 0.22}
PRINTED_WELFARE = {0.78: 6.34, 0.5: 6.25, 0.22: 6.20}
PRINTED_DELETION_WELFARE = 7.0


@dataclass
class CheckResult:
    """Outcome of one named check.

    ``passed`` is None when the check was skipped.  Informational checks
    record whether a published claim holds and never affect the exit status.
    """

    name: str
    passed: bool | None
    measured: dict = field(default_factory=dict)
    tolerance: float | None = None
    claim: str = ""
    informational: bool = False

    @property
    def status(self) -> str:
        if self.passed is None:
            return "SKIP"
        if self.informational:
            return "HOLDS" if self.passed else "FAILS"
        return "PASS" if self.passed else "FAIL"


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)
    seed: int = DEFAULT_SEED

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks if not c.informational)

    def get(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "status": c.status,
                    "passed": c.passed,
                    "informational": c.informational,
                    "measured": c.measured,
                    "tolerance": c.tolerance,
                    "claim": c.claim,
                }
                for c in self.checks
            ],
        }

    def render(self) -> str:
        def fmt(value):
            if isinstance(value, float):
                return f"{value:.6g}"
            if isinstance(value, (list, tuple)):
                return "[" + ", ".join(fmt(v) for v in value) + "]"
            return str(value)

        def line(c):
            measured = " ".join(f"{k}={fmt(v)}" for k, v in c.measured.items())
            tol = "" if c.tolerance is None else f" tol={c.tolerance:.6g}"
            return f"{c.status:5s} {c.name}: {measured}{tol}  # {c.claim}"

        lines = [f"verification (seed={self.seed})"]
        lines += [line(c) for c in sorted(self.checks, key=lambda c: c.name) if not c.informational]
        audit = sorted((c for c in self.checks if c.informational), key=lambda c: c.name)
        if audit:
            lines.append("audit of the published worked example (informational):")
            lines += [line(c) for c in audit]
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"


def example_game() -> CoordinationGame:
    return new_game(*EXAMPLE_PAYOFFS)


def oracle_fixed_points(
    game: CoordinationGame,
    params: BehavioralParams,
    t: float = 0.0,
    grid_n: int = DEFAULT_GRID_N,
) -> list[float]:
    """Brute-force roots of ``f(p) - p`` on [0, 1]."""
    if grid_n < 1000:
        raise DomainError(f"oracle grid_n must be >= 1000, got {grid_n!r}")

    def g(p):
        advantage = (expected_payoff_y(game, p) - params.kappa) - (
            expected_payoff_x(game, p) - t
        )
        return expit(-params.beta * advantage) - p

    grid = np.linspace(0.0, 1.0, int(grid_n) + 1)
    signs = np.sign(g(grid))
    roots = [float(grid[i]) for i in np.flatnonzero(signs == 0)]
    for i in np.flatnonzero(signs[:-1] * signs[1:] < 0):
        roots.append(bisect(lambda p: float(g(p)), grid[i], grid[i + 1], xtol=ORACLE_XTOL))
    return sorted(roots)


def _random_game(rng) -> CoordinationGame:
    while True:
        a, b, c, d = rng.uniform(0.0, 10.0, size=4)
        try:
            return new_game(a, b, c, d)
        except InvalidGame:
            continue


def _random_contraction_instance(rng, max_modulus=0.9):
    game = _random_game(rng)
    kappa = rng.uniform(0.0, 3.0)
    beta = rng.uniform(0.0, max_modulus) * 4.0 / game.slope
    t = rng.uniform(0.0, 2.0)
    return game, BehavioralParams(beta, kappa), t


def check_oracle_agreement(
    draws: int = 50,
    seed: int = DEFAULT_SEED,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    grid_n: int = DEFAULT_GRID_N,
    agreement: float = 1e-10,
) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    root_counts = set()
    for _ in range(draws):
        game, params, t = _random_contraction_instance(rng)
        eq = solve_banach(game, params, t, tol=tol, max_iter=max_iter)
        roots = oracle_fixed_points(game, params, t, grid_n=grid_n)
        root_counts.add(len(roots))
        worst = max(worst, min((abs(eq.p - r) for r in roots), default=math.inf))
    return CheckResult(
        "oracle_agreement",
        worst < agreement and root_counts == {1},
        {"draws": draws, "max_abs_diff": worst, "root_counts": sorted(root_counts)},
        agreement,
        "contraction regime: unique fixed point, iteration matches brute force",
    )


def check_derivative(
    draws: int = 100, seed: int = DEFAULT_SEED, h: float = 1e-6, tolerance: float = 1e-6
) -> CheckResult:
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for _ in range(draws):
        game = _random_game(rng)
        params = BehavioralParams(rng.uniform(0.0, 2.0), rng.uniform(0.0, 3.0))
        t = rng.uniform(0.0, 2.0)
        p = rng.uniform(h, 1.0 - h)
        fd = (fixed_point_map(game, params, t, p + h) - fixed_point_map(game, params, t, p - h)) / (2 * h)
        worst = max(worst, abs(map_derivative(game, params, t, p) - fd))
    return CheckResult(
        "derivative_finite_difference",
        worst < tolerance,
        {"draws": draws, "max_abs_err": worst},
        tolerance,
        "analytic slope of the logit map matches central differences",
    )


def check_threshold_invariance(
    game: CoordinationGame | None = None,
    kappa: float = EXAMPLE_KAPPA,
    betas=(0.01, 0.3, 1.0, 10.0),
    tolerance: float = 1e-14,
) -> CheckResult:
    game = game or example_game()
    thresholds = [threshold_tax(game, BehavioralParams(b, kappa)) for b in betas]
    t_bar = thresholds[0]
    devs = [
        abs(fixed_point_map(game, BehavioralParams(b, kappa), t_bar, 0.5) - 0.5)
        for b in betas
    ] if t_bar >= 0 else []
    ok = len(set(thresholds)) == 1 and all(d < tolerance for d in devs)
    return CheckResult(
        "threshold_beta_invariance",
        ok,
        {"threshold": t_bar, "max_map_dev": max(devs, default=0.0)},
        tolerance,
        "threshold ignores beta and makes p = 1/2 a fixed point",
    )


def check_welfare_algebra(
    draws: int = 50, seed: int = DEFAULT_SEED, points: int = 1000, tolerance: float = 1e-12
) -> CheckResult:
    rng = np.random.default_rng(seed + 2)
    grid = np.linspace(0.0, 1.0, points)
    worst = 0.0
    for _ in range(draws):
        game = _random_game(rng)
        worst = max(worst, float(np.max(np.abs(welfare(game, grid) - welfare_rearranged(game, grid)))))
    return CheckResult(
        "welfare_algebra",
        worst <= tolerance,
        {"draws": draws, "max_abs_diff": worst},
        tolerance,
        "expanded and rearranged welfare expressions agree",
    )


def check_welfare_dominance(
    draws: int = 50, seed: int = DEFAULT_SEED, points: int = 1000
) -> CheckResult:
    """W(p) < W(0) = b for every p in (0, 1] whenever c + d <= a + b."""
    rng = np.random.default_rng(seed + 3)
    grid = np.linspace(0.0, 1.0, points)[1:]
    worst = -math.inf
    tested = 0
    while tested < draws:
        game = _random_game(rng)
        if not game.welfare_monotone:
            continue
        tested += 1
        worst = max(worst, float(np.max(welfare(game, grid))) - game.b)
    return CheckResult(
        "welfare_dominance",
        worst < 0,
        {"draws": draws, "max_excess_over_deletion": worst},
        0.0,
        "deletion welfare b beats every interior or pure-X outcome",
    )


def check_comparative_statics(
    game: CoordinationGame,
    beta: float,
    t: float,
    kappa_grid,
    h: float = 1e-4,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CheckResult:
    """Equilibrium strictly increasing in the switching cost."""
    kappas = [float(k) for k in kappa_grid]
    if len(set(kappas)) != len(kappas):
        raise DomainError("kappa grid contains duplicates")
    kappas.sort()
    claim = "equilibrium weight on X rises with the switching cost"
    try:
        ps = [
            solve_banach(game, BehavioralParams(beta, k), t, tol=tol, max_iter=max_iter).p
            for k in kappas
        ]
        slopes = []
        for k in kappas[1:-1]:
            hi = solve_banach(game, BehavioralParams(beta, k + h), t, tol=tol, max_iter=max_iter).p
            lo = solve_banach(game, BehavioralParams(beta, k - h), t, tol=tol, max_iter=max_iter).p
            slopes.append((hi - lo) / (2 * h))
    except NotContraction as exc:
        return CheckResult(
            "comparative_statics", None, {"modulus": exc.modulus}, None, claim
        )
    increasing = all(q > p for p, q in zip(ps, ps[1:]))
    return CheckResult(
        "comparative_statics",
        increasing and all(s > 0 for s in slopes),
        {"kappa": kappas, "p": ps, "min_fd_slope": min(slopes, default=math.nan)},
        None,
        claim,
    )


def check_tax_monotonicity(
    game: CoordinationGame,
    params: BehavioralParams,
    taxes=(0.0, 0.25, 0.5, 0.75, 1.0),
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CheckResult:
    claim = "equilibrium weight on X falls with the tax; regime follows threshold sign"
    modulus = contraction_modulus(game, params)
    if modulus >= 1.0:
        return CheckResult("tax_monotonicity", None, {"modulus": modulus}, None, claim)
    ps = [solve_banach(game, params, t, tol=tol, max_iter=max_iter).p for t in taxes]
    t_bar = threshold_tax(game, params)
    labels_ok = True
    for t in taxes:
        label = classify_regime(game, params, t, tol=tol, max_iter=max_iter).value
        want = "status_quo_persists" if t < t_bar else "transition" if t > t_bar else "indifferent"
        labels_ok &= label == want
    decreasing = all(q < p for p, q in zip(ps, ps[1:]))
    return CheckResult(
        "tax_monotonicity",
        decreasing and labels_ok,
        {"t": list(taxes), "p": ps, "labels_match": labels_ok},
        None,
        claim,
    )


def _best_response_points(game, params, t):
    points = []
    if payoff_difference(game, params, t, 0.0) > 0:
        points.append(0.0)
    if payoff_difference(game, params, t, 1.0) < 0:
        points.append(1.0)
    return points


def check_limits(
    game: CoordinationGame,
    params: BehavioralParams,
    t: float = 0.0,
    small_beta: float = 1e-9,
    large_beta: float = 50.0,
    grid_n: int = DEFAULT_GRID_N,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CheckResult:
    """Vanishing precision gives 1/2; high precision gives pure best responses.

    At ``large_beta`` every stable fixed point must sit within 1e-3 of a pure
    profile that is a best response to itself, and every such profile must be
    approached by some stable fixed point.
    """
    p_small = solve_banach(
        game, BehavioralParams(small_beta, params.kappa), t, tol=tol, max_iter=max_iter
    ).p
    sharp = BehavioralParams(large_beta, params.kappa)
    stable = [e.p for e in find_all_fixed_points(game, sharp, t, grid_n=grid_n, tol=tol) if e.stable]
    targets = _best_response_points(game, sharp, t)
    near = all(any(abs(p - q) < 1e-3 for q in targets) for p in stable)
    covered = all(any(abs(p - q) < 1e-3 for p in stable) for q in targets)
    ok = abs(p_small - 0.5) < 1e-6 and bool(stable) and near and covered
    return CheckResult(
        f"limits_t={t:g}",
        ok,
        {"p_small_beta": p_small, "stable_large_beta": stable, "best_responses": targets},
        1e-3,
        "precision limits: 1/2 at beta -> 0, pure best responses at large beta",
    )


def monte_carlo_consistency(
    game: CoordinationGame,
    params: BehavioralParams,
    t: float,
    p_star: float,
    n: int = 1_000_000,
    seed: int = DEFAULT_SEED,
) -> CheckResult:
    """Sample ``n`` logit choices against ``p_star`` and compare frequencies.

    Passes when the empirical X share lies within four binomial standard
    errors of ``p_star``.
    """
    if n < 10_000:
        raise DomainError(f"n must be >= 10000, got {n!r}")
    q = fixed_point_map(game, params, t, p_star)
    if abs(q - p_star) >= 1e-10:
        raise DomainError(f"p_star={p_star!r} is not a fixed point (residual {abs(q - p_star):.3g})")
    rng = np.random.default_rng(seed)
    freq = int(np.count_nonzero(rng.random(n) < q)) / n
    band = 4.0 * math.sqrt(p_star * (1.0 - p_star) / n)
    return CheckResult(
        "monte_carlo",
        abs(freq - p_star) <= band,
        {"n": n, "p_star": p_star, "frequency": freq, "seed": seed},
        band,
        "equilibrium probability is reproduced as a choice frequency",
    )


def check_banach_rate(
    game: CoordinationGame | None = None,
    params: BehavioralParams | None = None,
    t: float = 0.0,
    steps: int = 30,
) -> CheckResult:
    game = game or example_game()
    params = params or BehavioralParams(0.3, EXAMPLE_KAPPA)
    modulus = contraction_modulus(game, params)
    p = 1.0
    r0 = abs(fixed_point_map(game, params, t, p) - p)
    ok = True
    for k in range(1, steps + 1):
        p = fixed_point_map(game, params, t, p)
        r = abs(fixed_point_map(game, params, t, p) - p)
        ok &= r <= modulus**k * r0 / (1.0 - modulus) + 1e-15
    return CheckResult(
        "banach_geometric_rate",
        bool(ok),
        {"modulus": modulus, "initial_residual": r0, "steps": steps},
        None,
        "iteration residual shrinks at least geometrically",
    )


def audit_reference_example(grid_n: int = DEFAULT_GRID_N) -> list[CheckResult]:
    """Re-derive every number published with the worked example.

    Returns informational results: ``passed`` says whether the published
    figure is consistent with the model's own equations.
    """
    game = example_game()
    params = BehavioralParams(EXAMPLE_BETA, EXAMPLE_KAPPA)
    modulus = contraction_modulus(game, params)
    checks = [
        CheckResult(
            "example_contraction",
            modulus < 1.0,
            {"modulus": modulus},
            1.0,
            "example parameters satisfy the uniqueness condition",
            True,
        )
    ]
    roots = oracle_fixed_points(game, params, 0.0, grid_n=grid_n)
    checks.append(
        CheckResult(
            "example_fixed_point_set",
            len(roots) == 1,
            {"count": len(roots), "roots": roots},
            None,
            "example has a unique fixed point at t = 0",
            True,
        )
    )
    for t, printed in PRINTED_EQUILIBRIA.items():
        residual = abs(fixed_point_map(game, params, t, printed) - printed)
        roots_t = oracle_fixed_points(game, params, t, grid_n=grid_n)
        checks.append(
            CheckResult(
                f"example_equilibrium_t={t:g}",
                residual < 0.01,
                {"printed_p": printed, "residual": residual, "oracle_roots": roots_t},
                0.01,
                f"printed p = {printed:g} is a fixed point at t = {t:g}",
                True,
            )
        )
    for p, printed in PRINTED_WELFARE.items():
        w = welfare(game, p)
        checks.append(
            CheckResult(
                f"example_welfare_p={p:g}",
                abs(w - printed) < 0.005,
                {"printed": printed, "computed": w},
                0.005,
                f"printed welfare at p = {p:g} matches the welfare formula",
                True,
            )
        )
    t_bar = threshold_tax(game, params)
    checks.append(
        CheckResult(
            "example_threshold",
            t_bar == PRINTED_THRESHOLD,
            {"printed": PRINTED_THRESHOLD, "computed": t_bar},
            0.0,
            "printed threshold tax",
            True,
        )
    )
    _, w_del = deletion_outcome(game)
    checks.append(
        CheckResult(
            "example_deletion_welfare",
            w_del == PRINTED_DELETION_WELFARE,
            {"printed": PRINTED_DELETION_WELFARE, "computed": w_del},
            0.0,
            "printed welfare under deletion",
            True,
        )
    )
    # W' = -(b-a) + (1-2p)(c+d-a-b) at p = 1
    max_slope = -(game.b - game.a) - (game.c + game.d - game.a - game.b)
    checks.append(
        CheckResult(
            "example_welfare_decreasing",
            max_slope < 0,
            {"max_slope": max_slope, "W(0.5)": welfare(game, 0.5), "W(1)": welfare(game, 1.0)},
            None,
            "welfare strictly decreasing in p on (0, 1]",
            True,
        )
    )
    return checks


def run_verification(
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    grid_n: int = DEFAULT_GRID_N,
    seed: int = DEFAULT_SEED,
    draws: int = 50,
    mc_n: int = 1_000_000,
) -> VerificationReport:
    game = example_game()
    params = BehavioralParams(0.3, EXAMPLE_KAPPA)
    report = VerificationReport(seed=seed)
    add = report.checks.append

    add(check_oracle_agreement(draws, seed, tol=tol, max_iter=max_iter, grid_n=grid_n))
    add(check_derivative(seed=seed))
    add(check_threshold_invariance(game))
    add(check_welfare_algebra(draws, seed))
    add(check_welfare_dominance(draws, seed))
    add(check_comparative_statics(game, 0.3, 0.0, [0, 0.75, 1.5, 2.25, 3], tol=tol, max_iter=max_iter))
    add(check_tax_monotonicity(game, params, tol=tol, max_iter=max_iter))
    add(check_limits(game, params, 0.0, grid_n=grid_n, tol=tol, max_iter=max_iter))
    add(check_limits(game, params, 100.0, grid_n=grid_n, tol=tol, max_iter=max_iter))
    add(check_banach_rate(game, params))

    p_star = solve_banach(game, params, 0.0, tol=tol, max_iter=max_iter).p
    try:
        mc = monte_carlo_consistency(game, params, 0.0, p_star, mc_n, seed)
        again = monte_carlo_consistency(game, params, 0.0, p_star, mc_n, seed)
        add(mc)
        add(CheckResult(
            "monte_carlo_reproducible",
            mc.measured["frequency"] == again.measured["frequency"],
            {"frequency": mc.measured["frequency"]},
            0.0,
            "same seed gives the same sample",
        ))
    except DomainError as exc:
        add(CheckResult("monte_carlo", False, {"error": str(exc)}, None,
                        "equilibrium probability is reproduced as a choice frequency"))

    p_del, w_del = deletion_outcome(game)
    add(CheckResult(
        "deletion_outcome",
        p_del == 0.0 and w_del == game.b,
        {"p": p_del, "welfare": w_del},
        0.0,
        "deletion forces Y with welfare b",
    ))
    report.checks.extend(audit_reference_example(grid_n=max(grid_n, 1000)))
    return report
