"""Command-line front end: ``qresb {solve,threshold,sweep,compare,verify}``.

Configuration comes from an optional JSON file (``--config``) with the
layout below; individual flags override file values.

.. code-block:: json

    {"payoffs": {"a": 6, "b": 7, "c": 1, "d": 2},
     "kappa": 1.5, "beta": 1.0,
     "policy": {"type": "tax", "t": 0.0},
     "solver": {"tol": 1e-12, "max_iter": 100000, "grid_n": 10000},
     "sweep": {"parameter": "t", "start": 0, "stop": 4, "steps": 81},
     "seed": 0}

Exit codes: 0 ok, 2 invalid input, 3 solver failure, 4 internal dominance
violation, 5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from qresb.equilibrium import (
    DEFAULT_GRID_N,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    contraction_modulus,
    fixed_point_map,
    solve,
)
from qresb.errors import DomainError, InvalidGame, NoConvergence, QRESBError
from qresb.game import BehavioralParams, Policy, PolicyKind, new_game, welfare
from qresb.policy import compare_policies, deletion_outcome, sweep, threshold_tax
from qresb.verification import EXAMPLE_BETA, EXAMPLE_KAPPA, EXAMPLE_PAYOFFS, run_verification

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3
EXIT_DOMINANCE = 4
EXIT_VERIFY = 5

CSV_HEADER = ["param", "value", "p", "welfare", "regime", "stable", "residual"]
FIGURE1_SWEEP = {"parameter": "t", "start": 0.0, "stop": 4.0, "steps": 81}


class ConfigError(ValueError):
    pass


@dataclass
class SolverConfig:
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    grid_n: int = DEFAULT_GRID_N


@dataclass
class SweepConfig:
    parameter: str
    start: float
    stop: float
    steps: int


@dataclass
class RunConfig:
    payoffs: dict = field(
        default_factory=lambda: dict(zip("abcd", EXAMPLE_PAYOFFS))
    )
    kappa: float = EXAMPLE_KAPPA
    beta: float = EXAMPLE_BETA
    policy: dict = field(default_factory=lambda: {"type": "tax", "t": 0.0})
    solver: SolverConfig = field(default_factory=SolverConfig)
    sweep: SweepConfig | None = None
    seed: int = 0

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {"payoffs", "kappa", "beta", "policy", "solver", "sweep", "seed"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls()
        if "payoffs" in raw:
            payoffs = raw["payoffs"]
            if set(payoffs) != set("abcd"):
                raise ConfigError("payoffs must have exactly the keys a, b, c, d")
            cfg.payoffs = {k: payoffs[k] for k in "abcd"}
        for key in ("kappa", "beta", "seed"):
            if key in raw:
                setattr(cfg, key, raw[key])
        if "policy" in raw:
            cfg.policy = {"type": "tax", "t": 0.0, **raw["policy"]}
        if "solver" in raw:
            try:
                cfg.solver = SolverConfig(**{**asdict(SolverConfig()), **raw["solver"]})
            except TypeError as exc:
                raise ConfigError(f"bad solver section: {exc}") from None
        if raw.get("sweep") is not None:
            try:
                cfg.sweep = SweepConfig(**raw["sweep"])
            except TypeError as exc:
                raise ConfigError(f"bad sweep section: {exc}") from None
        return cfg

    def validate(self):
        numbers = [*self.payoffs.values(), self.kappa, self.beta, self.solver.tol]
        if self.policy.get("type") == "tax":
            numbers.append(self.policy.get("t"))
        if self.sweep is not None:
            numbers += [self.sweep.start, self.sweep.stop]
        for x in numbers:
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                raise ConfigError(f"non-finite or non-numeric value: {x!r}")
        if self.policy.get("type") not in ("tax", "deletion"):
            raise ConfigError(f"policy type must be 'tax' or 'deletion', got {self.policy.get('type')!r}")
        for name in ("max_iter", "grid_n"):
            value = getattr(self.solver, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"solver.{name} must be a positive integer")
        if not self.solver.tol > 0:
            raise ConfigError("solver.tol must be > 0")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.sweep is not None:
            s = self.sweep
            if s.parameter not in ("t", "kappa", "beta"):
                raise ConfigError(f"sweep parameter must be t, kappa or beta, got {s.parameter!r}")
            if isinstance(s.steps, bool) or not isinstance(s.steps, int) or s.steps < 2:
                raise ConfigError("sweep steps must be an integer >= 2")
            if not s.start < s.stop:
                raise ConfigError("sweep start must be below stop")
            if s.start < 0:
                raise ConfigError(f"sweep over {s.parameter} must start at >= 0")

    def game(self):
        p = self.payoffs
        return new_game(p["a"], p["b"], p["c"], p["d"])

    def params(self):
        return BehavioralParams(self.beta, self.kappa)

    def policy_obj(self) -> Policy:
        if self.policy["type"] == "deletion":
            return Policy.deletion()
        return Policy.tax(self.policy["t"])


def _fmt(x) -> str:
    """12 significant digits for machine-readable numbers."""
    return f"{x:.12g}"


def _txt(x) -> str:
    return f"{x:.6g}"


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--seed", type=int)
    for name in ("a", "b", "c", "d", "kappa", "beta", "t"):
        common.add_argument(f"--{name}", type=float)
    common.add_argument("--deletion", action="store_true", help="use the deletion policy")
    common.add_argument("--tol", type=float)
    common.add_argument("--max-iter", type=int)
    common.add_argument("--grid-n", type=int)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="qresb",
        description="Logit equilibria with status-quo bias: tax vs. deletion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve for the equilibrium set")
    sub.add_parser("threshold", parents=[common], help="critical tax rate")
    sw = sub.add_parser("sweep", parents=[common], help="CSV parameter sweep")
    sw.add_argument("--figure1", action="store_true",
                    help="tax sweep over [0, 4] with 81 steps")
    sw.add_argument("--param", choices=["t", "kappa", "beta"])
    sw.add_argument("--start", type=float)
    sw.add_argument("--stop", type=float)
    sw.add_argument("--steps", type=int)
    cmp_ = sub.add_parser("compare", parents=[common], help="tax vs. deletion")
    cmp_.add_argument("--taxes", help="comma-separated tax rates ('' for none)")
    sub.add_parser("verify", parents=[common], help="run the verification suite")
    return parser


def load_config(args) -> RunConfig:
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        cfg = RunConfig.from_dict(raw)
    else:
        cfg = RunConfig()
    for name in "abcd":
        if getattr(args, name) is not None:
            cfg.payoffs[name] = getattr(args, name)
    if args.kappa is not None:
        cfg.kappa = args.kappa
    if args.beta is not None:
        cfg.beta = args.beta
    if args.deletion:
        cfg.policy = {"type": "deletion"}
    if args.t is not None:
        cfg.policy = {"type": "tax", "t": args.t}
    if args.seed is not None:
        cfg.seed = args.seed
    if args.tol is not None:
        cfg.solver.tol = args.tol
    if args.max_iter is not None:
        cfg.solver.max_iter = args.max_iter
    if args.grid_n is not None:
        cfg.solver.grid_n = args.grid_n
    if getattr(args, "figure1", False):
        cfg.sweep = SweepConfig(**FIGURE1_SWEEP)
    if getattr(args, "param", None) is not None or getattr(args, "start", None) is not None \
            or getattr(args, "stop", None) is not None or getattr(args, "steps", None) is not None:
        base = asdict(cfg.sweep) if cfg.sweep else {"parameter": "t", "start": 0.0, "stop": 1.0, "steps": 11}
        for key, attr in (("parameter", "param"), ("start", "start"), ("stop", "stop"), ("steps", "steps")):
            if getattr(args, attr) is not None:
                base[key] = getattr(args, attr)
        cfg.sweep = SweepConfig(**base)
    cfg.validate()
    return cfg


def cmd_solve(cfg: RunConfig, as_json: bool) -> tuple[str, int]:
    game, params, policy = cfg.game(), cfg.params(), cfg.policy_obj()
    modulus = contraction_modulus(game, params)
    if policy.kind is PolicyKind.DELETION:
        p, w = deletion_outcome(game)
        rows = [{"p": p, "welfare": w, "stable": True, "residual": 0.0, "iterations": 0}]
    else:
        eqs = solve(game, params, policy.t, tol=cfg.solver.tol,
                    max_iter=cfg.solver.max_iter, grid_n=cfg.solver.grid_n)
        rows = [{**e.to_dict(), "welfare": welfare(game, e.p)} for e in eqs]
    if as_json:
        out = {
            "game": {"a": game.a, "b": game.b, "c": game.c, "d": game.d,
                     "alpha": game.alpha, "gamma": game.gamma,
                     "welfare_monotone": game.welfare_monotone},
            "beta": params.beta,
            "kappa": params.kappa,
            "policy": {"type": policy.kind.value, "t": policy.t},
            "contraction_modulus": modulus,
            "contraction": modulus < 1.0,
            "equilibria": rows,
        }
        return json.dumps(out, indent=2) + "\n", EXIT_OK
    lines = [
        f"game: a={_txt(game.a)} b={_txt(game.b)} c={_txt(game.c)} d={_txt(game.d)}"
        f" (alpha={_txt(game.alpha)}, gamma={_txt(game.gamma)})",
        f"beta={_txt(params.beta)} kappa={_txt(params.kappa)} policy={policy.kind.value}"
        + (f" t={_txt(policy.t)}" if policy.t is not None else ""),
        f"contraction modulus: {_txt(modulus)}",
    ]
    if modulus >= 1.0 and policy.kind is PolicyKind.TAX:
        lines.append("WARNING: modulus >= 1, the logit map is not a contraction;"
                     " uniqueness is not guaranteed and all fixed points are listed")
    lines.append(f"equilibria: {len(rows)}")
    for r in rows:
        stab = "stable" if r["stable"] else "unstable"
        if r.get("slope") == 1.0:
            stab += " (marginal, |f'| = 1)"
        lines.append(f"  p={_txt(r['p'])} welfare={_txt(r['welfare'])} {stab}"
                     f" residual={_txt(r['residual'])}")
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_threshold(cfg: RunConfig, as_json: bool) -> tuple[str, int]:
    game, params = cfg.game(), cfg.params()
    t_bar = threshold_tax(game, params)
    f_half = fixed_point_map(game, params, t_bar, 0.5) if t_bar >= 0 else None
    if as_json:
        out = {"threshold_tax": t_bar, "beta": params.beta, "map_at_half": f_half}
        return json.dumps(out, indent=2) + "\n", EXIT_OK
    lines = [f"threshold tax: {_txt(t_bar)}"]
    if f_half is None:
        lines.append("threshold is negative: X is already the less likely action without a tax")
    else:
        lines.append(f"check: f(1/2) at t={_txt(t_bar)}, beta={_txt(params.beta)} is {f_half!r}")
    return "\n".join(lines) + "\n", EXIT_OK


def sweep_csv(cfg: RunConfig) -> str:
    s = cfg.sweep
    grid = np.linspace(s.start, s.stop, s.steps)
    t = cfg.policy.get("t", 0.0) if cfg.policy["type"] == "tax" else 0.0
    rows = sweep(cfg.game(), cfg.params(), s.parameter, grid, t=t,
                 tol=cfg.solver.tol, max_iter=cfg.solver.max_iter,
                 grid_n=cfg.solver.grid_n)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        if r.error is not None:
            writer.writerow([r.param, _fmt(r.value), "", "", "error", "", ""])
            continue
        writer.writerow([
            r.param,
            _fmt(r.value),
            _fmt(r.p),
            _fmt(r.welfare),
            r.regime.value if r.regime else "",
            "true" if r.stable else "false",
            _fmt(r.residual),
        ])
    return buf.getvalue()


def cmd_sweep(cfg: RunConfig, as_json: bool) -> tuple[str, int]:
    if cfg.sweep is None:
        raise ConfigError("sweep needs a sweep section, --figure1, or --param/--start/--stop/--steps")
    return sweep_csv(cfg), EXIT_OK


def _parse_taxes(text: str | None, cfg: RunConfig) -> list[float]:
    if text is None:
        return [cfg.policy["t"]] if cfg.policy["type"] == "tax" else []
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --taxes: {exc}") from None


def cmd_compare(cfg: RunConfig, taxes: list[float], as_json: bool) -> tuple[str, int]:
    game, params = cfg.game(), cfg.params()
    report = compare_policies(game, params, taxes, tol=cfg.solver.tol,
                              max_iter=cfg.solver.max_iter, grid_n=cfg.solver.grid_n)
    code = EXIT_DOMINANCE if report.dominance_violated else EXIT_OK
    if as_json:
        return json.dumps(report.to_dict(), indent=2) + "\n", code
    lines = [
        f"threshold tax: {_txt(report.threshold_tax)}",
        f"deletion: p={_txt(report.deletion_p)} welfare={_txt(report.deletion_welfare)}",
    ]
    for o in report.tax_equilibria:
        regime = o.regime.value if o.regime else "unclassified"
        stab = "stable" if o.equilibrium.stable else "unstable"
        lines.append(f"tax t={_txt(o.t)}: p={_txt(o.equilibrium.p)} welfare={_txt(o.welfare)}"
                     f" {regime} {stab}")
    for t, gap in report.welfare_gaps:
        lines.append(f"gap t={_txt(t)}: W(0) - W(p_t) = {_txt(gap)}")
    lines += [f"note: {n}" for n in report.notes]
    if report.dominance_certified and not report.welfare_gaps:
        lines.append("deletion dominance certified vacuously (no tax rates compared)")
    elif report.dominance_certified:
        lines.append(f"deletion dominance certified; minimum welfare gap {_txt(report.min_gap)}")
    elif not report.welfare_monotone:
        lines.append("dominance not certified (welfare ordering hypothesis fails: c + d > a + b)")
    else:
        lines.append(f"dominance not certified; minimum welfare gap {_txt(report.min_gap)}")
    return "\n".join(lines) + "\n", code


def cmd_verify(cfg: RunConfig, as_json: bool) -> tuple[str, int]:
    report = run_verification(tol=cfg.solver.tol, max_iter=cfg.solver.max_iter,
                              grid_n=cfg.solver.grid_n, seed=cfg.seed)
    code = EXIT_OK if report.passed else EXIT_VERIFY
    if as_json:
        return json.dumps(report.to_dict(), indent=2) + "\n", code
    return report.render(), code


def run(argv=None) -> tuple[str, str, int]:
    """Execute a command; returns ``(stdout_text, stderr_text, exit_code)``."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "solve":
            text, code = cmd_solve(cfg, args.json)
        elif args.command == "threshold":
            text, code = cmd_threshold(cfg, args.json)
        elif args.command == "sweep":
            text, code = cmd_sweep(cfg, args.json)
        elif args.command == "compare":
            text, code = cmd_compare(cfg, _parse_taxes(args.taxes, cfg), args.json)
        else:
            text, code = cmd_verify(cfg, args.json)
    except (ConfigError, InvalidGame, DomainError) as exc:
        return "", f"error: {exc}\n", EXIT_INVALID
    except (NoConvergence, QRESBError) as exc:
        return "", f"solver error: {exc}\n", EXIT_SOLVER
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        return "", "", code
    return text, "", code


def main(argv=None) -> int:
    out, err, code = run(argv)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
