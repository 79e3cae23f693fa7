"""Symmetric 2x2 coordination game with a status-quo switching cost.

Row player's payoffs::

          X    Y
     X    a    c
     Y    d    b

``X`` is the inherited default; ``p`` is always the probability of playing
``X``.  Choosing ``Y`` costs ``kappa`` and a tax ``t`` lowers both ``X``
cells.  All functions accept scalars or numpy arrays for ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from qresb.errors import DomainError, InvalidGame


@dataclass(frozen=True)
class CoordinationGame:
    a: float
    b: float
    c: float
    d: float
    alpha: float = field(init=False)
    gamma: float = field(init=False)
    welfare_monotone: bool = field(init=False)

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"payoff {name}={value!r} is not finite")
            object.__setattr__(self, name, float(value))
        if not self.a > self.c:
            raise InvalidGame("a<=c")
        if not self.b > self.d:
            raise InvalidGame("b<=d")
        if not self.b > self.a:
            raise InvalidGame("b<=a")
        # X must also be a best response to X, otherwise gamma <= 0
        if not self.a > self.d:
            raise InvalidGame("a<=d")
        object.__setattr__(self, "alpha", self.b - self.c)
        object.__setattr__(self, "gamma", self.a - self.d)
        object.__setattr__(
            self, "welfare_monotone", self.c + self.d <= self.a + self.b
        )

    @property
    def slope(self) -> float:
        """alpha + gamma, the magnitude of the payoff difference's slope in p."""
        return self.alpha + self.gamma


@dataclass(frozen=True)
class BehavioralParams:
    beta: float
    kappa: float

    def __post_init__(self):
        for name in ("beta", "kappa"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, float(value))


class PolicyKind(str, Enum):
    TAX = "tax"
    DELETION = "deletion"


@dataclass(frozen=True)
class Policy:
    """Tax on the status-quo action, or deletion of it.

    ``Policy.tax(0.0)`` is the no-intervention baseline.  ``t`` is ``None``
    for deletion.
    """

    kind: PolicyKind
    t: float | None = None

    def __post_init__(self):
        kind = PolicyKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is PolicyKind.TAX:
            if self.t is None or not math.isfinite(self.t) or self.t < 0:
                raise DomainError(f"tax rate must be finite and >= 0, got {self.t!r}")
            object.__setattr__(self, "t", float(self.t))
        else:
            object.__setattr__(self, "t", None)

    @classmethod
    def tax(cls, t: float) -> "Policy":
        return cls(PolicyKind.TAX, t)

    @classmethod
    def deletion(cls) -> "Policy":
        return cls(PolicyKind.DELETION)


def new_game(a: float, b: float, c: float, d: float) -> CoordinationGame:
    """Validate payoffs and build a :class:`CoordinationGame`.

    Raises :class:`InvalidGame` naming the violated ordering.
    """
    return CoordinationGame(a, b, c, d)


def _check_prob(p):
    if isinstance(p, (float, int)):
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probability outside [0, 1]: {p!r}")
        return
    arr = np.asarray(p, dtype=float)
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise DomainError(f"probability outside [0, 1]: {p!r}")


def _check_tax(t: float):
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"tax rate must be finite and >= 0, got {t!r}")


def expected_payoff_x(game: CoordinationGame, p):
    """U(X, p) = p*a + (1-p)*c."""
    _check_prob(p)
    return p * game.a + (1 - p) * game.c


def expected_payoff_y(game: CoordinationGame, p):
    """U(Y, p) = p*d + (1-p)*b, gross of the switching cost."""
    _check_prob(p)
    return p * game.d + (1 - p) * game.b


def payoff_difference(game: CoordinationGame, params: BehavioralParams, t: float, p):
    """Effective advantage of Y over X: alpha - kappa + t - p*(alpha+gamma).

    Positive values favour switching away from the status quo.
    """
    _check_prob(p)
    _check_tax(t)
    return game.alpha - params.kappa + t - p * game.slope


def welfare(game: CoordinationGame, p):
    """Expected per-player payoff when both players put weight ``p`` on X."""
    _check_prob(p)
    q = 1 - p
    return p * p * game.a + p * q * (game.c + game.d) + q * q * game.b


def welfare_rearranged(game: CoordinationGame, p):
    """Same quantity as :func:`welfare`, written as b - p(b-a) + p(1-p)(c+d-a-b)."""
    _check_prob(p)
    return (
        game.b
        - p * (game.b - game.a)
        + p * (1 - p) * (game.c + game.d - game.a - game.b)
    )
