"""Equivalence levels and verdict records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class Level(str, Enum):
    """Strength of an equivalence between two flows, weakest first."""

    TOPOLOGICAL = "topological"
    SOME_HOLDER = "some-holder"
    BETA_MINUS = "beta-minus"
    BETA_PLUS = "beta-plus"
    ALL_HOLDER = "all-holder"
    LIPSCHITZ = "lipschitz"
    SMOOTH = "smooth"

    @classmethod
    def parse(cls, name: str) -> "Level":
        """Accept the canonical tags plus a few spellings."""
        key = str(name).strip().lower().replace("ö", "o").replace("_", "-")
        aliases = {"holder": "all-holder", "hoelder": "all-holder", "linear": "smooth",
                   "diff": "smooth", "c1": "smooth", "top": "topological"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown equivalence level {name!r}") from None


# Position in the implication chain; equal rank means equal strength.
_RANK = {
    Level.TOPOLOGICAL: 0,
    Level.SOME_HOLDER: 0,
    Level.BETA_MINUS: 1,
    Level.BETA_PLUS: 2,
    Level.ALL_HOLDER: 3,
    Level.LIPSCHITZ: 4,
    Level.SMOOTH: 5,
}
_CHAIN = (Level.TOPOLOGICAL, Level.SOME_HOLDER, Level.ALL_HOLDER, Level.LIPSCHITZ, Level.SMOOTH)


def implied_levels(level: Level, equivalent: bool | None) -> tuple[str, ...]:
    """Levels whose verdict follows from this one through the hierarchy.

    An equivalence implies every weaker level; a non-equivalence rules out
    every stronger level. Exponent-specific levels are not listed.
    """
    if equivalent is None:
        return ()
    r = _RANK[level]
    if equivalent:
        return tuple(lv.value for lv in _CHAIN if _RANK[lv] <= r and lv != level)
    return tuple(lv.value for lv in _CHAIN if _RANK[lv] >= r and lv != level)


def _clean(v):
    if isinstance(v, float):
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Outcome of an equivalence decision.

    Attributes
    ----------
    level : Level
    equivalent : bool or None
        None when the question is open (only sufficient conditions known).
    alpha : float or None
        Time-rescaling witness: the conjugacy satisfies
        ``h(exp(tA) x) = exp(alpha t B) h(x)``.
    time_reversed : bool
        True when the witness reverses time (``alpha < 0``).
    reasons : tuple of str
        Machine-readable reason codes.
    beta : float or None
        Exponent for the exponent-specific levels.
    details : dict
        Supporting numbers (dimensions, exponents, cross ratio, ...).
    """

    level: Level
    equivalent: bool | None
    alpha: float | None = None
    time_reversed: bool = False
    reasons: tuple[str, ...] = ()
    beta: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def implied(self) -> tuple[str, ...]:
        return implied_levels(self.level, self.equivalent)

    def to_dict(self) -> dict:
        return _clean({
            "level": self.level.value,
            "equivalent": self.equivalent,
            "alpha": self.alpha,
            "time_reversed": self.time_reversed,
            "reasons": list(self.reasons),
            "beta": self.beta,
            "implied": list(self.implied),
            "details": self.details,
        })


@dataclass(frozen=True)
class CrossRatio:
    """Ratio of extreme exponent quotients for two hyperbolic flows.

    Attributes
    ----------
    rho_plus : float
        Value for the pairing of the exponents in their given order.
    rho_plus_reversed : float
        Value after reversing time in the first flow.
    rho : float
        The larger of the two; positive exactly when the flows are
        topologically equivalent.
    """

    rho_plus: float
    rho_plus_reversed: float
    rho: float

    @property
    def positive(self) -> bool:
        return self.rho > 0

    def to_dict(self) -> dict:
        return {"rho_plus": self.rho_plus, "rho_plus_reversed": self.rho_plus_reversed,
                "rho": self.rho}
