"""Game protocols, move validation, capital updates, and recorded runs.

Four protocols share one round shape: Forecaster announces prices, Skeptic
announces bets, Reality announces the outcome, and the capital updates.
Everything downstream (strategies, verdicts, the CLI) works on the Trace
produced here, and any trace can be replayed against the update rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

from .hedges import Hedge


class GameKind(Enum):
    COIN_TOSSING = "coin_tossing"
    BOUNDED_FORECASTING = "bounded_forecasting"
    UNBOUNDED_FORECASTING = "unbounded_forecasting"
    GENERAL_HEDGE = "general_hedge"

    @property
    def uses_price(self) -> bool:
        """Coin/bounded games announce a single price p in [0, 1]."""
        return self in (GameKind.COIN_TOSSING, GameKind.BOUNDED_FORECASTING)


@dataclass(frozen=True)
class Protocol:
    kind: GameKind
    hedge: Optional[Hedge] = None
    initial_capital: float = 1.0

    def __post_init__(self):
        if not self.initial_capital > 0.0:
            raise ValueError("initial_capital must be positive")
        if self.kind is GameKind.GENERAL_HEDGE:
            if self.hedge is None:
                raise ValueError("general-hedge protocol requires a hedge")
        elif self.hedge is not None:
            raise ValueError(f"{self.kind.value} protocol carries no hedge")


@dataclass(frozen=True)
class ForecastMove:
    """Forecaster's announcement: p for coin/bounded games, (m, v) otherwise."""

    p: Optional[float] = None
    m: Optional[float] = None
    v: Optional[float] = None


@dataclass(frozen=True)
class SkepticBet:
    """Skeptic's announcement: M always, V only in mean-variance games."""

    M: float = 0.0
    V: Optional[float] = None


@dataclass(frozen=True)
class Outcome:
    x: float = 0.0


@dataclass(frozen=True)
class Violation:
    field: str
    message: str


@dataclass(frozen=True)
class RoundRecord:
    n: int
    forecast: ForecastMove
    bet: SkepticBet
    outcome: Outcome
    capital_after: float


@dataclass
class Trace:
    protocol: Protocol
    rounds: List[RoundRecord] = field(default_factory=list)
    seed: Optional[int] = None

    @property
    def capitals(self) -> List[float]:
        return [r.capital_after for r in self.rounds]


class InvalidMoveError(ValueError):
    def __init__(self, round_index: int, role: str, violation: Violation):
        self.round_index = round_index
        self.role = role
        self.violation = violation
        super().__init__(
            f"round {round_index}: {role} move invalid: "
            f"{violation.field}: {violation.message}"
        )


def validate_forecast(protocol: Protocol, f: ForecastMove) -> Optional[Violation]:
    if protocol.kind.uses_price:
        if f.p is None:
            return Violation("p", "price required for this protocol")
        if not 0.0 <= f.p <= 1.0:
            return Violation("p", f"p = {f.p} outside [0, 1]")
    else:
        if f.m is None or f.v is None:
            return Violation("m", "m and v required for this protocol")
        if f.v < 0.0:
            return Violation("v", f"v = {f.v} violates v >= 0")
    return None


def validate_bet(protocol: Protocol, s: SkepticBet) -> Optional[Violation]:
    if not protocol.kind.uses_price:
        if s.V is None:
            return Violation("V", "V required for this protocol")
        if s.V < 0.0:
            return Violation("V", f"V = {s.V} violates V >= 0")
    return None


def validate_outcome(protocol: Protocol, x: Outcome) -> Optional[Violation]:
    if protocol.kind is GameKind.COIN_TOSSING and x.x not in (0.0, 1.0):
        return Violation("x", f"x = {x.x} outside {{0, 1}}")
    if protocol.kind is GameKind.BOUNDED_FORECASTING and not 0.0 <= x.x <= 1.0:
        return Violation("x", f"x = {x.x} outside [0, 1]")
    return None


def validate_moves(
    protocol: Protocol, f: ForecastMove, s: SkepticBet, x: Outcome
) -> Optional[Violation]:
    """First domain violation among the three announcements, or None."""
    return (
        validate_forecast(protocol, f)
        or validate_bet(protocol, s)
        or validate_outcome(protocol, x)
    )


def capital_update(
    protocol: Protocol, k_prev: float, f: ForecastMove, s: SkepticBet, x: Outcome
) -> float:
    """New capital after one round, per the protocol's update rule."""
    violation = validate_moves(protocol, f, s, x)
    if violation is not None:
        raise InvalidMoveError(0, "unknown", violation)
    if protocol.kind.uses_price:
        return k_prev + s.M * (x.x - f.p)
    centered = x.x - f.m
    if protocol.kind is GameKind.UNBOUNDED_FORECASTING:
        return k_prev + s.M * centered + s.V * (centered * centered - f.v)
    return k_prev + s.M * centered + s.V * (protocol.hedge.forward(centered) - f.v)


class Policy:
    """A stateful player.  reset() is called once per run, observe() once
    per completed round with the full record."""

    role = "policy"

    def reset(self, protocol: Protocol) -> None:
        pass

    def observe(self, record: RoundRecord) -> None:
        pass


class Forecaster(Policy):
    role = "forecaster"

    def forecast(self, n: int) -> ForecastMove:
        raise NotImplementedError


class Skeptic(Policy):
    role = "skeptic"

    def bet(self, n: int, forecast: ForecastMove, k_prev: float) -> SkepticBet:
        raise NotImplementedError


class Reality(Policy):
    role = "reality"

    def outcome(
        self, n: int, forecast: ForecastMove, bet: SkepticBet, k_prev: float
    ) -> Outcome:
        raise NotImplementedError


class ScriptForecaster(Forecaster):
    """Forecaster reading moves from a function of the round index."""

    def __init__(self, script: Callable[[int], ForecastMove]):
        self.script = script

    def forecast(self, n: int) -> ForecastMove:
        return self.script(n)


class ZeroSkeptic(Skeptic):
    """Never bets; capital stays at its initial value."""

    def __init__(self):
        self._with_v = False

    def reset(self, protocol: Protocol) -> None:
        self._with_v = not protocol.kind.uses_price

    def bet(self, n, forecast, k_prev) -> SkepticBet:
        return SkepticBet(M=0.0, V=0.0 if self._with_v else None)


class CombinedSkeptic(Skeptic):
    """Convex combination of Skeptic policies, announced componentwise.

    Its capital process is the same convex combination of the component
    capital processes along any shared path.
    """

    def __init__(self, weights: Sequence[float], policies: Sequence[Skeptic]):
        if len(weights) != len(policies) or not policies:
            raise ValueError("weights and policies must have equal length >= 1")
        if any(w < 0.0 for w in weights):
            raise ValueError("weights must be nonnegative")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {sum(weights)!r}, expected 1")
        self.weights = list(weights)
        self.policies = list(policies)
        self._with_v = False

    def reset(self, protocol: Protocol) -> None:
        self._with_v = not protocol.kind.uses_price
        for p in self.policies:
            p.reset(protocol)

    def bet(self, n, forecast, k_prev) -> SkepticBet:
        bets = [p.bet(n, forecast, k_prev) for p in self.policies]
        m = sum(w * b.M for w, b in zip(self.weights, bets))
        if self._with_v:
            v = sum(w * (b.V or 0.0) for w, b in zip(self.weights, bets))
            return SkepticBet(M=m, V=v)
        return SkepticBet(M=m)

    def observe(self, record: RoundRecord) -> None:
        for p in self.policies:
            p.observe(record)


def combine_skeptic(weights: Sequence[float], policies: Sequence[Skeptic]) -> Skeptic:
    return CombinedSkeptic(weights, policies)


def run_game(
    protocol: Protocol,
    forecaster: Forecaster,
    skeptic: Skeptic,
    reality: Reality,
    horizon: int,
    seed: Optional[int] = None,
    stop_on_skeptic_fault: bool = False,
) -> Trace:
    """Play `horizon` rounds and record every move and capital.

    With stop_on_skeptic_fault, the run ends after the first round whose
    capital is negative: the Skeptic broke his collateral duty and nothing
    after that round is attributable to the other players.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    for policy in (forecaster, skeptic, reality):
        policy.reset(protocol)
    k = protocol.initial_capital
    rounds: List[RoundRecord] = []
    for n in range(1, horizon + 1):
        f = forecaster.forecast(n)
        violation = validate_forecast(protocol, f)
        if violation is not None:
            raise InvalidMoveError(n, "forecaster", violation)
        s = skeptic.bet(n, f, k)
        violation = validate_bet(protocol, s)
        if violation is not None:
            raise InvalidMoveError(n, "skeptic", violation)
        x = reality.outcome(n, f, s, k)
        violation = validate_outcome(protocol, x)
        if violation is not None:
            raise InvalidMoveError(n, "reality", violation)
        k = capital_update(protocol, k, f, s, x)
        record = RoundRecord(n=n, forecast=f, bet=s, outcome=x, capital_after=k)
        rounds.append(record)
        forecaster.observe(record)
        skeptic.observe(record)
        reality.observe(record)
        if stop_on_skeptic_fault and k < -1e-9 * protocol.initial_capital:
            break
    return Trace(protocol=protocol, rounds=rounds, seed=seed)


def replay_verify(trace: Trace, tol: float = 1e-12) -> Optional[int]:
    """Recompute capitals from the initial value; return the first
    mismatching round index, or None when the trace is consistent."""
    k = trace.protocol.initial_capital
    for record in trace.rounds:
        k = capital_update(trace.protocol, k, record.forecast, record.bet, record.outcome)
        if not math.isclose(k, record.capital_after, rel_tol=0.0, abs_tol=tol):
            return record.n
    return None
