"""Skeptic betting strategies for the coin-tossing game.

Three related bets driven by two counters: the number of heads seen so far
and the integer ceiling index of the running price sum.  The divergent-side
bet profits when prices keep accumulating but heads stop; the convergent-side
bet profits from heads once the price sum has settled; their difference (with
exponents shifted by one) is the "fictional" bet that Reality mixes into her
own responses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Union

from .engine import ForecastMove, Protocol, RoundRecord, Skeptic, SkepticBet


@dataclass(frozen=True)
class BcCounters:
    """Running head count b, price partial sum, and its ceiling index c.

    c is the unique integer with c - 1 <= partial_sum < c; an exactly
    integer partial sum rounds up, so the empty sum gives c = 1.

    The partial sum is kept as an exact rational: floats are dyadic
    rationals, so summing them exactly is cheap, and it keeps c honest on
    scripts like p_n = 2^-n whose float partial sums would round up to an
    integer they never actually reach.
    """

    b: int = 0
    partial_sum: Union[float, Fraction] = Fraction(0)
    c: int = 1


def heads_count_update(counters: BcCounters, head: bool) -> BcCounters:
    if not head:
        return counters
    return replace(counters, b=counters.b + 1)


def ceiling_index_update(counters: BcCounters, p: float) -> BcCounters:
    if p < 0.0:
        raise ValueError(f"price increment must be >= 0, got {p}")
    total = Fraction(counters.partial_sum) + Fraction(p)
    return replace(counters, partial_sum=total, c=int(math.floor(total)) + 1)


def bc_divergent_bet(counters: BcCounters) -> float:
    """M = -2^(-b-1): shorts heads, profits from tails at positive prices."""
    return -(2.0 ** (-counters.b - 1))


def bc_convergent_bet(counters: BcCounters) -> float:
    """M = 2^(-c-1): backs heads once the price sum is nearly spent."""
    return 2.0 ** (-counters.c - 1)


def bc_fictional_bet(counters: BcCounters) -> float:
    """M = 2^(-c-2) - 2^(-b-2): half-weighted mix of both directions."""
    return 2.0 ** (-counters.c - 2) - 2.0 ** (-counters.b - 2)


class _CounterSkeptic(Skeptic):
    """Coin-game Skeptic driven by BcCounters.

    The ceiling index is refreshed with the current price before betting
    (Forecaster moves first); the head count only after Reality's move.
    """

    def __init__(self):
        self.counters = BcCounters()

    def reset(self, protocol: Protocol) -> None:
        self.counters = BcCounters()

    def _formula(self, counters: BcCounters) -> float:
        raise NotImplementedError

    def bet(self, n: int, forecast: ForecastMove, k_prev: float) -> SkepticBet:
        self.counters = ceiling_index_update(self.counters, forecast.p)
        return SkepticBet(M=self._formula(self.counters))

    def observe(self, record: RoundRecord) -> None:
        self.counters = heads_count_update(self.counters, record.outcome.x == 1.0)


class DivergentBcSkeptic(_CounterSkeptic):
    def _formula(self, counters: BcCounters) -> float:
        return bc_divergent_bet(counters)


class ConvergentBcSkeptic(_CounterSkeptic):
    def _formula(self, counters: BcCounters) -> float:
        return bc_convergent_bet(counters)


class FictionalBcSkeptic(_CounterSkeptic):
    def _formula(self, counters: BcCounters) -> float:
        return bc_fictional_bet(counters)


class BangBangSkeptic(Skeptic):
    """Sign-flipping adversary: M alternates +/- amplitude each round.

    In mean-variance games V alternates between 0 and v_amplitude.
    """

    def __init__(self, amplitude: float = 1.0, v_amplitude: float = 1.0):
        self.amplitude = amplitude
        self.v_amplitude = v_amplitude
        self._with_v = False

    def reset(self, protocol: Protocol) -> None:
        self._with_v = not protocol.kind.uses_price

    def bet(self, n: int, forecast: ForecastMove, k_prev: float) -> SkepticBet:
        m = self.amplitude if n % 2 else -self.amplitude
        if self._with_v:
            return SkepticBet(M=m, V=self.v_amplitude if n % 2 == 0 else 0.0)
        return SkepticBet(M=m)
