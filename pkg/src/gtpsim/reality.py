"""Reality's deterministic compliance strategies.

Each strategy runs a small phase machine.  Reality waits for the first
Skeptic bet she can answer with a strict capital decrease; from then on she
mixes the real Skeptic's bet with a fictional counter-driven bet and answers
by a sign/threshold rule, which keeps the capital at or below its starting
value forever while steering the path into the target event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

from .analysis import epsilon_sequence_step
from .engine import (
    ForecastMove,
    GameKind,
    Outcome,
    Protocol,
    Reality,
    RoundRecord,
    Skeptic,
    SkepticBet,
)
from .hedges import Growth, Hedge, hedge_inverse
from .skeptic import BcCounters, ceiling_index_update, heads_count_update


class PhaseTag(Enum):
    WAITING = "waiting"
    DEGENERATE = "degenerate"
    MIXING = "mixing"


@dataclass(frozen=True)
class ComplyPhase:
    tag: PhaseTag = PhaseTag.WAITING
    n0: Optional[int] = None
    epsilon: Optional[float] = None
    k_n0: Optional[float] = None

    @property
    def mix_coeff(self) -> float:
        """epsilon * K_{n0} / (1 - epsilon), i.e. K_0 - K_{n0}."""
        return self.epsilon * self.k_n0 / (1.0 - self.epsilon)


def _qualify(phase: ComplyPhase, n: int, k_new: float, k0: float) -> ComplyPhase:
    """Transition out of Waiting after the first strict capital decrease."""
    if k_new == 0.0:
        return ComplyPhase(tag=PhaseTag.DEGENERATE, n0=n)
    return ComplyPhase(
        tag=PhaseTag.MIXING, n0=n, epsilon=1.0 - k_new / k0, k_n0=k_new
    )


def _threshold(phase: ComplyPhase, b: int, c: int) -> float:
    return phase.mix_coeff * (2.0 ** (-b - 2) - 2.0 ** (-c - 2))


# ---------------------------------------------------------------------------
# Coin-tossing game
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BcComplyState:
    phase: ComplyPhase = ComplyPhase()
    counters: BcCounters = BcCounters()
    n: int = 0


def bc_comply_step(
    state: BcComplyState, p: float, M: float, k_prev: float, k0: float
) -> Tuple[Outcome, BcComplyState]:
    """One round of the coin-game compliance strategy."""
    n = state.n + 1
    counters = ceiling_index_update(state.counters, p)
    c_changed = counters.c != state.counters.c
    phase = state.phase
    if phase.tag is PhaseTag.WAITING:
        if M == 0.0:
            x = 1.0 if c_changed else 0.0
        else:
            x = 1.0 if M < 0.0 else 0.0
            delta = M * (x - p)
            if delta < 0.0:
                phase = _qualify(phase, n, k_prev + delta, k0)
            # else: degenerate price (p = 1 with M < 0, p = 0 with M > 0);
            # the answer is capital-neutral and the wait continues.
    elif phase.tag is PhaseTag.DEGENERATE:
        x = 1.0 if c_changed else 0.0
    else:
        d = _threshold(phase, state.counters.b, counters.c)
        x = 1.0 if M <= d else 0.0
    counters = heads_count_update(counters, x == 1.0)
    return Outcome(x), BcComplyState(phase=phase, counters=counters, n=n)


class BcComplyReality(Reality):
    """Policy wrapper around bc_comply_step."""

    def __init__(self):
        self.state = BcComplyState()
        self.k0 = 1.0

    def reset(self, protocol: Protocol) -> None:
        self.state = BcComplyState()
        self.k0 = protocol.initial_capital

    def outcome(self, n, forecast, bet, k_prev) -> Outcome:
        out, self.state = bc_comply_step(
            self.state, forecast.p, bet.M, k_prev, self.k0
        )
        return out


# ---------------------------------------------------------------------------
# Unbounded forecasting game
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UfgComplyState:
    """Counters reinterpretted for the unbounded game: b counts rounds with
    nonzero centered outcome, the partial sum accumulates v_k / k^2."""

    phase: ComplyPhase = ComplyPhase()
    counters: BcCounters = BcCounters()
    n: int = 0


def ufg_comply_step(
    state: UfgComplyState, f: ForecastMove, s: SkepticBet, k_prev: float, k0: float
) -> Tuple[Outcome, UfgComplyState]:
    """One round of the unbounded-game compliance strategy.

    Rounds with v = 0 answer x = m, leave the counters untouched, and never
    end the waiting phase.
    """
    n = state.n + 1
    m, v = f.m, f.v
    M, V = s.M, s.V
    if v == 0.0:
        return Outcome(m), replace(state, n=n)
    counters = ceiling_index_update(state.counters, v / (n * n))
    c_changed = counters.c != state.counters.c
    phase = state.phase
    if phase.tag is PhaseTag.WAITING:
        if M == 0.0 and V == 0.0:
            xt = float(n) if c_changed else 0.0
        else:
            if V == 0.0:
                xt = 1.0 if M < 0.0 else -1.0
            else:
                xt = 0.0
            delta = M * xt + V * (xt * xt - v)
            phase = _qualify(phase, n, k_prev + delta, k0)
    elif phase.tag is PhaseTag.DEGENERATE:
        xt = float(n) if c_changed else 0.0
    else:
        d = _threshold(phase, state.counters.b, counters.c) / (n * n)
        if v < n * n:
            if V <= d:
                xt = float(n) if M < 0.0 else -float(n)
            else:
                xt = 0.0
        else:
            root = math.sqrt(v)
            xt = root if M < 0.0 else -root
    counters = heads_count_update(counters, xt != 0.0)
    return Outcome(m + xt), UfgComplyState(phase=phase, counters=counters, n=n)


class UfgComplyReality(Reality):
    """Policy wrapper around ufg_comply_step."""

    def __init__(self):
        self.state = UfgComplyState()
        self.k0 = 1.0

    def reset(self, protocol: Protocol) -> None:
        self.state = UfgComplyState()
        self.k0 = protocol.initial_capital

    def outcome(self, n, forecast, bet, k_prev) -> Outcome:
        out, self.state = ufg_comply_step(self.state, forecast, bet, k_prev, self.k0)
        return out


# ---------------------------------------------------------------------------
# General-hedge game
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UfghComplyState:
    """As UfgComplyState, with the partial sum accumulating
    eps_k * v_k / g(A_k) and running state for the damping sequence."""

    phase: ComplyPhase = ComplyPhase()
    counters: BcCounters = BcCounters()
    n: int = 0
    a_total: float = 0.0        # A_n = sum of v_k so far
    eps_running: float = 0.0    # sum of a_k = v_k / g(A_k) so far
    eps: float = 1.0            # current damping weight


def ufgh_comply_step(
    state: UfghComplyState,
    f: ForecastMove,
    s: SkepticBet,
    hedge: Hedge,
    growth: Growth,
    k_prev: float,
    k0: float,
) -> Tuple[Outcome, UfghComplyState]:
    """One round of the general-hedge compliance strategy."""
    n = state.n + 1
    m, v = f.m, f.v
    M, V = s.M, s.V
    if v == 0.0:
        return Outcome(m), replace(state, n=n)
    a_total = state.a_total + v
    g_a = growth.eval(a_total)
    if g_a <= 0.0:
        raise ValueError(f"growth must stay positive, g({a_total}) = {g_a}")
    eps, eps_running = epsilon_sequence_step(state.eps_running, v / g_a)
    counters = ceiling_index_update(state.counters, eps * v / g_a)
    c_changed = counters.c != state.counters.c
    phase = state.phase
    scale = g_a / eps
    if phase.tag is PhaseTag.WAITING:
        if M == 0.0 and V == 0.0:
            xt = hedge_inverse(hedge, scale) if c_changed else 0.0
        else:
            if V == 0.0:
                xt = 1.0 if M < 0.0 else -1.0
                delta = M * xt
            else:
                xt = 0.0
                delta = V * (hedge.forward(0.0) - v)
            phase = _qualify(phase, n, k_prev + delta, k0)
    elif phase.tag is PhaseTag.DEGENERATE:
        xt = hedge_inverse(hedge, scale) if c_changed else 0.0
    else:
        d = _threshold(phase, state.counters.b, counters.c) / scale
        if eps * v < g_a:
            if V <= d:
                e = hedge_inverse(hedge, scale)
                xt = e if M < 0.0 else -e
            else:
                xt = 0.0
        else:
            root = hedge_inverse(hedge, v)
            xt = root if M < 0.0 else -root
    counters = heads_count_update(counters, xt != 0.0)
    return Outcome(m + xt), UfghComplyState(
        phase=phase,
        counters=counters,
        n=n,
        a_total=a_total,
        eps_running=eps_running,
        eps=eps,
    )


class UfghComplyReality(Reality):
    """Policy wrapper around ufgh_comply_step."""

    def __init__(self, growth: Growth):
        self.growth = growth
        self.state = UfghComplyState()
        self.k0 = 1.0
        self.hedge: Optional[Hedge] = None

    def reset(self, protocol: Protocol) -> None:
        if protocol.kind is not GameKind.GENERAL_HEDGE:
            raise ValueError("UfghComplyReality requires the general-hedge game")
        self.state = UfghComplyState()
        self.k0 = protocol.initial_capital
        self.hedge = protocol.hedge

    def outcome(self, n, forecast, bet, k_prev) -> Outcome:
        out, self.state = ufgh_comply_step(
            self.state, forecast, bet, self.hedge, self.growth, k_prev, self.k0
        )
        return out


# ---------------------------------------------------------------------------
# Derandomized coin-game Reality from a fictional Skeptic
# ---------------------------------------------------------------------------

class DerandomizedCoinReality(Reality):
    """Reality policy built from a capital-non-negative fictional Skeptic.

    Each round she averages the real bet with the fictional bet and plays
    heads exactly when the average is <= 0, which makes the averaged
    ("mixture") capital non-increasing.  The per-round mixture capitals are
    kept on the instance for auditing.
    """

    def __init__(self, fictional: Skeptic):
        self.fictional = fictional
        self.mixture_capitals = [1.0]
        self.fictional_capitals = [1.0]

    def reset(self, protocol: Protocol) -> None:
        self.fictional.reset(protocol)
        k0 = protocol.initial_capital
        self.mixture_capitals = [k0]
        self.fictional_capitals = [k0]

    def outcome(self, n, forecast, bet, k_prev) -> Outcome:
        p = forecast.p
        m_f = self.fictional.bet(n, forecast, self.fictional_capitals[-1]).M
        m_o = 0.5 * (bet.M + m_f)
        x = 1.0 if m_o <= 0.0 else 0.0
        self.mixture_capitals.append(self.mixture_capitals[-1] + m_o * (x - p))
        self.fictional_capitals.append(self.fictional_capitals[-1] + m_f * (x - p))
        return Outcome(x)

    def observe(self, record: RoundRecord) -> None:
        self.fictional.observe(record)


def derandomize_coin(fictional: Skeptic) -> DerandomizedCoinReality:
    return DerandomizedCoinReality(fictional)


# ---------------------------------------------------------------------------
# Example strategies: first-round head, avoid-the-price
# ---------------------------------------------------------------------------

class FirstRoundComplyReality(Reality):
    """Guarantees "p_1 > 0 implies x_1 = 1" with sup capital = K_1.

    Round one answers the price's sign; afterwards every bet is answered on
    its losing side, so the capital never rises again.
    """

    def outcome(self, n, forecast, bet, k_prev) -> Outcome:
        if n == 1:
            return Outcome(1.0 if forecast.p > 0.0 else 0.0)
        return Outcome(1.0 if bet.M < 0.0 else 0.0)


def first_round_comply() -> FirstRoundComplyReality:
    return FirstRoundComplyReality()


class BoundedAvoidMatchReality(Reality):
    """Bounded-game Reality that never matches the price and caps capital at q.

    At interior prices she answers the bet's losing side; at the endpoints
    she steps inside (0, 1) by a gap small enough that the round's gain is
    at most half the remaining headroom (q - K)/2.
    """

    def __init__(self, q: float):
        self.q = q

    def reset(self, protocol: Protocol) -> None:
        if protocol.kind is not GameKind.BOUNDED_FORECASTING:
            raise ValueError("BoundedAvoidMatchReality requires the bounded game")
        if not protocol.initial_capital < self.q < 1.0:
            raise ValueError(
                f"q = {self.q} must lie in (initial capital, 1) ="
                f" ({protocol.initial_capital}, 1)"
            )

    def outcome(self, n, forecast, bet, k_prev) -> Outcome:
        p, M = forecast.p, bet.M
        if p == 0.0 or p == 1.0:
            gap = min(0.5, (self.q - k_prev) / (2.0 * abs(M) + 1.0))
            return Outcome(gap if p == 0.0 else 1.0 - gap)
        return Outcome(1.0 if M <= 0.0 else 0.0)


def bounded_avoid_match(q: float) -> BoundedAvoidMatchReality:
    return BoundedAvoidMatchReality(q)


# ---------------------------------------------------------------------------
# Scripted outcomes
# ---------------------------------------------------------------------------

class ConstantReality(Reality):
    """Always announces the same outcome (e.g. all tails, or a broken
    always-heads player used to probe the Skeptic side)."""

    def __init__(self, x: float):
        self.x = x

    def outcome(self, n, forecast, bet, k_prev) -> Outcome:
        return Outcome(self.x)
