"""Damping sequence, hedge machinery, pricing, verdicts, term bound."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtpsim import (
    GameKind,
    Hedge,
    HedgeValidationError,
    Growth,
    Protocol,
    ZeroSkeptic,
    epsilon_sequence_step,
    hedge_inverse,
    identity_growth,
    lower_probability_coin,
    power_growth,
    power_hedge,
    run_game,
    strong_compliance_verdict,
    term_bound_check,
    upper_probability_coin,
    validate_growth,
    validate_hedge,
)
from gtpsim.analysis import MAX_PRICING_HORIZON
from gtpsim.engine import RoundRecord, Trace
from gtpsim.reality import ConstantReality

from _support import price_forecaster

COIN = Protocol(kind=GameKind.COIN_TOSSING)


# ---------------------------------------------------------------------------
# Damping sequence
# ---------------------------------------------------------------------------

def test_epsilon_first_step():
    eps, total = epsilon_sequence_step(0.0, 1.0)
    assert eps == 0.5 and total == 1.0


def test_epsilon_rejects_nonpositive_terms():
    with pytest.raises(ValueError):
        epsilon_sequence_step(0.0, 0.0)
    with pytest.raises(ValueError):
        epsilon_sequence_step(1.0, -2.0)


def test_epsilon_geometric_terms_converge_to_half():
    total = 0.0
    for k in range(1, 200):
        eps, total = epsilon_sequence_step(total, 2.0 ** -k)
    assert math.isclose(eps, 0.5, rel_tol=0.0, abs_tol=1e-12)


def test_epsilon_constant_terms_weighted_sum_diverges():
    total = 0.0
    weighted = 0.0
    for k in range(1, 501):
        eps, total = epsilon_sequence_step(total, 1.0)
        weighted += eps * 1.0
    assert weighted >= 5.0          # harmonic growth: H_501 - 1


@given(st.floats(0.0, 1e6, allow_nan=False), st.floats(1e-9, 1e6, allow_nan=False))
def test_epsilon_weight_times_term_at_most_one(running, a):
    eps, _ = epsilon_sequence_step(running, a)
    assert 0.0 < eps <= 1.0
    assert eps * a <= 1.0


# ---------------------------------------------------------------------------
# Hedge machinery
# ---------------------------------------------------------------------------

def test_hedge_inverse_closed_form_square():
    assert hedge_inverse(power_hedge(2.0), 9.0) == 3.0


def test_hedge_inverse_at_zero():
    assert hedge_inverse(power_hedge(1.5), 0.0) == 0.0


def test_hedge_inverse_power_three_halves():
    assert math.isclose(hedge_inverse(power_hedge(1.5), 8.0), 4.0, rel_tol=1e-12)


def test_hedge_inverse_bisection_fallback():
    blind = Hedge(forward=lambda x: abs(x) ** 1.5, inverse=None, name="blind")
    r = hedge_inverse(blind, 8.0)
    assert abs(blind.forward(r) - 8.0) <= 1e-9 * 8.0


def test_hedge_inverse_errors():
    with pytest.raises(ValueError):
        hedge_inverse(power_hedge(2.0), -1.0)
    capped = Hedge(forward=lambda x: min(x * x, 4.0), inverse=None, name="capped")
    with pytest.raises(ValueError):
        hedge_inverse(capped, 100.0)


@pytest.mark.parametrize("r", [1.0, 1.5, 2.0])
def test_hedge_validation_accepts_powers_in_range(r):
    validate_hedge(power_hedge(r))


def test_hedge_validation_rejects_quartic():
    with pytest.raises(HedgeValidationError):
        validate_hedge(power_hedge(4.0))   # h(x)/x^2 increases


def test_hedge_validation_rejects_cubic_growth():
    with pytest.raises(HedgeValidationError):
        validate_hedge(Hedge(forward=lambda x: abs(x) ** 3, name="cube"))


def test_hedge_validation_rejects_odd_function():
    with pytest.raises(HedgeValidationError):
        validate_hedge(Hedge(forward=lambda x: x, name="odd"))


def test_hedge_validation_rejects_nonzero_at_origin():
    with pytest.raises(HedgeValidationError):
        validate_hedge(Hedge(forward=lambda x: x * x + 1.0, name="shifted"))


def test_growth_validation():
    validate_growth(identity_growth())
    validate_growth(power_growth(2.0))
    with pytest.raises(HedgeValidationError):
        validate_growth(Growth(eval=lambda x: 1.0 / (1.0 + x), name="decay"))
    with pytest.raises(HedgeValidationError):
        validate_growth(Growth(eval=lambda x: -x, name="negative"))


# ---------------------------------------------------------------------------
# Pricing
# ---------------------------------------------------------------------------

def test_upper_probability_certain_event():
    assert upper_probability_coin([0.5, 0.2], lambda bits: True) == 1.0


def test_upper_probability_first_coordinate():
    assert math.isclose(
        upper_probability_coin([0.3], lambda bits: bits[0] == 1), 0.3, rel_tol=1e-15
    )


def test_upper_probability_majority_of_three():
    value = upper_probability_coin([0.5] * 3, lambda bits: sum(bits) >= 2)
    assert math.isclose(value, 0.5, rel_tol=0.0, abs_tol=1e-15)


def test_lower_probability_examples():
    assert lower_probability_coin([0.5, 0.5], lambda bits: True) == 1.0
    assert math.isclose(
        lower_probability_coin([0.3], lambda bits: bits[0] == 1), 0.3, rel_tol=1e-12
    )
    assert lower_probability_coin([0.5, 0.5], lambda bits: False) == 0.0


def test_pricing_input_validation():
    with pytest.raises(ValueError):
        upper_probability_coin([0.5] * (MAX_PRICING_HORIZON + 1), lambda bits: True)
    with pytest.raises(ValueError):
        upper_probability_coin([1.5], lambda bits: True)


@settings(deadline=None, max_examples=60)
@given(
    st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=1, max_size=8),
    st.integers(0, 2 ** 8 - 1),
)
def test_pricing_matches_leaf_enumeration(p_script, mask):
    n = len(p_script)
    members = {leaf for leaf in range(2 ** n) if (mask >> (leaf % 8)) & 1}

    def event(bits):
        leaf = 0
        for b in bits:
            leaf = (leaf << 1) | b
        return leaf in members

    expected = 0.0
    for leaf in members:
        prob = 1.0
        for i in range(n):
            bit = (leaf >> (n - 1 - i)) & 1
            prob *= p_script[i] if bit else 1.0 - p_script[i]
        expected += prob
    upper = upper_probability_coin(p_script, event)
    lower = lower_probability_coin(p_script, event)
    assert math.isclose(upper, expected, rel_tol=0.0, abs_tol=1e-12)
    assert lower <= upper + 1e-12
    complement = upper_probability_coin(p_script, lambda bits: not event(bits))
    assert math.isclose(upper + complement, 1.0, rel_tol=0.0, abs_tol=1e-12)


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------

def test_verdict_zero_bet_trace():
    trace = run_game(
        COIN, price_forecaster([0.4]), ZeroSkeptic(), ConstantReality(1.0), 20
    )
    verdict = strong_compliance_verdict(trace)
    assert verdict.skeptic_duty_ok and verdict.strong_bound_ok
    assert verdict.sup_capital == 1.0
    assert verdict.event_proxy_ok is None


def test_verdict_flags_injected_bound_violation():
    trace = run_game(
        COIN, price_forecaster([0.4]), ZeroSkeptic(), ConstantReality(1.0), 6
    )
    bad = trace.rounds[4]
    trace.rounds[4] = RoundRecord(
        n=bad.n, forecast=bad.forecast, bet=bad.bet, outcome=bad.outcome,
        capital_after=1.1,
    )
    verdict = strong_compliance_verdict(trace)
    assert not verdict.strong_bound_ok
    assert verdict.sup_capital == 1.1
    assert any("round 5" in note for note in verdict.notes)


def test_verdict_event_proxy_is_evaluated():
    trace = run_game(
        COIN, price_forecaster([0.4]), ZeroSkeptic(), ConstantReality(1.0), 5
    )
    verdict = strong_compliance_verdict(
        trace, lambda t: all(r.outcome.x == 1.0 for r in t.rounds)
    )
    assert verdict.event_proxy_ok is True


# ---------------------------------------------------------------------------
# Term bound
# ---------------------------------------------------------------------------

def test_term_bound_zero_sequence():
    assert term_bound_check([0.0] * 5, [1.0] * 5, 0.0, 1)


def test_term_bound_detects_large_tail_term():
    assert not term_bound_check([0.0, 0.0, 10.0], [1.0, 1.0, 1.0], 0.0, 3)


def test_term_bound_harmonic_ratios():
    n = 50
    assert term_bound_check([1.0] * n, [float(k) for k in range(1, n + 1)], 0.0, 1)


def test_term_bound_input_validation():
    with pytest.raises(ValueError):
        term_bound_check([1.0], [1.0, 2.0], 0.0, 1)
    with pytest.raises(ValueError):
        term_bound_check([1.0, 1.0], [2.0, 1.0], 0.0, 1)
    with pytest.raises(ValueError):
        term_bound_check([1.0], [0.0], 0.0, 1)
