"""Game-theoretic probability engine: betting protocols, forcing Skeptic
strategies, deterministic complying Reality strategies, and verification."""

from .engine import (
    CombinedSkeptic,
    Forecaster,
    ForecastMove,
    GameKind,
    InvalidMoveError,
    Outcome,
    Policy,
    Protocol,
    Reality,
    RoundRecord,
    ScriptForecaster,
    Skeptic,
    SkepticBet,
    Trace,
    Violation,
    ZeroSkeptic,
    capital_update,
    combine_skeptic,
    replay_verify,
    run_game,
    validate_moves,
)
from .hedges import (
    Growth,
    Hedge,
    HedgeValidationError,
    hedge_inverse,
    identity_growth,
    power_growth,
    power_hedge,
    validate_growth,
    validate_hedge,
)
from .skeptic import (
    BcCounters,
    ConvergentBcSkeptic,
    DivergentBcSkeptic,
    FictionalBcSkeptic,
    bc_convergent_bet,
    bc_divergent_bet,
    bc_fictional_bet,
    ceiling_index_update,
    heads_count_update,
)
from .reality import (
    BcComplyReality,
    BcComplyState,
    ComplyPhase,
    PhaseTag,
    UfgComplyReality,
    UfgComplyState,
    UfghComplyReality,
    UfghComplyState,
    bc_comply_step,
    bounded_avoid_match,
    derandomize_coin,
    first_round_comply,
    ufg_comply_step,
    ufgh_comply_step,
)
from .randomized import (
    RandomStream,
    bernoulli_reality,
    kolmogorov_sample,
    mix64,
    uniform_block,
)
from .analysis import (
    Verdict,
    epsilon_sequence_step,
    lower_probability_coin,
    strong_compliance_verdict,
    term_bound_check,
    upper_probability_coin,
)

__version__ = "0.1.0"
