"""Hedge and growth functions for the general-hedge forecasting game.

A hedge h replaces the quadratic term of the capital update.  To be usable
it must be even and nonnegative, h(x)/x nondecreasing and h(x)/x^2
nonincreasing on x > 0, and vanish at 0.  Validation samples these
conditions on a dyadic grid rather than proving them symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

_GRID = [2.0 ** k for k in range(-10, 11)]
_REL_TOL = 1e-9


class HedgeValidationError(ValueError):
    """A hedge or growth function failed one of its sampled conditions."""


@dataclass(frozen=True)
class Hedge:
    """Even payoff function h with an optional closed-form inverse on [0, inf)."""

    forward: Callable[[float], float]
    inverse: Optional[Callable[[float], float]] = None
    name: str = "hedge"

    def __call__(self, x: float) -> float:
        return self.forward(x)


@dataclass(frozen=True)
class Growth:
    """Positive nondecreasing scale function g."""

    eval: Callable[[float], float]
    name: str = "growth"

    def __call__(self, x: float) -> float:
        return self.eval(x)


def power_hedge(r: float) -> Hedge:
    """h(x) = |x|^r.  Valid for 1 <= r <= 2."""
    return Hedge(
        forward=lambda x: abs(x) ** r,
        inverse=lambda y: y ** (1.0 / r),
        name=f"power:r={r:g}",
    )


def identity_growth() -> Growth:
    return Growth(eval=lambda x: x, name="identity")


def power_growth(r: float) -> Growth:
    return Growth(eval=lambda x: x ** r, name=f"power:r={r:g}")


def validate_hedge(hedge: Hedge) -> None:
    """Check the hedge conditions on the sampled grid; raise on failure."""
    h = hedge.forward
    if abs(h(0.0)) > _REL_TOL:
        raise HedgeValidationError(f"{hedge.name}: h(0) = {h(0.0)!r}, expected 0")
    for x in _GRID:
        hx = h(x)
        if hx < 0.0:
            raise HedgeValidationError(f"{hedge.name}: h({x}) = {hx} < 0")
        if abs(hx - h(-x)) > _REL_TOL * max(1.0, abs(hx)):
            raise HedgeValidationError(f"{hedge.name}: h not even at x = {x}")
    slack = _REL_TOL
    for lo, hi in zip(_GRID, _GRID[1:]):
        r_lo, r_hi = h(lo) / lo, h(hi) / hi
        if r_hi < r_lo * (1.0 - slack) - slack:
            raise HedgeValidationError(
                f"{hedge.name}: h(x)/x decreases between {lo} and {hi}"
            )
        q_lo, q_hi = h(lo) / lo ** 2, h(hi) / hi ** 2
        if q_hi > q_lo * (1.0 + slack) + slack:
            raise HedgeValidationError(
                f"{hedge.name}: h(x)/x^2 increases between {lo} and {hi}"
            )
    if hedge.inverse is not None:
        for x in _GRID:
            y = h(x)
            back = h(hedge.inverse(y))
            if abs(back - y) > _REL_TOL * max(1.0, abs(y)):
                raise HedgeValidationError(
                    f"{hedge.name}: inverse round-trip failed at x = {x}"
                )


def validate_growth(growth: Growth, grid=None) -> None:
    """Check positivity and monotonicity on the sampled grid; raise on failure."""
    g = growth.eval
    grid = list(_GRID if grid is None else grid)
    values = [g(x) for x in grid]
    for x, gx in zip(grid, values):
        if gx <= 0.0:
            raise HedgeValidationError(f"{growth.name}: g({x}) = {gx} <= 0")
    for (x, lo), hi in zip(zip(grid, values), values[1:]):
        if hi < lo * (1.0 - _REL_TOL):
            raise HedgeValidationError(f"{growth.name}: g decreases after x = {x}")


def hedge_inverse(hedge: Hedge, y: float) -> float:
    """Solve h(r) = y for r >= 0.

    Uses the supplied closed form when present, otherwise bisection with a
    doubling bracket.  The result satisfies |h(r) - y| <= 1e-9 * max(1, y).
    """
    if y < 0.0:
        raise ValueError(f"hedge_inverse: y = {y} < 0")
    if y == 0.0:
        return 0.0
    if hedge.inverse is not None:
        return hedge.inverse(y)
    h = hedge.forward
    hi = 1.0
    for _ in range(200):
        if h(hi) >= y:
            break
        hi *= 2.0
    else:
        raise ValueError(f"hedge_inverse: no bracket, h({hi}) < {y}")
    lo = 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if h(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
