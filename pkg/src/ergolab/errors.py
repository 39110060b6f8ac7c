"""Exception types and the operation budget shared by the oracle paths."""

from __future__ import annotations

import os

DEFAULT_BUDGET = 10**9


class ErgolabError(Exception):
    """Base class for errors raised by this package."""


class InputError(ErgolabError, ValueError):
    """Malformed or out-of-contract input."""


class BudgetExceeded(ErgolabError, RuntimeError):
    """An exhaustive (oracle) evaluation would exceed the operation cap."""


class ContractViolation(ErgolabError, ArithmeticError):
    """A quantity that must be nonnegative came out clearly negative.

    Raised only when the negativity exceeds rounding noise; it signals a bug,
    not bad input.
    """


def operation_budget(budget: int | None = None) -> int:
    """Resolve the operation cap: explicit argument, then ``ERGOLAB_BUDGET``."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("ERGOLAB_BUDGET")
    if env:
        try:
            return int(float(env))
        except ValueError as exc:
            raise InputError(f"ERGOLAB_BUDGET is not a number: {env!r}") from exc
    return DEFAULT_BUDGET


def check_budget(cost: int, budget: int | None = None, what: str = "oracle") -> None:
    cap = operation_budget(budget)
    if cost > cap:
        raise BudgetExceeded(f"{what} too large: {cost} operations exceeds cap {cap}")


def clamp_nonnegative(value: float, tol: float = 1e-12, what: str = "quantity") -> float:
    """Clamp rounding noise below zero, reject genuine negativity."""
    if value < -tol:
        raise ContractViolation(f"{what} is negative ({value!r}) beyond tolerance {tol}")
    return max(value, 0.0)
