"""Named work budgets.

Expensive loops refuse to run past their budget instead of truncating.
Limits are on the natural size parameter of each routine (usually N).
"""

from __future__ import annotations

from collections.abc import Mapping

from .errors import BudgetExceeded

DEFAULT_BUDGETS: dict[str, int] = {
    # largest modulus for the recursive U^d evaluation, indexed by d
    "u2_max_n": 4096,
    "u3_max_n": 512,
    "u4_max_n": 128,
    # (prod |A_j|)^2 for box inner products
    "box_pairs": 4_000_000,
    # largest modulus for the dual function (O(N^3))
    "dual_max_n": 256,
    # N^2 for dense Lambda_k
    "lambda_pairs": 16_000_000,
    # p for the additive quadruple statistic (O(p^3))
    "quadruple_max_p": 256,
    # largest sieve bound
    "sieve_max": 50_000_000,
    # largest W in the W-trick
    "w_max": 10**15,
    # largest integer to factor by trial division
    "factor_max": 10**14,
    # largest N for the cyclic prime-weighted form (O(|supp| N))
    "cyclic_vdc_max_n": 20_000,
}


def budget(name: str, budgets: Mapping[str, int] | None = None) -> int:
    if budgets is not None and name in budgets:
        return int(budgets[name])
    try:
        return DEFAULT_BUDGETS[name]
    except KeyError:
        raise KeyError(f"unknown budget {name!r}") from None


def check(name: str, value: int, budgets: Mapping[str, int] | None = None) -> None:
    limit = budget(name, budgets)
    if value > limit:
        raise BudgetExceeded(f"{name}: {value} exceeds budget {limit}")
