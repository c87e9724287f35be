"""Predicted transcendence degrees: the sets U_r(s), V_r(s) and two ways of counting."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .ffq import is_prime


@dataclass(frozen=True)
class PredictionGrid:
    p: int
    d: int
    s: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"p = {self.p} is not prime")
        if self.d < 1 or self.s < 1:
            raise DomainError("d and s must be positive")


def special_sets(p: int, kind: str, r: int, s: int) -> list:
    """U_r(s) = {n <= s : p does not divide n, p^r - 1 does not divide n}; V_r(s) likewise except V = {} at p=2, r=1."""
    if r < 1 or s < 1:
        raise DomainError("r and s must be positive")
    if kind not in ("U", "V"):
        raise DomainError(f"kind must be U or V (got {kind!r})")
    if p == 2 and r == 1:
        return [1] if kind == "U" else []
    q1 = p ** r - 1
    return [n for n in range(1, s + 1) if n % p and n % q1]


def summand_terms(p: int, r: int, s: int) -> tuple:
    """(s, -floor(s/p), -floor(s/(q-1)), +floor(s/(p(q-1))), +1) for one r."""
    q1 = p ** r - 1
    return (s, -(s // p), -(s // q1), s // (p * q1), 1)


def trdeg_formula(grid: PredictionGrid) -> int:
    return sum(sum(summand_terms(grid.p, r, grid.s)) for r in range(1, grid.d + 1))


def trdeg_count(grid: PredictionGrid) -> int:
    """Sum over r of 1 + |V_r(s)|: the period plus the surviving zeta values."""
    return sum(1 + len(special_sets(grid.p, "V", r, grid.s)) for r in range(1, grid.d + 1))


def prediction_table(grid: PredictionGrid) -> dict:
    rows = []
    for r in range(1, grid.d + 1):
        terms = summand_terms(grid.p, r, grid.s)
        rows.append({"r": r, "terms": list(terms), "formula": sum(terms),
                     "count": 1 + len(special_sets(grid.p, "V", r, grid.s))})
    formula, count = trdeg_formula(grid), trdeg_count(grid)
    return {"p": grid.p, "d": grid.d, "s": grid.s, "rows": rows,
            "formula": formula, "count": count, "agree": formula == count}
