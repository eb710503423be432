"""Concentration of token holdings."""

from __future__ import annotations

import math
from dataclasses import dataclass

from daosim.errors import ValidationError
from daosim.governance.ballots import TokenLedger


@dataclass(frozen=True)
class Centralization:
    gini: float
    nakamoto: int

    def to_json(self) -> dict:
        return {"gini": self.gini, "nakamoto": self.nakamoto}


def gini(values: list[float]) -> float:
    """Population Gini coefficient, sum_ij |x_i - x_j| / (2 n sum x).

    Evaluated through the equivalent sorted form sum_i (2i - n - 1) x_(i) / (n sum x).
    """
    xs = sorted(values)
    n = len(xs)
    total = math.fsum(xs)
    if n == 0 or total <= 0:
        raise ValidationError("Gini coefficient needs at least one positive value")
    num = math.fsum((2 * i - n - 1) * x for i, x in enumerate(xs, start=1))
    return num / (n * total)


def nakamoto_coefficient(values: list[float]) -> int:
    """Smallest number of largest holders whose combined share exceeds one half."""
    total = math.fsum(values)
    if total <= 0:
        raise ValidationError("Nakamoto coefficient needs at least one positive value")
    acc = []
    for count, x in enumerate(sorted(values, reverse=True), start=1):
        acc.append(x)
        if 2 * math.fsum(acc) > total:
            return count
    raise AssertionError("unreachable: the full set always exceeds half of a positive total")


def centralization_metrics(ledger: TokenLedger) -> Centralization:
    values = list(ledger.balances.values())
    if not any(v > 0 for v in values):
        raise ValidationError("token ledger has no positive balance")
    return Centralization(gini(values), nakamoto_coefficient(values))
