"""Proposal-lifecycle scenarios and turnout statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from daosim.dynamics import check_seed
from daosim.errors import ValidationError


@dataclass(frozen=True)
class Proposal:
    proposal_id: int
    voters: frozenset[int]
    yes: frozenset[int]

    def turnout(self, n_members: int) -> float:
        return len(self.voters) / n_members

    @property
    def approved(self) -> bool:
        """Strict majority of those voting; abstainers do not count."""
        return 2 * len(self.yes) > len(self.voters)


@dataclass(frozen=True)
class ProposalHistory:
    n_members: int
    proposals: tuple[Proposal, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.n_members < 1:
            raise ValidationError(f"n_members must be at least 1, got {self.n_members}")
        members = range(self.n_members)
        for p in self.proposals:
            if not all(v in members for v in p.voters):
                raise ValidationError(f"proposal {p.proposal_id}: voter outside the member set")
            if not p.yes <= p.voters:
                raise ValidationError(f"proposal {p.proposal_id}: yes votes from non-voters")

    def to_json(self) -> dict:
        return {
            "n_members": self.n_members,
            "proposals": [
                {"id": p.proposal_id, "voters": sorted(p.voters), "yes": sorted(p.yes)} for p in self.proposals
            ],
        }


@dataclass(frozen=True)
class TurnoutMetrics:
    average_turnout: float
    cumulative_turnout: float
    per_proposal: list[float]
    approval_rate: float

    def to_json(self) -> dict:
        return {
            "average_turnout": self.average_turnout,
            "cumulative_turnout": self.cumulative_turnout,
            "per_proposal": list(self.per_proposal),
            "approval_rate": self.approval_rate,
        }


def _rate(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ValidationError(f"{name} must lie in [0, 1], got {value!r}")


def simulate_proposals(
    n_members: int,
    k: int,
    participation: float | Sequence[float],
    approve_rate: float,
    seed: int,
) -> ProposalHistory:
    """Bernoulli turnout scenario.

    For each of ``k`` proposals every member votes independently with their
    participation rate, and each voter says yes with ``approve_rate``.
    """
    if not isinstance(n_members, int) or n_members < 1:
        raise ValidationError(f"n_members must be a positive integer, got {n_members!r}")
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k!r}")
    if isinstance(participation, (int, float)):
        rates = np.full(n_members, float(participation))
    else:
        rates = np.asarray(participation, dtype=float)
        if rates.shape != (n_members,):
            raise ValidationError(f"participation list must have {n_members} entries, got {rates.size}")
    for r in rates.tolist():
        _rate("participation", r)
    _rate("approve_rate", approve_rate)
    check_seed(seed)
    rng = np.random.default_rng(seed)
    proposals = []
    for pid in range(k):
        votes = rng.random(n_members) < rates
        yes = votes & (rng.random(n_members) < approve_rate)
        proposals.append(Proposal(pid, frozenset(np.flatnonzero(votes).tolist()), frozenset(np.flatnonzero(yes).tolist())))
    return ProposalHistory(n_members, tuple(proposals))


def turnout_metrics(history: ProposalHistory) -> TurnoutMetrics:
    if not history.proposals:
        raise ValidationError("turnout of an empty proposal history is undefined")
    n = history.n_members
    per = [p.turnout(n) for p in history.proposals]
    everyone = frozenset().union(*(p.voters for p in history.proposals))
    return TurnoutMetrics(
        average_turnout=sum(per) / len(per),
        cumulative_turnout=len(everyone) / n,
        per_proposal=per,
        approval_rate=sum(p.approved for p in history.proposals) / len(history.proposals),
    )
