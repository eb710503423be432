"""Aggregation methods: plurality, approval, instant-runoff and quadratic voting.

Every tie is resolved in favour of the lexicographically smallest candidate
id. In an instant-runoff elimination this means the largest id among the
tied last-placed candidates is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from daosim.errors import ValidationError
from daosim.governance.ballots import BallotSet, TokenLedger


@dataclass(frozen=True)
class Round:
    counts: dict[str, float]
    active_weight: float
    eliminated: str | None = None
    winner: str | None = None

    def to_json(self) -> dict:
        return {
            "counts": dict(sorted(self.counts.items())),
            "active_weight": self.active_weight,
            "eliminated": self.eliminated,
            "winner": self.winner,
        }


@dataclass(frozen=True)
class TallyResult:
    scores: dict[str, float]
    winner: str
    rounds: list[Round] | None = None
    costs: dict[str, int] | None = None

    def to_json(self) -> dict:
        out: dict = {"scores": dict(self.scores), "winner": self.winner}
        if self.rounds is not None:
            out["rounds"] = [r.to_json() for r in self.rounds]
        if self.costs is not None:
            out["costs"] = dict(self.costs)
        return out


def argmax(scores: Mapping[str, float]) -> str:
    """Highest score; ties go to the smallest id."""
    return min(scores, key=lambda c: (-scores[c], c))


def _require(ballots: BallotSet, kind: str) -> None:
    if ballots.kind != kind:
        raise ValidationError(f"expected {kind} ballots, got {ballots.kind}")


def _weight(weights: TokenLedger | None, voter: str) -> float:
    return 1 if weights is None else weights.weight(voter)


def tally_single_choice(ballots: BallotSet, weights: TokenLedger | None = None) -> TallyResult:
    _require(ballots, "single_choice")
    scores = {c: 0 for c in ballots.candidates}
    for b in ballots.ballots:
        scores[b.choice] += _weight(weights, b.voter_id)
    return TallyResult(scores, argmax(scores))


def tally_approval(ballots: BallotSet, weights: TokenLedger | None = None) -> TallyResult:
    _require(ballots, "approval")
    scores = {c: 0 for c in ballots.candidates}
    for b in ballots.ballots:
        w = _weight(weights, b.voter_id)
        for c in b.choice:
            scores[c] += w
    return TallyResult(scores, argmax(scores))


def tally_ranked_irv(ballots: BallotSet, weights: TokenLedger | None = None) -> TallyResult:
    """Instant-runoff (Hare) count with a per-round record.

    A candidate wins once it holds strictly more than half of the weight still
    attached to a surviving candidate; exhausted ballots drop out of that pool.
    ``scores`` holds each candidate's count in the last round it survived.
    """
    _require(ballots, "ranked")
    weighted = [(b.choice, _weight(weights, b.voter_id)) for b in ballots.ballots if b.choice]
    if not weighted:
        raise ValidationError("all ranked ballots are empty")
    surviving = list(ballots.candidates)
    scores: dict[str, float] = {}
    rounds: list[Round] = []
    while True:
        alive = set(surviving)
        counts = {c: 0 for c in surviving}
        active = 0
        for ranking, w in weighted:
            top = next((c for c in ranking if c in alive), None)
            if top is not None:
                counts[top] += w
                active += w
        if active <= 0:
            raise ValidationError("no ballot carries positive weight")
        scores.update(counts)
        leader = argmax(counts)
        if 2 * counts[leader] > active:
            rounds.append(Round(counts, active, winner=leader))
            break
        low = min(counts.values())
        loser = max(c for c in surviving if counts[c] == low)
        rounds.append(Round(counts, active, eliminated=loser))
        surviving.remove(loser)
    ordered = {c: scores[c] for c in ballots.candidates}
    return TallyResult(ordered, leader, rounds)


def quadratic_cost(votes: Mapping[str, int]) -> int:
    return sum(v * v for v in votes.values())


def tally_quadratic(ballots: BallotSet, budget: int = 100) -> TallyResult:
    """Signed quadratic voting: ``v`` votes on a candidate cost ``v**2`` credits."""
    _require(ballots, "quadratic")
    if isinstance(budget, bool) or not isinstance(budget, int) or budget < 1:
        raise ValidationError(f"budget must be a positive integer, got {budget!r}")
    scores = {c: 0 for c in ballots.candidates}
    costs = {}
    for b in ballots.ballots:
        cost = quadratic_cost(b.choice)
        if cost > budget:
            raise ValidationError(f"voter {b.voter_id!r} spends {cost} credits, exceeding the budget of {budget}")
        costs[b.voter_id] = cost
        for c, v in b.choice.items():
            scores[c] += v
    return TallyResult(scores, argmax(scores), costs=costs)


def tally(ballots: BallotSet, weights: TokenLedger | None = None, budget: int = 100) -> TallyResult:
    """Dispatch on the ballot kind."""
    if ballots.kind == "single_choice":
        return tally_single_choice(ballots, weights)
    if ballots.kind == "approval":
        return tally_approval(ballots, weights)
    if ballots.kind == "ranked":
        return tally_ranked_irv(ballots, weights)
    if weights is not None:
        raise ValidationError("token weights are not supported for quadratic ballots")
    return tally_quadratic(ballots, budget)
