"""Ballot and token-ledger containers plus their CSV formats."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from daosim.errors import ValidationError

KINDS = ("single_choice", "approval", "ranked", "quadratic")


@dataclass(frozen=True)
class Ballot:
    """One voter's entry.

    ``choice`` depends on the ballot kind: a candidate id (single_choice), a
    frozenset of ids (approval), a tuple of ids best-first (ranked) or a
    mapping id -> signed integer votes (quadratic).
    """

    voter_id: str
    choice: Any


@dataclass(frozen=True)
class BallotSet:
    kind: str
    candidates: tuple[str, ...]
    ballots: tuple[Ballot, ...]

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValidationError(f"unknown ballot kind {self.kind!r}; expected one of {KINDS}")
        cands = tuple(self.candidates)
        if not cands:
            raise ValidationError("candidate list is empty")
        if len(set(cands)) != len(cands):
            raise ValidationError("candidate list contains duplicates")
        object.__setattr__(self, "candidates", cands)
        known = set(cands)
        voters: set[str] = set()
        normalized = []
        for b in self.ballots:
            if b.voter_id in voters:
                raise ValidationError(f"voter {b.voter_id!r} cast more than one ballot")
            voters.add(b.voter_id)
            choice = _normalize_choice(self.kind, b.choice, b.voter_id)
            referenced = choice if self.kind != "single_choice" else (choice,)
            unknown = sorted(set(referenced) - known)
            if unknown:
                raise ValidationError(f"ballot of voter {b.voter_id!r} references unknown candidate(s) {unknown}")
            normalized.append(Ballot(b.voter_id, choice))
        object.__setattr__(self, "ballots", tuple(normalized))

    @classmethod
    def from_choices(cls, kind: str, choices: Iterable[Any], candidates: Iterable[str] | None = None) -> BallotSet:
        """Anonymous ballots; voters are named ``v1, v2, ...`` in order."""
        ballots = tuple(Ballot(f"v{i}", c) for i, c in enumerate(choices, start=1))
        if candidates is None:
            candidates = sorted({c for b in ballots for c in _referenced(kind, b.choice)})
        return cls(kind, tuple(candidates), ballots)


def _referenced(kind: str, choice: Any) -> Iterable[str]:
    if kind == "single_choice":
        return (choice,)
    return choice


def _normalize_choice(kind: str, choice: Any, voter: str) -> Any:
    if kind == "single_choice":
        if not isinstance(choice, str):
            raise ValidationError(f"single-choice ballot of voter {voter!r} must name one candidate")
        return choice
    if kind == "approval":
        return frozenset(choice)
    if kind == "ranked":
        ranking = tuple(choice)
        if len(set(ranking)) != len(ranking):
            raise ValidationError(f"ranked ballot of voter {voter!r} lists a candidate twice")
        return ranking
    votes = dict(choice)
    for cand, v in votes.items():
        if isinstance(v, bool) or not isinstance(v, int):
            raise ValidationError(f"voter {voter!r}: non-integer vote {v!r} for {cand!r}")
    return votes


@dataclass(frozen=True)
class TokenLedger:
    balances: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for voter, amount in self.balances.items():
            if not (math.isfinite(amount) and amount >= 0):
                raise ValidationError(f"balance of {voter!r} must be a finite non-negative amount, got {amount!r}")

    def weight(self, voter: str) -> float:
        try:
            return self.balances[voter]
        except KeyError:
            raise ValidationError(f"voter {voter!r} has no entry in the token ledger") from None

    def scaled(self, factor: float) -> TokenLedger:
        return TokenLedger({v: b * factor for v, b in self.balances.items()})

    @property
    def total(self) -> float:
        return math.fsum(self.balances.values())


def _rows(text: str) -> list[tuple[int, list[str]]]:
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not any(cell.strip() for cell in row) or row[0].lstrip().startswith("#"):
            continue
        if not rows and row[0].strip().lower() == "voter_id":
            continue
        rows.append((lineno, [cell.strip() for cell in row]))
    return rows


def parse_ballots(text: str, kind: str, candidates: Iterable[str] | None = None) -> BallotSet:
    """Parse ``voter_id,payload`` rows.

    Payloads: single_choice ``x``; approval ``x;y``; ranked ``x>y>z``;
    quadratic ``x:5;y:-3``. An optional ``voter_id,...`` header is skipped.
    Without ``candidates`` the sorted set of referenced ids is used.
    """
    if kind not in KINDS:
        raise ValidationError(f"unknown ballot kind {kind!r}; expected one of {KINDS}")
    ballots = []
    for lineno, row in _rows(text):
        if len(row) > 2:
            raise ValidationError(f"line {lineno}: expected 'voter_id,payload', got {len(row)} columns")
        voter = row[0]
        payload = row[1] if len(row) > 1 else ""
        if not voter:
            raise ValidationError(f"line {lineno}: empty voter id")
        if kind == "single_choice":
            if not payload:
                raise ValidationError(f"line {lineno}: single-choice ballot without a candidate")
            choice: Any = payload
        elif kind == "approval":
            choice = frozenset(p.strip() for p in payload.split(";") if p.strip())
        elif kind == "ranked":
            choice = tuple(p.strip() for p in payload.split(">") if p.strip())
        else:
            choice = {}
            for pair in filter(None, (p.strip() for p in payload.split(";"))):
                cand, sep, votes = pair.partition(":")
                if not sep:
                    raise ValidationError(f"line {lineno}: quadratic entry {pair!r} is not 'candidate:votes'")
                try:
                    choice[cand.strip()] = int(votes)
                except ValueError:
                    raise ValidationError(f"line {lineno}: non-integer votes {votes!r}") from None
        ballots.append(Ballot(voter, choice))
    if not ballots:
        raise ValidationError("no ballots found")
    if candidates is None:
        candidates = sorted({c for b in ballots for c in _referenced(kind, b.choice)})
    return BallotSet(kind, tuple(candidates), tuple(ballots))


def parse_ledger(text: str) -> TokenLedger:
    balances: dict[str, float] = {}
    for lineno, row in _rows(text):
        if len(row) != 2:
            raise ValidationError(f"line {lineno}: expected 'voter_id,balance'")
        try:
            amount = float(row[1])
        except ValueError:
            raise ValidationError(f"line {lineno}: malformed balance {row[1]!r}") from None
        if row[0] in balances:
            raise ValidationError(f"line {lineno}: duplicate voter {row[0]!r}")
        balances[row[0]] = amount
    return TokenLedger(balances)
