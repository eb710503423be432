"""Voting tallies, token concentration and turnout analysis."""

from daosim.governance.ballots import Ballot, BallotSet, TokenLedger, parse_ballots, parse_ledger
from daosim.governance.metrics import Centralization, centralization_metrics, gini, nakamoto_coefficient
from daosim.governance.proposals import (
    Proposal,
    ProposalHistory,
    TurnoutMetrics,
    simulate_proposals,
    turnout_metrics,
)
from daosim.governance.tally import (
    Round,
    TallyResult,
    tally,
    tally_approval,
    tally_quadratic,
    tally_ranked_irv,
    tally_single_choice,
)

__all__ = [
    "Ballot",
    "BallotSet",
    "Centralization",
    "Proposal",
    "ProposalHistory",
    "Round",
    "TallyResult",
    "TokenLedger",
    "TurnoutMetrics",
    "centralization_metrics",
    "gini",
    "nakamoto_coefficient",
    "parse_ballots",
    "parse_ledger",
    "simulate_proposals",
    "tally",
    "tally_approval",
    "tally_quadratic",
    "tally_ranked_irv",
    "tally_single_choice",
    "turnout_metrics",
]
