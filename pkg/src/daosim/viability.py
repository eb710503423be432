"""Eight-principle DAO viability rubric.

Ratings are ordinal levels mapped to 1..5. A mechanism scores the mean of its
principles; overall viability is the weakest mechanism score unless the
``mean`` aggregation is requested.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Mapping

from daosim.errors import ValidationError


class Mechanism(str, enum.Enum):
    COLLECTIVE_INTELLIGENCE = "collective_intelligence"
    DIGITAL_DEMOCRACY = "digital_democracy"
    ADAPTATION = "adaptation"


class Principle(str, enum.Enum):
    DIVERSITY = "diversity"
    TRANSPARENCY = "transparency"
    PRIVACY = "privacy"
    FREE_EXPRESSION = "free_expression"
    DELIBERATION = "deliberation"
    VOTING = "voting"
    AUTONOMY = "autonomy"
    FEEDBACK = "feedback"

    @property
    def mechanism(self) -> Mechanism:
        return MECHANISM_OF[self]


MECHANISM_OF = {
    Principle.DIVERSITY: Mechanism.COLLECTIVE_INTELLIGENCE,
    Principle.TRANSPARENCY: Mechanism.COLLECTIVE_INTELLIGENCE,
    Principle.PRIVACY: Mechanism.COLLECTIVE_INTELLIGENCE,
    Principle.FREE_EXPRESSION: Mechanism.COLLECTIVE_INTELLIGENCE,
    Principle.DELIBERATION: Mechanism.DIGITAL_DEMOCRACY,
    Principle.VOTING: Mechanism.DIGITAL_DEMOCRACY,
    Principle.AUTONOMY: Mechanism.ADAPTATION,
    Principle.FEEDBACK: Mechanism.ADAPTATION,
}


class Level(enum.IntEnum):
    LOW = 1
    LOW_MEDIUM = 2
    MEDIUM = 3
    MEDIUM_HIGH = 4
    HIGH = 5

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, value: str | int | Level) -> Level:
        if isinstance(value, str):
            try:
                return _BY_LABEL[value]
            except KeyError:
                raise ValidationError(f"unknown rating level {value!r}; expected one of {list(_BY_LABEL)}") from None
        try:
            return cls(value)
        except ValueError:
            raise ValidationError(f"rating level must be in 1..5, got {value!r}") from None


_LABELS = {
    Level.LOW: "Low",
    Level.LOW_MEDIUM: "Low-Medium",
    Level.MEDIUM: "Medium",
    Level.MEDIUM_HIGH: "Medium-High",
    Level.HIGH: "High",
}
_BY_LABEL = {label: level for level, label in _LABELS.items()}


@dataclass(frozen=True)
class Rating:
    level: Level
    justification: str = ""


@dataclass(frozen=True)
class Assessment:
    dao_name: str
    ratings: Mapping[Principle, Rating]

    def __post_init__(self) -> None:
        ratings = {}
        for key, value in self.ratings.items():
            try:
                principle = Principle(key)
            except ValueError:
                raise ValidationError(f"unknown principle {key!r}") from None
            ratings[principle] = value if isinstance(value, Rating) else Rating(Level.parse(value))
        object.__setattr__(self, "ratings", ratings)

    @classmethod
    def from_json(cls, data: Mapping) -> Assessment:
        """Build from ``{"dao_name": ..., "ratings": {principle: level-label}}``.

        A rating may also be an object ``{"level": ..., "justification": ...}``.
        """
        if not isinstance(data, Mapping) or "ratings" not in data:
            raise ValidationError("assessment must be an object with a 'ratings' field")
        ratings = {}
        for key, value in dict(data["ratings"]).items():
            if isinstance(value, Mapping):
                ratings[key] = Rating(Level.parse(value.get("level")), str(value.get("justification", "")))
            else:
                ratings[key] = Rating(Level.parse(value))
        return cls(str(data.get("dao_name", "")), ratings)


# MetaDAO accomplishment ratings from the framework's case study
METADAO_RATINGS = {
    "diversity": "Medium-High",
    "transparency": "High",
    "privacy": "High",
    "free_expression": "High",
    "deliberation": "Low-Medium",
    "voting": "High",
    "autonomy": "Low-Medium",
    "feedback": "High",
}


def metadao_assessment() -> Assessment:
    return Assessment.from_json({"dao_name": "MetaDAO", "ratings": METADAO_RATINGS})


@dataclass(frozen=True)
class ViabilityReport:
    dao_name: str
    mechanism_scores: dict[Mechanism, float]
    overall: float
    weakest: tuple[Principle, ...]
    levels: dict[Principle, Level] = field(default_factory=dict)
    aggregation: str = "min"

    def to_json(self) -> dict:
        return {
            "dao_name": self.dao_name,
            "aggregation": self.aggregation,
            "mechanisms": {m.value: self.mechanism_scores[m] for m in Mechanism},
            "overall": self.overall,
            "weakest": [p.value for p in self.weakest],
            "ratings": {p.value: self.levels[p].label for p in Principle if p in self.levels},
        }


AGGREGATIONS = ("min", "mean")


def score_assessment(
    assessment: Assessment,
    aggregation: str = "min",
    mechanism_weights: Mapping[Mechanism, float] | None = None,
) -> ViabilityReport:
    """Score every mechanism and the overall viability.

    ``aggregation="mean"`` replaces the weakest-link minimum by a (weighted)
    mean of the mechanism scores.
    """
    missing = [p.value for p in Principle if p not in assessment.ratings]
    if missing:
        raise ValidationError(f"assessment is missing principle(s): {', '.join(missing)}")
    if aggregation not in AGGREGATIONS:
        raise ValidationError(f"unknown aggregation {aggregation!r}; expected one of {AGGREGATIONS}")
    levels = {p: assessment.ratings[p].level for p in Principle}
    scores = {}
    for m in Mechanism:
        member = [int(levels[p]) for p in Principle if p.mechanism is m]
        scores[m] = sum(member) / len(member)
    if aggregation == "min":
        overall = min(scores.values())
    else:
        weights = {m: 1.0 for m in Mechanism} if mechanism_weights is None else dict(mechanism_weights)
        if any(weights.get(m, 0) < 0 for m in Mechanism) or sum(weights.get(m, 0) for m in Mechanism) <= 0:
            raise ValidationError("mechanism weights must be non-negative with a positive sum")
        overall = sum(weights.get(m, 0) * scores[m] for m in Mechanism) / sum(weights.get(m, 0) for m in Mechanism)
    lowest = min(levels.values())
    weakest = tuple(p for p in Principle if levels[p] == lowest)
    return ViabilityReport(assessment.dao_name, scores, overall, weakest, levels, aggregation)


_TITLES = {
    Mechanism.COLLECTIVE_INTELLIGENCE: "collective intelligence",
    Mechanism.DIGITAL_DEMOCRACY: "digital democracy",
    Mechanism.ADAPTATION: "adaptation",
}


def render_report(report: ViabilityReport, format: str = "text") -> str:
    if format == "json":
        return json.dumps(report.to_json(), indent=2) + "\n"
    if format != "text":
        raise ValidationError(f"unknown report format {format!r}; expected 'text' or 'json'")
    lines = [f"DAO viability assessment: {report.dao_name or '(unnamed)'}", ""]
    for m in Mechanism:
        lines.append(f"  {_TITLES[m]:<24} {report.mechanism_scores[m]:.2f}")
        for p in Principle:
            if p.mechanism is m and p in report.levels:
                lines.append(f"    - {p.value:<20} {report.levels[p].label}")
    lines.append("")
    lines.append(f"overall viability: {report.overall:.2f} ({report.aggregation})")
    lines.append("weakest principles: " + ", ".join(p.value for p in report.weakest))
    return "\n".join(lines) + "\n"
