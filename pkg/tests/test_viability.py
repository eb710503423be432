import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from daosim.errors import ValidationError
from daosim.viability import (
    METADAO_RATINGS,
    Assessment,
    Level,
    Mechanism,
    Principle,
    metadao_assessment,
    render_report,
    score_assessment,
)

CI, DD, AD = Mechanism.COLLECTIVE_INTELLIGENCE, Mechanism.DIGITAL_DEMOCRACY, Mechanism.ADAPTATION


def uniform(level):
    return Assessment("x", {p: level for p in Principle})


def test_principle_mapping():
    assert len(Principle) == 8
    counts = {m: sum(1 for p in Principle if p.mechanism is m) for m in Mechanism}
    assert counts == {CI: 4, DD: 2, AD: 2}


def test_metadao_golden():
    report = score_assessment(metadao_assessment())
    # (4 + 5 + 5 + 5) / 4, (2 + 5) / 2, (2 + 5) / 2
    assert report.mechanism_scores == {CI: 4.75, DD: 3.5, AD: 3.5}
    assert report.overall == 3.5
    assert set(report.weakest) == {Principle.DELIBERATION, Principle.AUTONOMY}


def test_extremes():
    high = score_assessment(uniform("High"))
    assert set(high.mechanism_scores.values()) == {5.0} and high.overall == 5.0
    assert "overall viability: 5.00" in render_report(high, "text")
    assert score_assessment(uniform("Low")).overall == 1.0


def test_missing_principle_named():
    ratings = dict(METADAO_RATINGS)
    del ratings["feedback"]
    with pytest.raises(ValidationError, match="feedback"):
        score_assessment(Assessment.from_json({"dao_name": "d", "ratings": ratings}))


@pytest.mark.parametrize(
    "ratings",
    [{"diversity": "Very High"}, {"charisma": "High"}, {"diversity": 7}],
)
def test_bad_ratings(ratings):
    with pytest.raises(ValidationError):
        Assessment.from_json({"dao_name": "d", "ratings": ratings})


def test_level_labels_roundtrip():
    for level in Level:
        assert Level.parse(level.label) is level
    assert [l.label for l in Level] == ["Low", "Low-Medium", "Medium", "Medium-High", "High"]


def test_json_report():
    doc = json.loads(render_report(score_assessment(metadao_assessment()), "json"))
    assert doc["overall"] == 3.5
    assert doc["mechanisms"] == {"collective_intelligence": 4.75, "digital_democracy": 3.5, "adaptation": 3.5}
    assert doc["weakest"] == ["deliberation", "autonomy"]


def test_single_weakest_listed_once():
    ratings = {p: "High" for p in Principle}
    ratings[Principle.PRIVACY] = "Medium"
    report = score_assessment(Assessment("d", ratings))
    assert report.weakest == (Principle.PRIVACY,)
    assert render_report(report, "text").count("privacy") == 2  # rating line and weakest line


def test_unknown_format():
    with pytest.raises(ValidationError):
        render_report(score_assessment(metadao_assessment()), "xml")


def test_mean_aggregation_option():
    report = score_assessment(metadao_assessment(), aggregation="mean")
    assert report.overall == pytest.approx((4.75 + 3.5 + 3.5) / 3)
    with pytest.raises(ValidationError):
        score_assessment(metadao_assessment(), aggregation="median")


def test_justification_accepted():
    data = {"dao_name": "d", "ratings": {p.value: {"level": "High", "justification": "ok"} for p in Principle}}
    a = Assessment.from_json(data)
    assert a.ratings[Principle.VOTING].justification == "ok"


levels = st.sampled_from(list(Level))


@given(st.fixed_dictionaries({p: levels for p in Principle}), st.sampled_from(list(Principle)))
def test_monotone_in_each_rating(ratings, bump):
    base = score_assessment(Assessment("d", ratings))
    raised = dict(ratings)
    raised[bump] = Level(min(5, ratings[bump] + 1))
    after = score_assessment(Assessment("d", raised))
    assert all(after.mechanism_scores[m] >= base.mechanism_scores[m] for m in Mechanism)
    assert after.overall >= base.overall
    assert base.overall == min(base.mechanism_scores.values())
    lowest = min(ratings.values())
    assert set(base.weakest) == {p for p, l in ratings.items() if l == lowest}
    assert all(1 <= s <= 5 for s in base.mechanism_scores.values())


@given(st.fixed_dictionaries({p: levels for p in Principle}), st.randoms())
def test_permutation_safe(ratings, rnd):
    items = list(ratings.items())
    rnd.shuffle(items)
    a = render_report(score_assessment(Assessment("d", dict(items))), "json")
    b = render_report(score_assessment(Assessment("d", ratings)), "json")
    assert a == b
