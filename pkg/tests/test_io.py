import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cid_incentives.generators import small_cids
from cid_incentives.io import (
    FIXTURES,
    ModelFormatError,
    dump_model,
    fixture_text,
    load_fixture,
    load_model,
    model_to_document,
    parse_value,
    read_model,
    write_model,
)
from cid_incentives.graph import Cid
from cid_incentives.scim import Policy, Scim, evaluate, optimal_policies
from cid_incentives.semantics import has_ri, has_voc

import oracles
from conftest import make_cid, random_model

SMALL = list(small_cids())

FIXTURE_EDGES = {
    "grade_a": {
        ("Race", "HighSchool"), ("HighSchool", "Education"), ("Education", "Grade"),
        ("Gender", "PredictedGrade"), ("HighSchool", "PredictedGrade"),
        ("Grade", "Accuracy"), ("PredictedGrade", "Accuracy"),
    },
    "grade_b": {
        ("Race", "HighSchool"), ("HighSchool", "Education"), ("Education", "Grade"),
        ("Gender", "PredictedGrade"), ("Grade", "Accuracy"), ("PredictedGrade", "Accuracy"),
    },
    "content_a": {
        ("OriginalOpinions", "ModelOfOpinions"), ("ModelOfOpinions", "PostsToShow"),
        ("OriginalOpinions", "InfluencedOpinions"), ("PostsToShow", "InfluencedOpinions"),
        ("PostsToShow", "Clicks"), ("InfluencedOpinions", "Clicks"),
    },
    "content_b": {
        ("OriginalOpinions", "ModelOfOpinions"), ("ModelOfOpinions", "PostsToShow"),
        ("OriginalOpinions", "InfluencedOpinions"), ("PostsToShow", "InfluencedOpinions"),
        ("PostsToShow", "PredictedClicks"), ("ModelOfOpinions", "PredictedClicks"),
    },
    "causality_a": {("D", "X"), ("D", "U"), ("X", "U")},
    "causality_b": {("D", "X"), ("D", "U")},
    "causality_ri_a": {("Y", "X"), ("X", "D"), ("D", "U"), ("X", "U")},
    "causality_ri_b": {("X", "Y"), ("X", "D"), ("D", "U"), ("X", "U")},
}

DECISIONS = {
    "grade_a": ("PredictedGrade", "Accuracy"),
    "grade_b": ("PredictedGrade", "Accuracy"),
    "content_a": ("PostsToShow", "Clicks"),
    "content_b": ("PostsToShow", "PredictedClicks"),
}


def _doc(**over):
    doc = {
        "format_version": 1,
        "kind": "scim",
        "nodes": [
            {"name": "X", "kind": "chance", "parents": [], "domain": [1, -1]},
            {"name": "D", "kind": "decision", "parents": ["X"], "domain": [0, 1]},
            {"name": "U", "kind": "utility", "parents": ["X", "D"], "domain": [0, 1]},
        ],
        "exogenous": {
            "X": {"dist": {"1": "1/3", "-1": "2/3"}},
            "D": {"dist": {"0": "1"}},
            "U": {"dist": {"0": "1"}},
        },
        "functions": {
            "X": [{"eps": 1, "value": 1}, {"eps": -1, "value": -1}],
            "U": [
                {"parents": {"X": x, "D": d}, "eps": 0, "value": int((x == 1) == (d == 1))}
                for x in (1, -1) for d in (0, 1)
            ],
        },
    }
    doc.update(over)
    return doc


# -- fixtures --------------------------------------------------------------------------------

@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_structure(name):
    model = load_fixture(name)
    assert isinstance(model, Scim)
    assert set(model.cid.edges()) == FIXTURE_EDGES[name]
    dec, util = DECISIONS.get(name, ("D", "U"))
    assert model.cid.decisions == [dec]
    assert model.cid.utilities == [util]


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_round_trip_is_identity(name):
    text = fixture_text(name)
    model = load_model(text)
    assert dump_model(model) == text
    assert load_model(dump_model(model)) == model


def test_fixture_unknown():
    with pytest.raises(KeyError):
        fixture_text("nope")


def test_causality_fixture_equations():
    a = load_fixture("causality_a")
    b = load_fixture("causality_b")
    for d in (0, 1):
        pol = Policy.constant(a, d)
        assert evaluate(a, pol, {"D": 0, "X": 0, "U": 0}) == {"D": d, "X": d, "U": 2 * d}
        assert evaluate(b, Policy.constant(b, d), {"D": 0, "X": 0, "U": 0}) == {"D": d, "X": d, "U": 2 * d}
    ra = load_fixture("causality_ri_a")
    rb = load_fixture("causality_ri_b")
    for m, root, copy in ((ra, "Y", "X"), (rb, "X", "Y")):
        assert set(m.exogenous[root].values()) == {Fraction(1, 2)}
        pol = Policy.constant(m, 1)
        for eps, _ in oracles.exo_settings(m):
            w = evaluate(m, pol, eps)
            assert w[copy] == w[root]
            assert w["U"] == w["X"] + w["D"]


def test_causality_fixture_semantic_verdicts():
    # the graphs admit these incentives, but the specific tables do not show them
    a = load_fixture("causality_a")
    assert optimal_policies(a).value == 2
    assert not has_voc(a, "X").holds
    ra = load_fixture("causality_ri_a")
    assert not has_ri(ra, "Y").holds


# -- parsing -----------------------------------------------------------------------------------

def test_exact_thirds():
    model = load_model(json.dumps(_doc()))
    assert model.exogenous["X"] == {1: Fraction(1, 3), -1: Fraction(2, 3)}
    assert model.domains["X"] == (1, -1)


def test_truncated_document():
    text = json.dumps(_doc(), indent=2)
    with pytest.raises(ModelFormatError, match=r"line \d+, column \d+"):
        load_model(text[: len(text) // 2])


def test_unknown_kind():
    doc = _doc()
    doc["nodes"][0]["kind"] = "oracle"
    with pytest.raises(ModelFormatError, match=r"nodes\[0\]\.kind"):
        load_model(json.dumps(doc))


def test_float_probability_rejected():
    doc = _doc()
    doc["exogenous"]["X"]["dist"] = {"1": 0.5, "-1": 0.5}
    with pytest.raises(ModelFormatError, match="exact"):
        load_model(json.dumps(doc))


def test_float_value_rejected():
    with pytest.raises(ModelFormatError):
        parse_value(0.5, "x")
    with pytest.raises(ModelFormatError):
        parse_value(True, "x")


def test_values():
    assert parse_value("3/6") == Fraction(1, 2)
    assert parse_value("4/2") == 2 and isinstance(parse_value("4/2"), int)
    assert parse_value("-7") == -7
    assert parse_value("low") == "low"
    with pytest.raises(ModelFormatError):
        parse_value("1/0")


def test_non_total_function_rejected():
    doc = _doc()
    doc["functions"]["U"].pop()
    with pytest.raises(ModelFormatError, match="non-total"):
        load_model(json.dumps(doc))


def test_wrong_parent_in_row():
    doc = _doc()
    doc["functions"]["U"][0]["parents"] = {"X": 1, "Q": 0}
    with pytest.raises(ModelFormatError, match=r"functions\.U\[0\]\.parents"):
        load_model(json.dumps(doc))


def test_version_checked():
    with pytest.raises(ModelFormatError, match="format_version"):
        load_model(json.dumps(_doc(format_version=2)))


def test_cycle_rejected():
    doc = {
        "format_version": 1,
        "kind": "cid",
        "nodes": [
            {"name": "A", "kind": "chance", "parents": ["B"]},
            {"name": "B", "kind": "chance", "parents": ["A"]},
            {"name": "D", "kind": "decision", "parents": []},
            {"name": "U", "kind": "utility", "parents": ["D"]},
        ],
    }
    with pytest.raises(ModelFormatError, match="cycle"):
        load_model(json.dumps(doc))


def test_cid_document():
    cid = make_cid(U=["D", "X"], D=["X"])
    text = dump_model(cid)
    assert json.loads(text)["kind"] == "cid"
    back = load_model(text)
    assert isinstance(back, Cid) and back == cid


def test_symbols_and_rationals_round_trip():
    cid = make_cid(U=["D", "X"], D=["X"])
    scim = Scim.build(
        cid,
        {"X": ("low", "high"), "D": ("a", "b"), "U": (0, Fraction(1, 2), 1)},
        {"X": {"n": Fraction(1, 3), "m": Fraction(2, 3)}},
        {"X": lambda pa, e: "low" if e == "n" else "high",
         "U": lambda pa, e: Fraction(1, 2) if pa["X"] == "low" else 1},
    )
    text = dump_model(scim)
    assert '"1/2"' in text
    assert load_model(text) == scim


def test_file_round_trip(tmp_path):
    scim = load_fixture("grade_a")
    path = tmp_path / "m.json"
    write_model(scim, path)
    assert read_model(path) == scim


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_random_models_round_trip(seed):
    rng = random.Random(seed)
    scim = random_model(rng.choice(SMALL), rng, eps_d=rng.choice((1, 2)))
    text = dump_model(scim)
    back = load_model(text)
    assert back == scim
    assert dump_model(back) == text
    assert model_to_document(back) == json.loads(text)
