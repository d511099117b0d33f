"""Regenerate the bundled example models in src/cid_incentives/fixtures/.

The grade and content models are illustrative binary instantiations of the
example diagrams; only their graphs come from the source material.
"""

from fractions import Fraction
from pathlib import Path

from cid_incentives.graph import Cid, NodeKind
from cid_incentives.io import write_model
from cid_incentives.scim import Scim

C, D, U = NodeKind.CHANCE, NodeKind.DECISION, NodeKind.UTILITY
OUT = Path(__file__).resolve().parent.parent / "src" / "cid_incentives" / "fixtures"

FAIR = {0: Fraction(1, 2), 1: Fraction(1, 2)}
NOISY = {0: Fraction(3, 4), 1: Fraction(1, 4)}  # eps = 1 flips the copied value
POINT = {0: Fraction(1)}
BIN = (0, 1)


def flip(src):
    return lambda pa, e: pa[src] ^ e


def grade(with_school_link: bool) -> Scim:
    d_parents = ["HighSchool", "Gender"] if with_school_link else ["Gender"]
    cid = Cid(
        [("Race", C), ("HighSchool", C), ("Education", C), ("Grade", C),
         ("Gender", C), ("PredictedGrade", D), ("Accuracy", U)],
        {
            "HighSchool": ["Race"],
            "Education": ["HighSchool"],
            "Grade": ["Education"],
            "PredictedGrade": d_parents,
            "Accuracy": ["Grade", "PredictedGrade"],
        },
    )
    return Scim.build(
        cid,
        {v: BIN for v in cid.order},
        {"Race": FAIR, "Gender": FAIR, "HighSchool": NOISY, "Education": NOISY},
        {
            "Race": lambda pa, e: e,
            "Gender": lambda pa, e: e,
            "HighSchool": flip("Race"),
            "Education": flip("HighSchool"),
            "Grade": lambda pa, e: pa["Education"],
            "Accuracy": lambda pa, e: int(pa["Grade"] == pa["PredictedGrade"]),
        },
    )


def content(predicted: bool) -> Scim:
    util = "PredictedClicks" if predicted else "Clicks"
    util_parents = ["ModelOfOpinions", "PostsToShow"] if predicted else ["InfluencedOpinions", "PostsToShow"]
    cid = Cid(
        [("OriginalOpinions", C), ("ModelOfOpinions", C), ("PostsToShow", D),
         ("InfluencedOpinions", C), (util, U)],
        {
            "ModelOfOpinions": ["OriginalOpinions"],
            "PostsToShow": ["ModelOfOpinions"],
            "InfluencedOpinions": ["OriginalOpinions", "PostsToShow"],
            util: util_parents,
        },
    )
    watched = util_parents[0]
    return Scim.build(
        cid,
        {v: BIN for v in cid.order},
        {"OriginalOpinions": FAIR, "ModelOfOpinions": NOISY, "InfluencedOpinions": FAIR},
        {
            "OriginalOpinions": lambda pa, e: e,
            "ModelOfOpinions": flip("OriginalOpinions"),
            # with eps = 1 the shown posts win over the user's original view
            "InfluencedOpinions": lambda pa, e: pa["PostsToShow"] if e else pa["OriginalOpinions"],
            util: lambda pa, e: int(pa[watched] == pa["PostsToShow"]),
        },
    )


def causality(direct: bool) -> Scim:
    cid = Cid(
        [("D", D), ("X", C), ("U", U)],
        {"X": ["D"], "U": ["D", "X"] if direct else ["D"]},
    )
    return Scim.build(
        cid,
        {"D": BIN, "X": BIN, "U": (0, 1, 2)},
        {},
        {
            "X": lambda pa, e: pa["D"],
            "U": (lambda pa, e: pa["X"] + pa["D"]) if direct else (lambda pa, e: 2 * pa["D"]),
        },
    )


def causality_ri(y_first: bool) -> Scim:
    if y_first:
        parents = {"X": ["Y"], "D": ["X"], "U": ["D", "X"]}
        root, child = "Y", "X"
    else:
        parents = {"Y": ["X"], "D": ["X"], "U": ["D", "X"]}
        root, child = "X", "Y"
    cid = Cid([("Y", C), ("X", C), ("D", D), ("U", U)], parents)
    return Scim.build(
        cid,
        {"Y": BIN, "X": BIN, "D": BIN, "U": (0, 1, 2)},
        {root: FAIR},
        {
            root: lambda pa, e: e,
            child: lambda pa, e, _r=root: pa[_r],
            "U": lambda pa, e: pa["X"] + pa["D"],
        },
    )


MODELS = {
    "grade_a": grade(True),
    "grade_b": grade(False),
    "content_a": content(False),
    "content_b": content(True),
    "causality_a": causality(True),
    "causality_b": causality(False),
    "causality_ri_a": causality_ri(True),
    "causality_ri_b": causality_ri(False),
}

if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for name, model in MODELS.items():
        write_model(model, OUT / f"{name}.json")
        print("wrote", name)
