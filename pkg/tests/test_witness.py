import itertools
from fractions import Fraction

import pytest

from cid_incentives.criteria import IncentiveKind, admits_ri, admits_voi, analyze
from cid_incentives.generators import small_cids
from cid_incentives.graph import GraphError, directed_paths
from cid_incentives.io import dump_model, load_fixture
from cid_incentives.scim import (
    InterventionSet,
    Policy,
    enumerate_policies,
    evaluate,
    expected_utility,
    nested_potential_response,
    optimal_policies,
    prob,
    utility_bounds,
    validate_scim,
)
from cid_incentives.semantics import (
    all_optimal_unfair,
    has_ici,
    has_ri,
    has_voc,
    has_voi,
    is_material,
    responds,
)
from cid_incentives.witness import (
    ici_witness,
    ri_scaffolds,
    ri_witness,
    ri_witness_with_scaffold,
    voc_witness,
    voi_witness,
)

import oracles
from conftest import make_cid

K = IncentiveKind


def _scaffold_graph():
    """One collider between the observation W and the utility."""
    return make_cid(
        Z=["X", "S0"],
        W=["Z"],
        C1=["S0", "S1"],
        O1=["C1"],
        D=["W", "O1"],
        Y=["S1", "D"],
        U=["Y"],
    )


def _hand_recursion(s0, s1, d):
    x = 1
    z = x * s0
    w = z
    c1 = s0 * s1
    o1 = c1
    y = s1 * d
    return {"X": x, "S0": s0, "S1": s1, "Z": z, "W": w, "C1": c1, "O1": o1, "D": d, "Y": y, "U": y}


def _compatible(cid, scim):
    assert validate_scim(scim) == []
    assert scim.cid == cid
    for v, t in scim.functions.items():
        assert tuple(t.inputs) == cid.parents[v]


# -- response incentive witness -------------------------------------------------------------

def test_scaffold_on_single_collider_graph():
    cid = _scaffold_graph()
    model, sc = ri_witness_with_scaffold(cid, "X")
    assert sc.w == "W" and sc.y == "Y" and sc.z == "Z"
    assert sc.sources == ("S0", "S1")
    assert sc.colliders == ("C1",)
    assert sc.active_path == ("W", "Z", "S0", "C1", "S1", "Y", "U")
    assert sc.observations == ("O1",)
    assert sc.collider_paths == (("C1", "O1"),)


def test_single_collider_matches_hand_recursion():
    cid = _scaffold_graph()
    model = ri_witness(cid, "X")
    _compatible(cid, model)
    settings = 0
    for s0, s1 in itertools.product((-1, 1), repeat=2):
        for eps in [{v: 1 for v in cid.order} | {"S0": s0, "S1": s1}]:
            for d in (-1, 0, 1):
                got = evaluate(model, None, eps, InterventionSet.do(D=d))
                assert got == _hand_recursion(s0, s1, d)
                settings += 1
    assert settings == 12


def test_single_collider_optimal_policy_reads_s1():
    cid = _scaffold_graph()
    model = ri_witness(cid, "X")
    opt = optimal_policies(model)
    assert opt.value == 1
    for pol in opt:
        for w, o1 in itertools.product((-1, 1), repeat=2):
            # D = W·O1 = S0·S0·S1 = S1
            assert pol[(w, o1, 1)] == w * o1
    for pol in enumerate_policies(model):
        assert expected_utility(model, pol, InterventionSet.do(X=0)) == 0
    any_policy = opt.first()
    assert prob(model, any_policy, {"S1": 1}) == Fraction(1, 2)


def test_single_collider_semantics():
    cid = _scaffold_graph()
    model = ri_witness(cid, "X")
    assert is_material(model, "W").holds
    assert has_ri(model, "X").holds
    assert all_optimal_unfair(model, "X").holds
    for pol in optimal_policies(model):
        v = responds(model, pol, "X")
        assert v.holds


def test_grade_race_witness():
    cid = load_fixture("grade_a").cid
    for x in ("Race", "HighSchool"):
        model = ri_witness(cid, x)
        _compatible(cid, model)
        assert has_ri(model, x).holds
        assert optimal_policies(model).value == 1
        assert utility_bounds(model, InterventionSet.do({x: 0})) == (0, 0)


def test_minimal_requisite_graph():
    cid = make_cid(U=["D", "X"], D=["X"])
    model = ri_witness(cid, "X")
    best, arg = oracles.optimal(model)
    assert best == 1 == optimal_policies(model).value
    assert oracles.has_ri(model, "X")


def test_ri_precondition():
    cid = load_fixture("grade_a").cid
    with pytest.raises(GraphError):
        ri_witness(cid, "Gender")
    with pytest.raises(GraphError):
        ri_witness(load_fixture("grade_b").cid, "Race")


def test_ri_witness_deterministic():
    cid = load_fixture("grade_a").cid
    assert dump_model(ri_witness(cid, "Race")) == dump_model(ri_witness(cid, "Race"))
    first = [s.edges for s in itertools.islice(ri_scaffolds(cid, "Race"), 5)]
    again = [s.edges for s in itertools.islice(ri_scaffolds(cid, "Race"), 5)]
    assert first == again


def test_ri_witness_matches_brute_force_on_grade():
    model = ri_witness(load_fixture("grade_a").cid, "HighSchool")
    assert oracles.has_ri(model, "HighSchool")


# -- value of information ------------------------------------------------------------------------

def test_voi_race_in_grade_b():
    cid = load_fixture("grade_b").cid
    model = voi_witness(cid, "Race")
    assert model.cid == cid.with_edge("Race", cid.decision)
    v = has_voi(model.with_cid(cid), "Race")
    assert v.holds and v.evidence["gap"] == 1


def test_voi_three_node_gaps():
    seen = 0
    for cid in small_cids(1):
        for x in cid.chance_nodes:
            if x in analyze(cid).admitting(K.VOI):
                v = has_voi(voi_witness(cid, x).with_cid(cid), x)
                assert v.evidence["with_link"] == 1 and v.evidence["without_link"] == 0
                seen += 1
    assert seen > 0


def test_voi_precondition():
    with pytest.raises(GraphError):
        voi_witness(load_fixture("grade_a").cid, "Gender")


# -- value of control --------------------------------------------------------------------------------

def test_voc_content_a_model_of_opinions_goes_through_decision():
    cid = load_fixture("content_a").cid
    d = cid.decision
    assert not list(directed_paths(cid, "ModelOfOpinions", set(cid.utilities), avoid={d}))
    model, g = voc_witness(cid, "ModelOfOpinions")
    _compatible(cid, model)
    v = has_voc(model, "ModelOfOpinions", candidates=[g])
    assert v.holds and v.evidence["gain"] == 1


def test_voc_content_a_original_opinions():
    cid = load_fixture("content_a").cid
    # the edge to InfluencedOpinions gives a route that avoids the decision
    assert list(directed_paths(cid, "OriginalOpinions", set(cid.utilities), avoid={cid.decision}))
    model, g = voc_witness(cid, "OriginalOpinions")
    assert set(g.rows.values()) == {1}
    v = has_voc(model, "OriginalOpinions", candidates=[g])
    assert v.holds and v.evidence["gain"] == 1


def test_voc_case_one_influenced_opinions():
    cid = load_fixture("content_a").cid
    model, g = voc_witness(cid, "InfluencedOpinions")
    _compatible(cid, model)
    assert set(g.rows.values()) == {1}
    v = has_voc(model, "InfluencedOpinions", candidates=[g])
    assert v.holds and v.evidence["gain"] == 1
    assert v.evidence["baseline"] == optimal_policies(model).value


def test_voc_on_utility_node():
    cid = load_fixture("content_a").cid
    model, g = voc_witness(cid, "Clicks")
    v = has_voc(model, "Clicks", candidates=[g])
    assert v.holds and v.evidence["gain"] == 1


def test_voc_case_two_only_route_through_decision():
    # A informs D about Y through the common cause H, but affects U only via D
    cid = make_cid(U=["D", "Y"], D=["X"], X=["A"], A=["H"], Y=["H"])
    assert not list(directed_paths(cid, "A", {"U"}, avoid={"D"}))
    model, g = voc_witness(cid, "A")
    _compatible(cid, model)
    v = has_voc(model, "A", candidates=[g])
    assert v.holds and v.evidence["gain"] == 1
    assert has_voc(model, "A").holds


# -- instrumental control ----------------------------------------------------------------------

@pytest.mark.parametrize("x", ["InfluencedOpinions", "PostsToShow", "Clicks"])
def test_ici_content_a(x):
    cid = load_fixture("content_a").cid
    model, ctx, d = ici_witness(cid, x)
    _compatible(cid, model)
    assert ctx == {p: 0 for p in cid.parents[cid.decision]} and d == 0
    opt = optimal_policies(model)
    # unique on the reachable context; unreachable cells are free
    cell = tuple(ctx[p] for p in cid.parents[cid.decision]) + (0,)
    assert opt.allowed_for(cell) == (1,)
    pol = opt.first()
    assert expected_utility(model, pol, given=ctx) == 1
    v = has_ici(model, x, ctx, d)
    assert v.holds
    for eps, _ in oracles.exo_settings(model):
        for dv in (0, 1):
            assert nested_potential_response(model, pol, eps, cid.utilities, x, dv) == dv
    assert oracles.nested_expected(model, pol.table, x, d, ctx) == 0


def test_ici_precondition():
    with pytest.raises(GraphError):
        ici_witness(load_fixture("content_a").cid, "OriginalOpinions")


# -- every small graph ------------------------------------------------------------------------------

def test_every_witness_up_to_five_nodes():
    counts = {k: 0 for k in K}
    for cid in small_cids(3):
        report = analyze(cid)
        for x in cid.order:
            if report[x].admits(K.RI):
                model = ri_witness(cid, x)
                _compatible(cid, model)
                assert optimal_policies(model).value == 1
                assert utility_bounds(model, InterventionSet.do({x: 0})) == (0, 0)
                assert has_ri(model, x).holds
                counts[K.RI] += 1
            if report[x].admits(K.VOI):
                assert admits_voi(cid, x)
                assert has_voi(voi_witness(cid, x).with_cid(cid), x).evidence["gap"] == 1
                counts[K.VOI] += 1
            if report[x].admits(K.VOC):
                model, g = voc_witness(cid, x)
                _compatible(cid, model)
                assert has_voc(model, x, candidates=[g]).evidence["gain"] == 1
                counts[K.VOC] += 1
            if report[x].admits(K.ICI):
                model, ctx, d = ici_witness(cid, x)
                _compatible(cid, model)
                v = has_ici(model, x, ctx, d)
                assert v.holds
                counts[K.ICI] += 1
            if report[x].applicable(K.RI) and not report[x].admits(K.RI):
                assert not admits_ri(cid, x)
    assert all(counts.values())


def test_ici_witness_values_exact():
    for cid in small_cids(2):
        for x in analyze(cid).admitting(K.ICI):
            model, ctx, d = ici_witness(cid, x)
            pol = optimal_policies(model).first()
            assert expected_utility(model, pol, given=ctx) == 1
            assert oracles.nested_expected(model, pol.table, x, d, ctx) == 0


def test_witness_policy_constant_baseline():
    model = ri_witness(load_fixture("grade_a").cid, "Race")
    assert expected_utility(model, Policy.constant(model, 0)) == 0
