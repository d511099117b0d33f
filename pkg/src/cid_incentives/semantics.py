"""Definition-level incentive checks, decided by exact exhaustive computation.

These do not consult the graphical criteria; they are the ground truth the
criteria are tested against.  Every check returns a :class:`SemanticVerdict`
whose evidence holds exact rationals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .graph import GraphError, descendants, requisite_observations
from .scim import (
    DEFAULT_MAX_ENUMERATION,
    NO_INTERVENTION,
    EnumerationLimitError,
    FunctionTable,
    InterventionSet,
    ModelError,
    OptimalPolicies,
    Policy,
    Scim,
    Value,
    _policy_values,
    canonical_value,
    optimal_policies,
)


@dataclass(frozen=True)
class SemanticVerdict:
    holds: bool
    evidence: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def _require_non_decision(scim: Scim, x: str, what: str):
    scim.cid._require(x)
    if x == scim.decision:
        raise GraphError(f"{what} is undefined for the decision itself")


# -- value of information ---------------------------------------------------------

def is_material(scim: Scim, x: str) -> SemanticVerdict:
    """Does removing the link ``x -> D`` strictly lower the attainable utility?"""
    d = scim.decision
    scim.cid._require(x)
    if x not in scim.cid.parents[d]:
        raise GraphError(f"{x!r} is not a parent of the decision {d!r}")
    with_link = optimal_policies(scim).value
    without = optimal_policies(scim.with_cid(scim.cid.without_edges([(x, d)]))).value
    return SemanticVerdict(
        without < with_link,
        {"with_link": with_link, "without_link": without, "gap": with_link - without},
    )


def has_voi(scim: Scim, x: str) -> SemanticVerdict:
    """Is ``x`` material once it is observed?  The structural functions are untouched."""
    d = scim.decision
    scim.cid._require(x)
    if x in descendants(scim.cid, d):
        raise GraphError(f"VoI undefined for descendants of the decision: {x!r}")
    return is_material(scim.with_cid(scim.cid.with_edge(x, d)), x)


# -- value of control ------------------------------------------------------------------

def reachable_inputs(scim: Scim, x: str) -> list[tuple]:
    """Input rows ``(*pa_x, ε_x)`` of ``x`` that occur with positive probability
    under some decision.

    Ancestors of ``x`` never depend on ``x``'s own function, so this set is the
    same for every soft intervention on ``x`` and every policy.
    """
    i = scim.index(x)
    _, _, parents, _ = scim._compiled()
    seen = {}
    for eps, p, per_d in scim.outcomes():
        if not p:
            continue
        for vals in per_d.values():
            seen[tuple(vals[q] for q in parents[i]) + (eps[i],)] = None
    return list(seen)


def has_voc(
    scim: Scim,
    x: str,
    candidates: Iterable[FunctionTable] = (),
    max_enumeration: int = DEFAULT_MAX_ENUMERATION,
) -> SemanticVerdict:
    """Can some soft intervention on ``x`` raise the attainable utility?

    ``candidates`` are tried first; any strict improvement found among them
    already decides the question.  Otherwise every table on the reachable
    inputs is tried (rows off that set never matter).
    """
    _require_non_decision(scim, x, "value of control")
    base = optimal_policies(scim).value
    for g in candidates:
        val = optimal_policies(scim.with_function(x, g)).value
        if val > base:
            return SemanticVerdict(True, {"baseline": base, "improved": val, "gain": val - base, "g": g})
    rows = reachable_inputs(scim, x)
    dom = scim.domains[x]
    count = len(dom) ** len(rows)
    if count > max_enumeration:
        raise EnumerationLimitError(f"{count} soft interventions on {x!r} exceed the cap of {max_enumeration}")
    fallback = scim.functions[x].rows
    best = base
    for outs in itertools.product(dom, repeat=len(rows)):
        table = dict(fallback)
        table.update(zip(rows, outs))
        g = FunctionTable(x, scim.cid.parents[x], table)
        val = optimal_policies(scim.with_function(x, g)).value
        if val > base:
            return SemanticVerdict(True, {"baseline": base, "improved": val, "gain": val - base, "g": g})
        best = max(best, val)
    return SemanticVerdict(False, {"baseline": base, "best": best, "tables_checked": count})


# -- response incentives ---------------------------------------------------------------

def _linked_cells(scim: Scim, x: str, support: bool):
    """Pairs of policy cells ``(natural, under do(x=v))`` reached at the same setting."""
    base = scim.outcomes()
    for v in scim.domains[x]:
        moved = scim.outcomes(InterventionSet.do({x: v}))
        for (eps, p, per_d), (_, _, per_d_iv) in zip(base, moved):
            if support and not p:
                continue
            c0 = scim.cell_of(eps, next(iter(per_d.values())))
            c1 = scim.cell_of(eps, next(iter(per_d_iv.values())))
            yield v, eps, c0, c1


def _eps_dict(scim: Scim, eps: tuple) -> dict:
    return dict(zip(scim.order, eps))


def responds(scim: Scim, policy: Policy, x: str, support: bool = False) -> SemanticVerdict:
    """Is there ``v`` and a setting ``eps`` with ``D_{x=v}(eps) != D(eps)``?

    By default every exogenous setting counts, including zero-probability
    ones; ``support=True`` restricts to positive-probability settings.
    """
    _require_non_decision(scim, x, "a response")
    for v, eps, c0, c1 in _linked_cells(scim, x, support):
        if policy[c0] != policy[c1]:
            return SemanticVerdict(
                True,
                {"value": v, "eps": _eps_dict(scim, eps), "decision": policy[c0], "intervened_decision": policy[c1]},
            )
    return SemanticVerdict(False)


class _UnionFind:
    def __init__(self, items):
        self.parent = {i: i for i in items}

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def has_ri(scim: Scim, x: str, support: bool = False, optimal: OptimalPolicies | None = None) -> SemanticVerdict:
    """Does every optimal policy respond to interventions on ``x``?

    A policy fails to respond iff it is constant on every class of cells
    linked by some ``(eps, v)``.  So a non-responding optimal policy exists
    iff each class has a decision value allowed in all of its cells.
    """
    _require_non_decision(scim, x, "a response incentive")
    opt = optimal or optimal_policies(scim)
    index = {c: i for i, c in enumerate(opt.cells)}
    uf = _UnionFind(range(len(opt.cells)))
    for _, _, c0, c1 in _linked_cells(scim, x, support):
        uf.union(index[c0], index[c1])
    classes: dict[int, list[int]] = {}
    for i in range(len(opt.cells)):
        classes.setdefault(uf.find(i), []).append(i)
    choice: list = [None] * len(opt.cells)
    for members in classes.values():
        common = [v for v in opt.allowed[members[0]] if all(v in opt.allowed[j] for j in members[1:])]
        if not common:
            return SemanticVerdict(
                True,
                {
                    "attainable": opt.value,
                    "linked_cells": [opt.cells[j] for j in members],
                    "allowed": [opt.allowed[j] for j in members],
                },
            )
        for j in members:
            choice[j] = common[0]
    ignoring = Policy.from_cells(opt.decision, opt.inputs, opt.cells, choice)
    return SemanticVerdict(False, {"attainable": opt.value, "non_responding_policy": ignoring})


# -- instrumental control incentives ---------------------------------------------------

def _context_tuple(scim: Scim, context: Mapping[str, Value]) -> tuple:
    ps = scim.cid.parents[scim.decision]
    if set(context) != set(ps):
        raise ModelError(f"context must assign exactly the decision parents {list(ps)}")
    out = []
    for p in ps:
        v = canonical_value(context[p])
        if v not in scim.domains[p]:
            raise ModelError(f"context value {v!r} outside dom({p})")
        out.append(v)
    return tuple(out)


def _ici_terms(scim: Scim, x: str, ctx: tuple, d: Value):
    """Per positive-probability setting in the context: probability, ε_D, the
    factual utility for each decision value, and the nested one likewise."""
    di = scim.index(scim.decision)
    xi = scim.index(x)
    base = scim.outcomes()
    pinned = {v: scim.outcomes(InterventionSet.do({x: v})) for v in scim.domains[x]}
    terms = []
    for k, (eps, p, per_d) in enumerate(base):
        if not p:
            continue
        vals = next(iter(per_d.values()))
        if scim.cell_of(eps, vals)[:-1] != ctx:
            continue
        x_star = per_d[d][xi]
        nested_row = pinned[x_star][k][2]
        factual = {dv: scim.utility_sum(per_d[dv]) for dv in per_d}
        nested = {dv: scim.utility_sum(nested_row[dv]) for dv in per_d}
        # pinning x to its d-world value never moves the decision's parents:
        # either x descends from D, or x_d equals x and nothing changes
        if scim.cell_of(eps, next(iter(nested_row.values())))[:-1] != ctx:
            raise AssertionError("nested world left the decision context")
        terms.append((p, eps[di], factual, nested))
    return terms


def has_ici(scim: Scim, x: str, context: Mapping[str, Value], d: Value) -> SemanticVerdict:
    """Does ``E[U_{x_d} | context] != E[U | context]`` for every optimal policy?

    Both expectations only read the policy on the cells of this context, so
    the check enumerates the optimal choices for those cells alone.
    """
    scim.cid._require(x)
    dec = scim.decision
    d = canonical_value(d)
    if d not in scim.domains[dec]:
        raise ModelError(f"decision value {d!r} outside dom({dec})")
    ctx = _context_tuple(scim, context)
    terms = _ici_terms(scim, x, ctx, d)
    mass = sum((t[0] for t in terms), Fraction(0))
    if mass == 0:
        raise ModelError("decision context has probability zero")
    opt = optimal_policies(scim)
    cells = [c for c in opt.cells if c[:-1] == ctx]
    allowed = [opt.allowed_for(c) for c in cells]
    checked = 0
    for rows in itertools.product(*allowed):
        row = dict(zip(cells, rows))
        factual = Fraction(0)
        nested = Fraction(0)
        for p, e, fac, nes in terms:
            choice = row[ctx + (e,)]
            factual += p * fac[choice]
            nested += p * nes[choice]
        checked += 1
        if factual == nested:
            return SemanticVerdict(
                False,
                {
                    "context": dict(context),
                    "d": d,
                    "policy_rows": {c: row[c] for c in cells},
                    "expected_utility": factual / mass,
                    "nested_expected_utility": nested / mass,
                },
            )
    return SemanticVerdict(True, {"context": dict(context), "d": d, "rows_checked": checked})


def decision_contexts(scim: Scim) -> list[dict]:
    """Assignments to the decision's parents that have positive probability."""
    dec = scim.decision
    ps = scim.cid.parents[dec]
    seen = {}
    for eps, p, per_d in scim.outcomes():
        if p:
            seen[scim.cell_of(eps, next(iter(per_d.values())))[:-1]] = None
    return [dict(zip(ps, c)) for c in sorted(seen, key=lambda c: [scim.domains[q].index(v) for q, v in zip(ps, c)])]


def has_ici_any(scim: Scim, x: str) -> SemanticVerdict:
    """Does ``has_ici`` hold for some positive-probability context and some ``d``?"""
    for ctx in decision_contexts(scim):
        for d in scim.domains[scim.decision]:
            v = has_ici(scim, x, ctx, d)
            if v.holds:
                return v
    return SemanticVerdict(False)


# -- counterfactual fairness -----------------------------------------------------------

def is_counterfactually_fair(scim: Scim, policy: Policy, a: str) -> SemanticVerdict:
    """Is the decision's conditional distribution invariant to do(a=·) in every
    positive-probability context ``(pa_D, a)``?"""
    _require_non_decision(scim, a, "counterfactual fairness")
    dec_i = scim.index(scim.decision)
    a_i = scim.index(a)
    pa = [scim.index(p) for p in scim.cid.parents[scim.decision]]
    natural = list(_policy_values(scim, policy, NO_INTERVENTION))
    mass: dict[tuple, Fraction] = {}
    factual: dict[tuple, dict] = {}
    for _, p, vals in natural:
        if not p:
            continue
        key = (tuple(vals[i] for i in pa), vals[a_i])
        mass[key] = mass.get(key, Fraction(0)) + p
        dist = factual.setdefault(key, {})
        dist[vals[dec_i]] = dist.get(vals[dec_i], Fraction(0)) + p
    for a_cf in scim.domains[a]:
        moved = _policy_values(scim, policy, InterventionSet.do({a: a_cf}))
        counter: dict[tuple, dict] = {}
        for (_, p, vals), (_, _, vals_cf) in zip(natural, moved):
            if not p:
                continue
            key = (tuple(vals[i] for i in pa), vals[a_i])
            dist = counter.setdefault(key, {})
            dist[vals_cf[dec_i]] = dist.get(vals_cf[dec_i], Fraction(0)) + p
        for key in mass:
            for dv in scim.domains[scim.decision]:
                f = factual[key].get(dv, Fraction(0)) / mass[key]
                c = counter[key].get(dv, Fraction(0)) / mass[key]
                if f != c:
                    return SemanticVerdict(
                        False,
                        {
                            "context": dict(zip(scim.cid.parents[scim.decision], key[0])),
                            "attribute": key[1],
                            "counterfactual_attribute": a_cf,
                            "decision": dv,
                            "probability": f,
                            "counterfactual_probability": c,
                        },
                    )
    return SemanticVerdict(True)


def all_optimal_unfair(scim: Scim, a: str, max_enumeration: int = DEFAULT_MAX_ENUMERATION) -> SemanticVerdict:
    """Is every optimal policy counterfactually unfair with respect to ``a``?"""
    _require_non_decision(scim, a, "counterfactual fairness")
    opt = optimal_policies(scim)
    if len(opt) > max_enumeration:
        raise EnumerationLimitError(f"{len(opt)} optimal policies exceed the cap of {max_enumeration}")
    for policy in opt:
        if is_counterfactually_fair(scim, policy, a).holds:
            return SemanticVerdict(False, {"fair_optimal_policy": policy})
    return SemanticVerdict(True, {"optimal_policies": len(opt)})


# -- policies that ignore nonrequisite observations ------------------------------------

def requisite_respecting_policy(scim: Scim, opt: OptimalPolicies | None = None) -> Policy | None:
    """An optimal policy constant in every nonrequisite parent, or ``None``.

    Cells are grouped by their requisite parents and ``ε_D``; a group needs a
    decision value that is optimal in all of its cells.
    """
    opt = opt or optimal_policies(scim)
    req = requisite_observations(scim.cid)
    keep = [i for i, p in enumerate(opt.inputs) if p in req]
    groups: dict[tuple, list[int]] = {}
    for j, cell in enumerate(opt.cells):
        groups.setdefault(tuple(cell[i] for i in keep) + (cell[-1],), []).append(j)
    choice: list = [None] * len(opt.cells)
    for members in groups.values():
        common = [v for v in opt.allowed[members[0]] if all(v in opt.allowed[j] for j in members[1:])]
        if not common:
            return None
        for j in members:
            choice[j] = common[0]
    return Policy.from_cells(opt.decision, opt.inputs, opt.cells, choice)


def policy_count(opt: OptimalPolicies) -> int:
    return math.prod(len(a) for a in opt.allowed)
