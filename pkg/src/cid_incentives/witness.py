"""Compatible models that exhibit an incentive whenever its graphical criterion holds.

Each constructor follows the matching completeness argument and checks its
own output semantically before returning it.

Response incentive scaffold (names as in the docstrings below):

* an ``X ⇝ W`` path in the minimal reduction, ``W`` its only requisite
  observation, followed by the link ``W -> D``;
* a path ``W ~ U`` active given ``Pa_D ∪ {D} \\ {W}``, made of directed
  segments leaving sources ``S^0..S^m`` and entering colliders ``C^1..C^m``;
* per collider a directed path ``C^i ⇝ O^i`` into a decision parent;
* a directed path ``D ⇝ U`` joining the active path at ``Y``.

Every scaffold node multiplies the values of its scaffold predecessors, and
sources also multiply in their own ``±1`` noise.  This single rule yields
``C^i = S^{i-1}·S^i``, ``Y = S^m·D``, ``Z = X·S^0`` and plain copies
elsewhere, and covers the node-coincidence cases without special handling.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .criteria import admits_ici, admits_ri, admits_voc, admits_voi
from .graph import (
    Cid,
    GraphError,
    active_paths,
    directed_paths,
    downstream_utilities,
    is_active_path,
    minimal_reduction,
    shortest_directed_path,
)
from .scim import FunctionTable, InterventionSet, Scim, optimal_policies, utility_bounds
from .semantics import has_ri

TERNARY = (-1, 0, 1)
BINARY = (0, 1)
HALF = Fraction(1, 2)

# a generous bound on scaffold candidates tried before giving up
MAX_CANDIDATES = 5000


class WitnessError(RuntimeError):
    """No verified witness could be built."""


@dataclass(frozen=True)
class RiScaffold:
    x: str
    w: str
    x_path: tuple[str, ...]
    active_path: tuple[str, ...]
    sources: tuple[str, ...]
    colliders: tuple[str, ...]
    collider_paths: tuple[tuple[str, ...], ...]
    d_path: tuple[str, ...]
    y: str
    z: str
    case: str

    edges: frozenset = frozenset()  # scaffold edges a -> b; b reads a

    @property
    def observations(self) -> tuple[str, ...]:
        return tuple(p[-1] for p in self.collider_paths)


def _rank_key(cid: Cid):
    return lambda path: (len(path), [cid.rank(v) for v in path])


def _directions(cid: Cid, path) -> list[bool]:
    return [b in cid.children[a] for a, b in zip(path, path[1:])]


def _parse(cid: Cid, path):
    fwd = _directions(cid, path)
    sources = [k for k in range(len(path) - 1) if fwd[k] and (k == 0 or not fwd[k - 1])]
    colliders = [k for k in range(1, len(path) - 1) if fwd[k - 1] and not fwd[k]]
    return sources, colliders


def _simple(path) -> bool:
    return len(set(path)) == len(path)


def _assemble(cid: Cid, x: str, xp, ap, dp, cpaths_choice) -> RiScaffold | None:
    """Apply the merges to one choice of paths; None if the choice is unusable."""
    d = cid.decision
    pa_d = set(cid.parents[d])
    w = xp[-1]
    # Y: first node of the active path on the D ⇝ U path; follow the latter from there
    j = next(k for k, v in enumerate(ap) if v in dp)
    y = ap[j]
    ap = list(ap[:j]) + list(dp[dp.index(y) :])
    if not _simple(ap):
        return None
    # Z: walking from S^0 back to W, the first node on the X path
    sources, colliders = _parse(cid, ap)
    s0 = sources[0]
    on_x = set(xp)
    zi = next(k for k in range(s0, -1, -1) if ap[k] in on_x)
    z = ap[zi]
    ap = list(reversed(xp[xp.index(z) :])) + ap[zi + 1 :]
    if not _simple(ap):
        return None
    sources, colliders = _parse(cid, ap)
    coll_nodes = [ap[k] for k in colliders]
    paths = {}
    for c in coll_nodes:
        options = cpaths_choice(c)
        if not options:
            return None
        paths[c] = options
    # make the collider paths mutually disjoint; each rewrite drops a collider
    while True:
        sources, colliders = _parse(cid, ap)
        coll_nodes = [ap[k] for k in colliders]
        if any(c not in paths for c in coll_nodes):
            return None
        hit = None
        for i, j in itertools.combinations(range(len(coll_nodes)), 2):
            pi, pj = paths[coll_nodes[i]], paths[coll_nodes[j]]
            common = set(pi) & set(pj)
            if common:
                hit = (i, j, next(v for v in pi if v in common))
                break
        if hit is None:
            break
        i, j, n = hit
        ci, cj = colliders[i], colliders[j]
        pi, pj = paths[coll_nodes[i]], paths[coll_nodes[j]]
        ap = ap[:ci] + list(pi[: pi.index(n) + 1]) + list(reversed(pj[: pj.index(n)])) + ap[cj + 1 :]
        if not _simple(ap):
            return None
        paths = {c: p for c, p in paths.items() if c not in coll_nodes[i : j + 1]}
        paths[n] = tuple(pi[pi.index(n) :])
    sources, colliders = _parse(cid, ap)
    coll_nodes = [ap[k] for k in colliders]
    src_nodes = [ap[k] for k in sources]
    if y not in ap or ap[-1] != dp[-1]:
        return None
    if not is_active_path(cid, ap, (pa_d | {d}) - {w}):
        return None
    s0 = src_nodes[0]
    if x == z == s0:
        case = "1"
    elif z == s0:
        case = "2"
    elif x == z:
        case = "3"
    else:
        case = "default"
    edges = set(zip(xp, xp[1:]))
    for c in coll_nodes:
        edges |= set(zip(paths[c], paths[c][1:]))
    edges |= set(zip(dp[: dp.index(y)], dp[1 : dp.index(y) + 1]))
    edges |= {(a, b) if b in cid.children[a] else (b, a) for a, b in zip(ap, ap[1:])}
    return RiScaffold(
        x=x,
        w=w,
        x_path=tuple(xp),
        active_path=tuple(ap),
        sources=tuple(src_nodes),
        colliders=tuple(coll_nodes),
        collider_paths=tuple(paths[c] for c in coll_nodes),
        d_path=tuple(dp),
        y=y,
        z=z,
        case=case,
        edges=frozenset(edges),
    )


def ri_scaffolds(cid: Cid, x: str) -> Iterator[RiScaffold]:
    """Candidate scaffolds in canonical order: shorter paths first, ties broken
    by node rank position by position."""
    d = cid.decision
    key = _rank_key(cid)
    reduced = minimal_reduction(cid)
    req = set(reduced.parents[d])
    pa_d = set(cid.parents[d])
    utils = set(downstream_utilities(cid))
    for xp in sorted(directed_paths(reduced, x, req), key=key):
        w = xp[-1]
        cond = (pa_d | {d}) - {w}
        targets = pa_d - {w}

        def cpaths(c, _avoid=w, _targets=targets):
            return sorted(directed_paths(cid, c, _targets, avoid={_avoid}), key=key)

        for ap in sorted(active_paths(cid, w, utils, cond), key=key):
            for dp in sorted(directed_paths(cid, d, {ap[-1]}), key=key):
                per: dict = {}

                def choose(c, _per=per):
                    opts = _per.setdefault(c, cpaths(c))
                    return tuple(opts[0]) if opts else None

                sc = _assemble(cid, x, tuple(xp), tuple(ap), tuple(dp), choose)
                if sc is not None:
                    yield sc


def scaffold_model(cid: Cid, sc: RiScaffold, x_value: int = 1) -> Scim:
    """The ternary model read off a scaffold.

    ``x_value`` is the constant used for ``X`` when it reads nothing.
    """
    d = cid.decision
    reads: dict[str, set[str]] = {v: set() for v in cid.order}
    for a, b in sc.edges:
        reads[b].add(a)
    sources = set(sc.sources)
    domains = {v: TERNARY for v in cid.order}
    exogenous = {v: ({-1: HALF, 1: HALF} if v in sources else {1: Fraction(1)}) for v in cid.order}
    functions = {}
    for v in cid.order:
        if v == d:
            continue
        ins = [p for p in cid.parents[v] if p in reads[v]]
        functions[v] = _product_table(cid, v, ins, domains, exogenous[v], v in sources, x_value if v == sc.x else 0)
    return Scim(cid, domains, exogenous, functions)


def _product_table(cid, v, ins, domains, eps_dist, noisy: bool, empty_value: int) -> FunctionTable:
    ps = cid.parents[v]
    pos = [ps.index(p) for p in ins]
    rows = {}
    for combo in itertools.product(*[domains[p] for p in ps], eps_dist):
        if ins or noisy:
            val = math.prod(combo[i] for i in pos)
            if noisy:
                val *= combo[-1]
        else:
            val = empty_value
        rows[combo] = val
    return FunctionTable(v, ps, rows)


def _verify_ri(scim: Scim, x: str) -> bool:
    if optimal_policies(scim).value != 1:
        return False
    if utility_bounds(scim, InterventionSet.do({x: 0})) != (0, 0):
        return False
    return has_ri(scim, x).holds


def ri_witness_with_scaffold(cid: Cid, x: str) -> tuple[Scim, RiScaffold]:
    if not admits_ri(cid, x):
        raise GraphError(f"the response incentive criterion does not hold for {x!r}")
    for n, sc in enumerate(ri_scaffolds(cid, x)):
        if n >= MAX_CANDIDATES:
            break
        model = scaffold_model(cid, sc)
        if _verify_ri(model, x):
            return model, sc
    raise WitnessError(f"no verified response-incentive scaffold for {x!r}")


def ri_witness(cid: Cid, x: str) -> Scim:
    """A model compatible with ``cid`` in which every optimal policy responds to ``x``.

    Guarantees: attainable utility 1, and expected utility 0 under
    ``do(x=0)`` for every policy.
    """
    return ri_witness_with_scaffold(cid, x)[0]


def voi_witness(cid: Cid, x: str) -> Scim:
    """A model on ``cid`` plus the link ``x -> D`` where observing ``x`` is
    worth exactly 1."""
    if not admits_voi(cid, x):
        raise GraphError(f"the value of information criterion does not hold for {x!r}")
    return ri_witness(cid.with_edge(x, cid.decision), x)


def _copy_chain_model(cid: Cid, chain, start_value: int | None) -> Scim:
    """Binary model where each node of ``chain`` copies its predecessor.

    The first node is the constant ``start_value`` (unless it is the
    decision); everything off the chain is 0.
    """
    d = cid.decision
    prev = {b: a for a, b in zip(chain, chain[1:])}
    domains = {v: BINARY for v in cid.order}
    exogenous = {v: {0: Fraction(1)} for v in cid.order}
    functions = {}
    for v in cid.order:
        if v == d:
            continue
        if v in prev:
            src = prev[v]
            functions[v] = lambda pa, e, _s=src: pa[_s]
        elif v == chain[0] and start_value is not None:
            functions[v] = lambda pa, e, _c=start_value: _c
        else:
            functions[v] = lambda pa, e: 0
    return Scim.build(cid, domains, exogenous, functions)


def voc_witness(cid: Cid, x: str) -> tuple[Scim, FunctionTable]:
    """A model and a soft intervention on ``x`` that raises attainable utility by 1."""
    if not admits_voc(cid, x):
        raise GraphError(f"the value of control criterion does not hold for {x!r}")
    d = cid.decision
    utils = set(cid.utilities)
    for path in sorted(directed_paths(cid, x, utils, avoid={d}), key=_rank_key(cid)):
        model = _copy_chain_model(cid, path, 0)
        g = FunctionTable(x, cid.parents[x], {k: 1 for k in model.functions[x].rows})
        return model, g
    # every path to a utility goes through D, so x ⇝ D in the minimal reduction
    model, sc = ri_witness_with_scaffold(cid, x)
    g = model.functions[x]
    muted = model.with_function(x, FunctionTable(x, cid.parents[x], {k: 0 for k in g.rows}))
    return muted, g


def ici_witness(cid: Cid, x: str) -> tuple[Scim, dict, int]:
    """A model, decision context and decision value exhibiting a control incentive on ``x``.

    Along a path ``D ⇝ x ⇝ U`` every node copies its predecessor; the
    returned context is all-zero and ``d = 0``.
    """
    if not admits_ici(cid, x):
        raise GraphError(f"the instrumental control criterion does not hold for {x!r}")
    d = cid.decision
    head = shortest_directed_path(cid, d, {x})
    tail = shortest_directed_path(cid, x, set(cid.utilities))
    chain = head + tail[1:]
    model = _copy_chain_model(cid, chain, None)
    context = {p: 0 for p in cid.parents[d]}
    return model, context, 0
