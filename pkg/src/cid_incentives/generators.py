"""Enumerators and samplers for small diagrams and models, used by the sweeps."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Iterator, Sequence

from .graph import Cid, NodeKind
from .scim import FunctionTable, Scim

DEFAULT_PROBS = (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4))


def _acyclic(n: int, edges) -> bool:
    indeg = [0] * n
    kids: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        kids[a].append(b)
        indeg[b] += 1
    ready = [i for i in range(n) if indeg[i] == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for c in kids[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    return seen == n


def small_cids(max_chance: int = 2) -> Iterator[Cid]:
    """Every CID with one decision ``D``, one utility ``U`` and up to
    ``max_chance`` chance nodes, one representative per relabelling of the
    chance nodes.  Utility is a sink; every other pair may be linked either
    way or not at all.
    """
    for k in range(max_chance + 1):
        chance = [chr(ord("A") + i) for i in range(k)]
        inner = chance + ["D"]
        names = inner + ["U"]
        pos = {v: i for i, v in enumerate(names)}
        pairs = list(itertools.combinations(inner, 2))
        seen = set()
        for orient in itertools.product((None, 0, 1), repeat=len(pairs)):
            inner_edges = []
            for (a, b), o in zip(pairs, orient):
                if o == 0:
                    inner_edges.append((a, b))
                elif o == 1:
                    inner_edges.append((b, a))
            if not _acyclic(len(names), [(pos[a], pos[b]) for a, b in inner_edges]):
                continue
            for into_u in itertools.product((False, True), repeat=len(inner)):
                edges = inner_edges + [(v, "U") for v, on in zip(inner, into_u) if on]
                key = min(
                    tuple(sorted((p[a], p[b]) for a, b in edges))
                    for p in _chance_relabellings(chance)
                )
                if key in seen:
                    continue
                seen.add(key)
                kinds = [(v, NodeKind.CHANCE) for v in chance]
                kinds += [("D", NodeKind.DECISION), ("U", NodeKind.UTILITY)]
                parents: dict[str, list[str]] = {v: [] for v in names}
                for a, b in edges:
                    parents[b].append(a)
                yield Cid(kinds, parents)


def _chance_relabellings(chance: Sequence[str]):
    for perm in itertools.permutations(chance):
        m = dict(zip(chance, perm))
        m["D"], m["U"] = "D", "U"
        yield m


def unlabeled_dags(n: int) -> list[tuple[tuple[int, int], ...]]:
    """One edge list per isomorphism class of DAGs on ``n`` nodes ``0..n-1``.

    Every DAG has a labelling in which edges go from lower to higher index,
    so enumerating those and keeping the least permuted edge set per class is
    exhaustive.
    """
    slots = list(itertools.combinations(range(n), 2))
    perms = list(itertools.permutations(range(n)))
    classes = {}
    for mask in range(1 << len(slots)):
        edges = [slots[i] for i in range(len(slots)) if mask >> i & 1]
        canon = min(tuple(sorted((p[a], p[b]) for a, b in edges)) for p in perms)
        classes.setdefault(canon, None)
    return sorted(classes, key=lambda e: (len(e), e))


def dag_cid(n: int, edges) -> Cid:
    """A chance-only diagram on nodes ``n0..n{n-1}``."""
    names = [f"n{i}" for i in range(n)]
    parents: dict[str, list[str]] = {v: [] for v in names}
    for a, b in edges:
        parents[names[b]].append(names[a])
    return Cid([(v, NodeKind.CHANCE) for v in names], parents)


def random_dag(n: int, rng: random.Random, density: float = 0.4) -> Cid:
    edges = [(a, b) for a, b in itertools.combinations(range(n), 2) if rng.random() < density]
    perm = list(range(n))
    rng.shuffle(perm)
    return dag_cid(n, [(perm[a], perm[b]) for a, b in edges])


def random_binary_scim(cid: Cid, rng: random.Random, probs: Sequence[Fraction] = DEFAULT_PROBS) -> Scim:
    """A random model on ``cid`` with every domain ``{0, 1}``.

    The decision's exogenous variable is a singleton, so policies are
    deterministic; every other exogenous variable is binary with a
    full-support distribution drawn from ``probs``.  Structural tables are
    uniformly random.
    """
    d = cid.decision
    domains = {v: (0, 1) for v in cid.order}
    exogenous = {}
    for v in cid.order:
        if v == d:
            exogenous[v] = {0: Fraction(1)}
        else:
            p = rng.choice(probs)
            exogenous[v] = {0: p, 1: 1 - p}
    functions = {}
    for v in cid.order:
        if v == d:
            continue
        ps = cid.parents[v]
        rows = {}
        for combo in itertools.product(*[domains[q] for q in ps], exogenous[v]):
            rows[combo] = rng.randrange(2)
        functions[v] = FunctionTable(v, ps, rows)
    return Scim(cid, domains, exogenous, functions)
