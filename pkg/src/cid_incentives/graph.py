"""Causal influence diagrams and the purely graphical algorithms on them."""

from __future__ import annotations

import heapq
from collections import deque
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence


class NodeKind(str, Enum):
    CHANCE = "chance"
    DECISION = "decision"
    UTILITY = "utility"


class GraphError(ValueError):
    """Raised when a graph is malformed or an operation's precondition fails."""


class UnknownNodeError(GraphError, KeyError):
    def __init__(self, name):
        super().__init__(f"unknown node {name!r}")
        self.name = name

    def __str__(self):
        return self.args[0]


class Cid:
    """A causal influence diagram.

    Nodes carry a kind (chance, decision or utility) and a parent list.  The
    object is treated as immutable; the ``with_*``/``without_*`` helpers
    return new diagrams.  A ``Cid`` may be constructed in an invalid state
    (cycles, dangling parents) so that :func:`validate` can report every
    problem; the algorithms below assume a valid diagram.
    """

    def __init__(
        self,
        nodes: Iterable[tuple[str, NodeKind | str]],
        parents: Mapping[str, Sequence[str]] | None = None,
    ):
        kinds: dict[str, NodeKind] = {}
        self._duplicates: list[str] = []
        for name, kind in nodes:
            if name in kinds:
                self._duplicates.append(name)
            kinds[name] = NodeKind(kind)
        self.kinds = kinds
        parents = dict(parents or {})
        self._dangling = {
            (p, v) for v, ps in parents.items() for p in ps if p not in kinds
        } | {(None, v) for v in parents if v not in kinds}
        raw = {v: tuple(dict.fromkeys(parents.get(v, ()))) for v in kinds}
        self._raw_parents = raw
        self.order = self._canonical_order(raw)
        self._rank = {v: i for i, v in enumerate(self.order)}
        self.parents: dict[str, tuple[str, ...]] = {
            v: tuple(sorted((p for p in raw[v] if p in kinds), key=self._rank.__getitem__))
            for v in self.order
        }
        children: dict[str, list[str]] = {v: [] for v in self.order}
        for v in self.order:
            for p in self.parents[v]:
                children[p].append(v)
        self.children = {v: tuple(sorted(cs, key=self._rank.__getitem__)) for v, cs in children.items()}

    @staticmethod
    def _canonical_order(raw):
        # Kahn's algorithm, always releasing the lexicographically least node.
        indeg = {v: sum(p in raw for p in ps) for v, ps in raw.items()}
        kids: dict[str, list[str]] = {v: [] for v in raw}
        for v, ps in raw.items():
            for p in ps:
                if p in raw:
                    kids[p].append(v)
        heap = [v for v, d in indeg.items() if d == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            v = heapq.heappop(heap)
            order.append(v)
            for c in kids[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(heap, c)
        if len(order) < len(raw):
            # cyclic: keep the acyclic prefix, then the rest by name
            order += sorted(set(raw) - set(order))
        return tuple(order)

    # -- basic accessors -------------------------------------------------
    def __contains__(self, name) -> bool:
        return name in self.kinds

    def __iter__(self) -> Iterator[str]:
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cid):
            return NotImplemented
        return self.kinds == other.kinds and self.parents == other.parents

    def __hash__(self):
        return hash((tuple(sorted(self.kinds.items())), tuple(sorted(self.parents.items()))))

    def __repr__(self):
        return f"Cid(nodes={len(self)}, edges={self.edges()})"

    def rank(self, name: str) -> int:
        self._require(name)
        return self._rank[name]

    def sort(self, names: Iterable[str]) -> list[str]:
        return sorted(names, key=self.rank)

    def kind(self, name: str) -> NodeKind:
        self._require(name)
        return self.kinds[name]

    def edges(self) -> list[tuple[str, str]]:
        return [(p, v) for v in self.order for p in self.parents[v]]

    @property
    def decisions(self) -> list[str]:
        return [v for v in self.order if self.kinds[v] is NodeKind.DECISION]

    @property
    def utilities(self) -> list[str]:
        return [v for v in self.order if self.kinds[v] is NodeKind.UTILITY]

    @property
    def chance_nodes(self) -> list[str]:
        return [v for v in self.order if self.kinds[v] is NodeKind.CHANCE]

    @property
    def decision(self) -> str:
        """The unique decision node; raises if there are zero or several."""
        ds = self.decisions
        if len(ds) != 1:
            raise GraphError(f"expected exactly one decision node, found {len(ds)}")
        return ds[0]

    def _require(self, *names):
        for n in names:
            if n not in self.kinds:
                raise UnknownNodeError(n)

    # -- derived diagrams --------------------------------------------------
    def _from_parents(self, parents) -> Cid:
        return Cid(((v, self.kinds[v]) for v in self.order), parents)

    def with_edge(self, src: str, dst: str) -> Cid:
        self._require(src, dst)
        parents = {v: list(ps) for v, ps in self.parents.items()}
        if src not in parents[dst]:
            parents[dst].append(src)
        return self._from_parents(parents)

    def without_edges(self, edges: Iterable[tuple[str, str]]) -> Cid:
        drop = set(edges)
        parents = {v: [p for p in ps if (p, v) not in drop] for v, ps in self.parents.items()}
        return self._from_parents(parents)

    def relabel(self, mapping: Mapping[str, str]) -> Cid:
        return Cid(
            ((mapping.get(v, v), self.kinds[v]) for v in self.order),
            {mapping.get(v, v): [mapping.get(p, p) for p in ps] for v, ps in self.parents.items()},
        )


def validate(cid: Cid) -> list[str]:
    """Return every violated diagram invariant; an empty list means valid."""
    problems = []
    for name in cid._duplicates:
        problems.append(f"duplicate node name {name!r}")
    for name in cid.kinds:
        if not isinstance(name, str) or not name:
            problems.append(f"node name {name!r} must be a nonempty string")
    for parent, child in sorted(cid._dangling, key=lambda e: (str(e[1]), str(e[0]))):
        if parent is None:
            problems.append(f"parent list given for unknown node {child!r}")
        else:
            problems.append(f"node {child!r} has unknown parent {parent!r}")
    if _has_cycle(cid._raw_parents):
        problems.append("cycle: the edge relation is not acyclic")
    for u in cid.utilities:
        if cid.children[u]:
            problems.append(f"utility node has children: {u!r} -> {', '.join(cid.children[u])}")
    for v, ps in cid._raw_parents.items():
        if v in ps:
            problems.append(f"self-loop on {v!r}")
    return problems


def _has_cycle(raw) -> bool:
    state = {}

    def visit(v):
        state[v] = 1
        for p in raw.get(v, ()):
            if p not in raw:
                continue
            s = state.get(p)
            if s == 1 or (s is None and visit(p)):
                return True
        state[v] = 2
        return False

    return any(state.get(v) is None and visit(v) for v in raw)


def descendants(cid: Cid, v: str) -> set[str]:
    """All nodes reachable from ``v`` by a directed path, including ``v``."""
    cid._require(v)
    seen = {v}
    queue = deque([v])
    while queue:
        for c in cid.children[queue.popleft()]:
            if c not in seen:
                seen.add(c)
                queue.append(c)
    return seen


def ancestors(cid: Cid, nodes: Iterable[str]) -> set[str]:
    """All nodes with a directed path into ``nodes`` (the nodes included)."""
    nodes = list(nodes)
    cid._require(*nodes)
    seen = set(nodes)
    queue = deque(nodes)
    while queue:
        for p in cid.parents[queue.popleft()]:
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return seen


def directed_path_exists(cid: Cid, sources: Iterable[str], targets: Iterable[str]) -> bool:
    sources, targets = set(sources), set(targets)
    cid._require(*sources, *targets)
    reach: set[str] = set()
    for s in sources:
        if s not in reach:
            reach |= descendants(cid, s)
    return bool(reach & targets)


def shortest_directed_path(cid: Cid, src: str, targets: Iterable[str]) -> list[str] | None:
    """Lexicographically least shortest directed path from ``src`` into ``targets``.

    Ties between equally short paths are broken by comparing node ranks in
    the canonical order, position by position.
    """
    targets = set(targets)
    cid._require(src, *targets)
    dist = {t: 0 for t in targets}
    queue = deque(targets)
    while queue:
        v = queue.popleft()
        for p in cid.parents[v]:
            if p not in dist:
                dist[p] = dist[v] + 1
                queue.append(p)
    if src not in dist:
        return None
    path = [src]
    while dist[path[-1]]:
        here = dist[path[-1]]
        path.append(next(c for c in cid.children[path[-1]] if dist.get(c) == here - 1))
    return path


def directed_paths(cid: Cid, src: str, targets: Iterable[str], avoid: Iterable[str] = ()) -> Iterator[list[str]]:
    """Every simple directed path from ``src`` that stops at its first target.

    Paths never pass through ``avoid`` (endpoints included).
    """
    targets, avoid = set(targets), set(avoid)
    cid._require(src, *targets)
    if src in avoid:
        return
    stack = [(src, [src])]
    while stack:
        v, path = stack.pop()
        if v in targets:
            yield path
            continue
        for c in reversed(cid.children[v]):
            if c not in path and c not in avoid:
                stack.append((c, path + [c]))


def d_separated(cid: Cid, xs: Iterable[str], ys: Iterable[str], zs: Iterable[str] = ()) -> bool:
    """Decide ``xs`` ⊥ ``ys`` | ``zs`` by d-separation.

    The sets may overlap.  A path with an endpoint in ``zs`` is blocked, and a
    node lying in both ``xs`` and ``ys`` but not in ``zs`` forms a trivial
    connecting path.
    """
    xs, ys, zs = set(xs), set(ys), set(zs)
    cid._require(*xs, *ys, *zs)
    return not (d_connected_from(cid, xs - zs, zs) & ys)


def d_connected_from(cid: Cid, xs: Iterable[str], zs: Iterable[str]) -> set[str]:
    """Nodes reachable from ``xs`` along a path that is active given ``zs``.

    Search over (node, direction) states: ``up`` means the node was entered
    from one of its children, ``down`` from one of its parents.
    """
    zs = set(zs)
    anc_z = ancestors(cid, zs) if zs else set()
    start = [(x, "up") for x in xs if x not in zs]
    seen = set(start)
    queue = deque(start)
    reached = set()
    while queue:
        v, direction = queue.popleft()
        if v not in zs:
            reached.add(v)
        nxt = []
        if direction == "up" and v not in zs:
            nxt += [(p, "up") for p in cid.parents[v]]
            nxt += [(c, "down") for c in cid.children[v]]
        elif direction == "down":
            if v not in zs:
                nxt += [(c, "down") for c in cid.children[v]]
            if v in anc_z:
                nxt += [(p, "up") for p in cid.parents[v]]
        for state in nxt:
            if state not in seen:
                seen.add(state)
                queue.append(state)
    return reached


def active_paths(cid: Cid, x: str, targets: Iterable[str], zs: Iterable[str]) -> Iterator[list[str]]:
    """Enumerate simple paths from ``x`` to a node of ``targets`` that are active given ``zs``.

    Only nontrivial paths are produced, each ending at the first target it
    meets.  Order is depth-first; callers wanting a canonical choice sort.
    """
    targets, zs = set(targets), set(zs)
    cid._require(x, *targets, *zs)
    if x in zs:
        return
    anc_z = ancestors(cid, zs) if zs else set()
    path = [x]

    def extend(into_last):
        # into_last: the edge between path[-2] and path[-1] points into path[-1]
        v = path[-1]
        if len(path) > 1 and v in targets:
            yield list(path)
            return
        steps = [(c, True) for c in cid.children[v]] + [(p, False) for p in cid.parents[v]]
        for nxt, forward in steps:
            if nxt in path or (nxt in targets and nxt in zs):
                continue
            if len(path) > 1:
                if into_last and not forward:
                    if v not in anc_z:
                        continue
                elif v in zs:
                    continue
            path.append(nxt)
            yield from extend(forward)
            path.pop()

    yield from extend(False)


def is_active_path(cid: Cid, path: Sequence[str], zs: Iterable[str]) -> bool:
    """Check a single path (a node sequence along skeleton edges) against the blocking rules."""
    zs = set(zs)
    if not path or path[0] in zs or path[-1] in zs or len(set(path)) != len(path):
        return False
    anc_z = ancestors(cid, zs) if zs else set()
    for a, b in zip(path, path[1:]):
        if b not in cid.children[a] and a not in cid.children[b]:
            return False
    for a, v, b in zip(path, path[1:], path[2:]):
        collider = v in cid.children[a] and v in cid.children[b]
        if collider and v not in anc_z:
            return False
        if not collider and v in zs:
            return False
    return True


def _require_single_decision(cid: Cid) -> str:
    return cid.decision


def downstream_utilities(cid: Cid) -> list[str]:
    d = _require_single_decision(cid)
    desc = descendants(cid, d)
    return [u for u in cid.utilities if u in desc]


def is_requisite(cid: Cid, x: str) -> bool:
    d = _require_single_decision(cid)
    if x not in cid.parents[d]:
        raise GraphError(f"{x!r} is not an observation of {d!r}")
    utils = downstream_utilities(cid)
    if not utils:
        return False
    cond = (set(cid.parents[d]) | {d}) - {x}
    return not d_separated(cid, {x}, utils, cond)


def requisite_observations(cid: Cid) -> set[str]:
    """Parents of the decision that are d-connected to a downstream utility."""
    d = _require_single_decision(cid)
    return {x for x in cid.parents[d] if is_requisite(cid, x)}


def nonrequisite_links(cid: Cid) -> list[tuple[str, str]]:
    d = _require_single_decision(cid)
    req = requisite_observations(cid)
    return [(x, d) for x in cid.parents[d] if x not in req]


def minimal_reduction(cid: Cid) -> Cid:
    """Remove every nonrequisite information link in a single pass."""
    return cid.without_edges(nonrequisite_links(cid))


def reduction_is_stable(cid: Cid) -> bool:
    """Diagnostic: whether reducing the minimal reduction again removes nothing."""
    once = minimal_reduction(cid)
    return minimal_reduction(once) == once
