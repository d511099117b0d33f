"""Graphical criteria for value of information, value of control, response
incentives and instrumental control incentives in single-decision diagrams."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .graph import (
    Cid,
    GraphError,
    descendants,
    directed_path_exists,
    is_requisite,
    minimal_reduction,
    nonrequisite_links,
    requisite_observations,
)


class IncentiveKind(str, Enum):
    VOI = "voi"
    VOC = "voc"
    RI = "ri"
    ICI = "ici"

    @property
    def label(self) -> str:
        return {"voi": "VoI", "voc": "VoC", "ri": "RI", "ici": "ICI"}[self.value]


KINDS = tuple(IncentiveKind)


def applicable(cid: Cid, x: str, kind: IncentiveKind | str) -> bool:
    """Whether the incentive ``kind`` is defined for node ``x`` at all."""
    kind = IncentiveKind(kind)
    d = cid.decision
    cid._require(x)
    if kind is IncentiveKind.VOI:
        return x not in descendants(cid, d)
    if kind in (IncentiveKind.VOC, IncentiveKind.RI):
        return x != d
    return True


def admits_voi(cid: Cid, x: str) -> bool:
    """``x`` is a requisite observation once the link ``x -> D`` is added."""
    d = cid.decision
    cid._require(x)
    if x in descendants(cid, d):
        raise GraphError(f"VoI undefined for descendants of the decision: {x!r}")
    return is_requisite(cid.with_edge(x, d), x)


def admits_ri(cid: Cid, x: str) -> bool:
    """The minimal reduction has a directed path ``x ⇝ D`` (of length at least one)."""
    d = cid.decision
    cid._require(x)
    if x == d:
        raise GraphError("response incentives are undefined for the decision itself")
    return directed_path_exists(minimal_reduction(cid), {x}, {d})


def admits_voc(cid: Cid, x: str) -> bool:
    """The minimal reduction has a directed path from ``x`` to some utility node."""
    d = cid.decision
    cid._require(x)
    if x == d:
        raise GraphError("value of control is undefined for the decision itself")
    return directed_path_exists(minimal_reduction(cid), {x}, cid.utilities)


def admits_ici(cid: Cid, x: str) -> bool:
    """There is a directed path ``D ⇝ x ⇝ U`` for some utility node ``U``."""
    d = cid.decision
    cid._require(x)
    return x in descendants(cid, d) and directed_path_exists(cid, {x}, cid.utilities)


_CHECKS = {
    IncentiveKind.VOI: admits_voi,
    IncentiveKind.VOC: admits_voc,
    IncentiveKind.RI: admits_ri,
    IncentiveKind.ICI: admits_ici,
}


def admits(cid: Cid, x: str, kind: IncentiveKind | str) -> bool:
    return _CHECKS[IncentiveKind(kind)](cid, x)


@dataclass(frozen=True)
class NodeReport:
    name: str
    kind: str
    # None marks an inapplicable (node, incentive) pair
    flags: dict[IncentiveKind, bool | None] = field(default_factory=dict)

    def admits(self, kind) -> bool:
        return bool(self.flags.get(IncentiveKind(kind)))

    def applicable(self, kind) -> bool:
        return self.flags.get(IncentiveKind(kind)) is not None


@dataclass(frozen=True)
class IncentiveReport:
    decision: str
    nodes: tuple[NodeReport, ...]
    requisite: tuple[str, ...]
    removed_links: tuple[tuple[str, str], ...]

    def __getitem__(self, name: str) -> NodeReport:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)

    def admitting(self, kind) -> set[str]:
        return {n.name for n in self.nodes if n.admits(kind)}

    def table(self) -> str:
        """Fixed-width text rendering; inapplicable cells read ``n/a``."""
        header = ["node", "kind"] + [k.label for k in KINDS]
        rows = [header]
        for n in self.nodes:
            cells = []
            for k in KINDS:
                v = n.flags[k]
                cells.append("n/a" if v is None else ("yes" if v else "no"))
            rows.append([n.name, n.kind] + cells)
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        lines.append("")
        lines.append(f"decision: {self.decision}")
        lines.append("requisite observations: " + (", ".join(self.requisite) or "(none)"))
        links = ", ".join(f"{a}->{b}" for a, b in self.removed_links)
        lines.append("removed information links: " + (links or "(none)"))
        return "\n".join(lines) + "\n"


def analyze(cid: Cid) -> IncentiveReport:
    d = cid.decision
    reduced = minimal_reduction(cid)
    desc_d = descendants(cid, d)
    utilities = cid.utilities
    nodes = []
    for x in cid.order:
        flags: dict[IncentiveKind, bool | None] = {}
        flags[IncentiveKind.VOI] = None if x in desc_d else is_requisite(cid.with_edge(x, d), x)
        if x == d:
            flags[IncentiveKind.VOC] = None
            flags[IncentiveKind.RI] = None
        else:
            flags[IncentiveKind.VOC] = directed_path_exists(reduced, {x}, utilities)
            flags[IncentiveKind.RI] = directed_path_exists(reduced, {x}, {d})
        flags[IncentiveKind.ICI] = x in desc_d and directed_path_exists(cid, {x}, utilities)
        nodes.append(NodeReport(x, cid.kinds[x].value, flags))
    return IncentiveReport(
        decision=d,
        nodes=tuple(nodes),
        requisite=tuple(cid.sort(requisite_observations(cid))),
        removed_links=tuple(nonrequisite_links(cid)),
    )
