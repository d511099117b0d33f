"""Graphviz DOT export with incentive markers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .criteria import KINDS, IncentiveKind, IncentiveReport
from .graph import Cid, NodeKind


@dataclass(frozen=True)
class DotStyle:
    shapes: dict = field(
        default_factory=lambda: {
            NodeKind.DECISION: 'shape=box',
            NodeKind.UTILITY: 'shape=diamond',
            NodeKind.CHANCE: 'shape=box, style="rounded"',
        }
    )
    colors: dict = field(
        default_factory=lambda: {
            IncentiveKind.VOI: "forestgreen",
            IncentiveKind.VOC: "royalblue",
            IncentiveKind.RI: "firebrick",
            IncentiveKind.ICI: "darkorange",
        }
    )


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(
    cid: Cid,
    report: IncentiveReport | None = None,
    kinds: Sequence[IncentiveKind | str] | None = None,
    style: DotStyle | None = None,
    name: str = "cid",
) -> str:
    """Render ``cid``; nodes admitting an incentive get a doubled, coloured outline.

    Information links (edges into the decision) are dashed.

    ``kinds`` picks the markers (default: all four), in the fixed order
    VoI, VoC, RI, ICI.  Without a report only the plain shapes are drawn.
    """
    style = style or DotStyle()
    chosen = [k for k in KINDS if kinds is None or k in {IncentiveKind(x) for x in kinds}]
    if report is not None and [n.name for n in report.nodes] != list(cid.order):
        raise ValueError("report does not describe this graph")
    lines = [f"digraph {_q(name)} {{", '  node [fontname="Helvetica"];']
    for v in cid.order:
        attrs = [style.shapes[cid.kinds[v]]]
        marks = [k for k in chosen if report is not None and report[v].admits(k)]
        if marks:
            attrs.append("peripheries=2")
            # node outlines take a single colour; the label lists every marker
            attrs.append(f"color={_q(style.colors[marks[0]])}")
            attrs.append(f"xlabel={_q(' '.join(k.label for k in marks))}")
        lines.append(f"  {_q(v)} [{', '.join(attrs)}];")
    for a, b in cid.edges():
        extra = " [style=dashed]" if cid.kinds[b] is NodeKind.DECISION else ""
        lines.append(f"  {_q(a)} -> {_q(b)}{extra};")
    if report is not None and chosen:
        lines.append("  subgraph cluster_legend {")
        lines.append('    label="legend"; fontname="Helvetica";')
        for k in chosen:
            lines.append(
                f"    {_q('legend_' + k.value)} [shape=box, style=\"rounded\", peripheries=2, "
                f"color={_q(style.colors[k])}, label={_q(k.label)}];"
            )
        for a, b in zip(chosen, chosen[1:]):
            lines.append(f"    {_q('legend_' + a.value)} -> {_q('legend_' + b.value)} [style=invis];")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
