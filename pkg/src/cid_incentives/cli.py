"""Command-line interface.

Exit codes: 0 success, 1 a checked incentive does not hold, 2 usage or
validation error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .criteria import IncentiveKind, analyze
from .dot import export_dot
from .graph import d_separated, minimal_reduction, nonrequisite_links
from .io import as_cid, parse_value, read_model, write_model
from .scim import (
    DEFAULT_MAX_ENUMERATION,
    EnumerationLimitError,
    FunctionTable,
    Policy,
    Scim,
    optimal_policies,
)
from . import semantics, witness

OK, DOES_NOT_HOLD, USAGE = 0, 1, 2


class CliError(Exception):
    pass


def _names(text: str | None) -> list[str]:
    if not text:
        return []
    return [t.strip() for t in text.split(",") if t.strip()]


def _assignment(text: str | None) -> dict:
    out = {}
    for item in _names(text):
        if "=" not in item:
            raise CliError(f"expected NAME=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = parse_value(v.strip(), f"--context {k}")
    return out


def _fmt(v) -> str:
    if isinstance(v, Policy):
        return "; ".join(f"{_cell(c)} -> {x}" for c, x in zip(v.cells, v.choices))
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if isinstance(v, FunctionTable):
        return "; ".join(f"{_cell(k)} -> {x}" for k, x in v.rows.items())
    return str(v)


def _cell(c) -> str:
    return "(" + ", ".join(map(str, c)) + ")"


def _load(path: str, want_scim: bool = False):
    model = read_model(path)
    if want_scim and not isinstance(model, Scim):
        raise CliError(f"{path} describes a diagram only; this command needs a scim document")
    return model


def _cap(scim: Scim, args) -> Scim:
    return scim.set_cap(args.max_enumeration)


def cmd_analyze(args, out) -> int:
    cid = as_cid(_load(args.model))
    report = analyze(cid)
    out.write(report.table())
    if args.dot:
        kinds = _names(args.markers) or None
        text = export_dot(cid, report, kinds)
        if args.dot == "-":
            out.write(text)
        else:
            with open(args.dot, "w", encoding="utf-8") as fh:
                fh.write(text)
    return OK


def cmd_dsep(args, out) -> int:
    cid = as_cid(_load(args.model))
    xs, ys, zs = _names(args.x), _names(args.y), _names(args.z)
    if not xs or not ys:
        raise CliError("--x and --y need at least one node each")
    sep = d_separated(cid, xs, ys, zs)
    verdict = "d-separated" if sep else "d-connected"
    out.write(f"{{{', '.join(xs)}}} and {{{', '.join(ys)}}} given {{{', '.join(zs)}}}: {verdict}\n")
    return OK


def cmd_reduce(args, out) -> int:
    cid = as_cid(_load(args.model))
    reduced = minimal_reduction(cid)
    for a, b in reduced.edges():
        out.write(f"{a} -> {b}\n")
    removed = nonrequisite_links(cid)
    out.write("removed: " + (", ".join(f"{a} -> {b}" for a, b in removed) or "(none)") + "\n")
    return OK


def cmd_solve(args, out) -> int:
    scim = _cap(_load(args.model, True), args)
    opt = optimal_policies(scim)
    out.write(f"attainable utility: {opt.value}\n")
    out.write(f"optimal policies: {len(opt)}\n")
    if args.tables:
        inputs = ", ".join(list(opt.inputs) + [f"eps_{opt.decision}"])
        out.write(f"cells ({inputs}) -> optimal decisions:\n")
        for c, allowed, p in zip(opt.cells, opt.allowed, opt.cell_probability):
            out.write(f"  {_cell(c)} p={p}: {', '.join(map(str, allowed))}\n")
        if len(opt) > args.max_enumeration:
            raise EnumerationLimitError(f"{len(opt)} optimal policies exceed the cap")
        for i, pol in enumerate(opt, 1):
            out.write(f"policy {i}: {_fmt(pol)}\n")
    return OK


def cmd_check(args, out) -> int:
    scim = _cap(_load(args.model, True), args)
    kind = IncentiveKind(args.incentive)
    x = args.node
    scim.cid._require(x)
    if kind is IncentiveKind.VOI:
        v = semantics.has_voi(scim, x)
    elif kind is IncentiveKind.VOC:
        v = semantics.has_voc(scim, x, max_enumeration=args.max_enumeration)
    elif kind is IncentiveKind.RI:
        v = semantics.has_ri(scim, x, support=args.support)
    elif args.context is not None or args.d is not None:
        ctx = _assignment(args.context)
        if args.d is None:
            raise CliError("--d is required together with --context")
        v = semantics.has_ici(scim, x, ctx, parse_value(args.d, "--d"))
    else:
        v = semantics.has_ici_any(scim, x)
    out.write(f"{kind.label} on {x}: {'holds' if v.holds else 'does not hold'}\n")
    for k in sorted(v.evidence):
        out.write(f"  {k}: {_fmt(v.evidence[k])}\n")
    return OK if v.holds else DOES_NOT_HOLD


def cmd_witness(args, out) -> int:
    cid = as_cid(_load(args.model))
    kind = IncentiveKind(args.incentive)
    x = args.node
    cid._require(x)
    if kind is IncentiveKind.RI:
        model = witness.ri_witness(cid, x)
        verdict = semantics.has_ri(model, x)
        detail = {"attainable utility": optimal_policies(model).value}
    elif kind is IncentiveKind.VOI:
        model = witness.voi_witness(cid, x).with_cid(cid)
        verdict = semantics.has_voi(model, x)
        detail = {"utility gap": verdict.evidence["gap"]}
    elif kind is IncentiveKind.VOC:
        model, g = witness.voc_witness(cid, x)
        verdict = semantics.has_voc(model, x, candidates=[g], max_enumeration=args.max_enumeration)
        detail = {"gain": verdict.evidence.get("gain"), "soft intervention": g}
    else:
        model, ctx, d = witness.ici_witness(cid, x)
        verdict = semantics.has_ici(model, x, ctx, d)
        detail = {"context": ctx, "d": d}
    if not verdict.holds:
        raise witness.WitnessError(f"constructed witness failed its own {kind.label} check")
    write_model(model, args.output)
    out.write(f"{kind.label} witness for {x} written to {args.output} (verified)\n")
    for k, v in detail.items():
        out.write(f"  {k}: {_fmt(v)}\n")
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cid-incentives", description="Incentive analysis for causal influence diagrams.")
    p.add_argument(
        "--max-enumeration",
        type=int,
        default=DEFAULT_MAX_ENUMERATION,
        metavar="N",
        help="cap on exhaustive enumeration (default: %(default)s)",
    )
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="graphical incentive report")
    a.add_argument("model")
    a.add_argument("--dot", metavar="OUT", help="also write DOT ('-' for stdout)")
    a.add_argument("--markers", help="comma-separated incentive kinds to mark in DOT output")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("dsep", help="d-separation query")
    s.add_argument("model")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--z", default="")
    s.set_defaults(func=cmd_dsep)

    r = sub.add_parser("reduce", help="edges of the minimal reduction")
    r.add_argument("model")
    r.set_defaults(func=cmd_reduce)

    o = sub.add_parser("solve", help="attainable utility and optimal policies")
    o.add_argument("model")
    o.add_argument("--tables", action="store_true", help="print every optimal policy")
    o.set_defaults(func=cmd_solve)

    kinds = [k.value for k in IncentiveKind]
    c = sub.add_parser("check", help="semantic incentive check on a model")
    c.add_argument("model")
    c.add_argument("--incentive", required=True, choices=kinds)
    c.add_argument("--node", required=True)
    c.add_argument("--context", help="decision context NAME=VALUE,... (ici)")
    c.add_argument("--d", help="decision value for the nested counterfactual (ici)")
    c.add_argument("--support", action="store_true", help="ri: only positive-probability settings")
    c.set_defaults(func=cmd_check)

    w = sub.add_parser("witness", help="build and verify a witness model")
    w.add_argument("model")
    w.add_argument("--incentive", required=True, choices=kinds)
    w.add_argument("--node", required=True)
    w.add_argument("-o", "--output", required=True)
    w.set_defaults(func=cmd_witness)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.max_enumeration < 1:
        print("error: --max-enumeration must be positive", file=sys.stderr)
        return USAGE
    try:
        return args.func(args, out)
    # model, graph and format errors are all ValueErrors
    except (CliError, ValueError, EnumerationLimitError, OSError, witness.WitnessError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
