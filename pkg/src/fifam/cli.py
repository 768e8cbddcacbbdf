"""fifam command-line interface.

Exit codes: 0 ok, 1 property violation or refusal, 2 incomplete search,
64 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .bounds import bisection_bound, main_upper_bound, tor_full_bound
from .canon import CanonicalizationIncomplete
from .constructions import (ConstructionError, LayerSpec, bisection_max, chain_family, hadamard_family,
                            imin_constrained, layered_sunflower, three_layer, two_layer_shared)
from .core import Family, FamilyError, Theta, elements, fmt_set, is_r_closed
from .formats import dumps_json, dumps_text, read_family, to_json_obj
from .search import SearchOptions, chain_search, enumerate_maximum_families, max_family_search
from .structure import StructureError, audit, classify, partition_levels

EXIT_OK, EXIT_VIOLATION, EXIT_INCOMPLETE, EXIT_INPUT = 0, 1, 2, 64

REPORT_SCHEMA = {
    "type": "object",
    "required": ["subcommand", "inputs", "outputs", "wall_time", "version", "exit_code"],
    "properties": {
        "subcommand": {"enum": ["verify", "analyze", "construct", "bound", "search"]},
        "inputs": {"type": "object"},
        "outputs": {"type": "object"},
        "wall_time": {"type": "number", "minimum": 0},
        "version": {"type": "string"},
        "exit_code": {"enum": [EXIT_OK, EXIT_VIOLATION, EXIT_INCOMPLETE, EXIT_INPUT]},
    },
    "additionalProperties": False,
}


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _theta(text: str) -> Theta:
    try:
        return Theta.parse(text)
    except FamilyError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _budget(text: str) -> int:
    """Accepts 1000000, 10^6 or 1e6."""
    t = text.strip().lower()
    try:
        if "^" in t:
            base, exp = t.split("^")
            value = int(base) ** int(exp)
        elif "e" in t:
            mant, exp = t.split("e")
            value = int(mant) * 10 ** int(exp)
        else:
            value = int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad budget {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("budget must be positive")
    return value


def _layers(text: str) -> list[LayerSpec]:
    """'3:max,6:2' -> [LayerSpec(3, 'max'), LayerSpec(6, 2)]"""
    out = []
    for part in text.split(","):
        size, _, count = part.partition(":")
        try:
            out.append(LayerSpec(int(size), "max" if count in ("", "max") else int(count)))
        except (ValueError, ConstructionError) as exc:
            raise argparse.ArgumentTypeError(f"bad layer {part!r}: {exc}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fifam", description="Closed theta-intersecting set families.")
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    for parser, default in ((p, None), (common, argparse.SUPPRESS)):
        parser.add_argument("--format", choices=["text", "structured"],
                            default="text" if default is None else default,
                            help="report style on stdout (and family encoding for construct)")
        parser.add_argument("--out", default=default,
                            help="write the report (construct: the family) to this file")
        parser.add_argument("-v", "--verbose", action="store_true",
                            default=False if default is None else default)
    p.add_argument("--version", action="version", version=f"fifam {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    v = add("verify", "check the r-closed property")
    v.add_argument("path")
    v.add_argument("--r", type=int, help="override the closure order in the file")
    v.add_argument("--theta", type=_theta, help="override theta in the file")
    v.add_argument("--min-set-size", type=int, default=1)

    a = add("analyze", "structural decomposition and lemma audit")
    a.add_argument("path")
    a.add_argument("--r", type=int, help="closure order to verify first (default max(file r, 3))")

    c = add("construct", "emit a generated family")
    c.add_argument("generator", choices=["bisection-max", "hadamard", "layered", "two-layer",
                                         "three-layer", "imin", "chain"])
    c.add_argument("--n", type=int)
    c.add_argument("--m", type=int, help="Hadamard order")
    c.add_argument("--k", type=int, help="smallest layer size for imin")
    c.add_argument("--theta", type=_theta, default=Theta(1, 2))
    c.add_argument("--r", type=int, default=3)
    c.add_argument("--layers", type=_layers, help="layered: e.g. 3:max or 2:2,4:1")

    b = add("bound", "evaluate the closed-form upper bounds")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--theta", type=_theta, required=True)
    b.add_argument("--r", type=int, default=3)
    b.add_argument("--has-size-two-set", choices=["yes", "no", "unknown"], default="unknown")

    s = add("search", "exhaustive search for maximum families")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--theta", type=_theta, default=Theta(1, 2))
    s.add_argument("--r", type=int, default=3)
    s.add_argument("--min-set-size", type=int, default=1)
    s.add_argument("--enumerate", action="store_true", help="collect every isomorphism class")
    s.add_argument("--chain", action="store_true", help="restrict to distinct set sizes")
    s.add_argument("--budget", type=_budget, help="node budget, e.g. 10^7")
    s.add_argument("--assume-paper-bounds", action="store_true",
                   help="stop once the known upper bound is reached")
    s.add_argument("--no-isomorph-reduction", action="store_true")
    s.add_argument("--width", type=int, default=1, help="worker processes (capped by FIFAM_THREADS)")
    return p


# ---------------------------------------------------------------------------
# subcommands: each returns (exit code, outputs dict, human text)

def _load(path: str) -> Family:
    try:
        return read_family(path)
    except FamilyError as exc:
        raise InputError(str(exc)) from None


def cmd_verify(args) -> tuple[int, dict, str]:
    F = _load(args.path)
    if args.theta is not None:
        F = Family(F.n, F.r, args.theta, F.sets)
    r = args.r if args.r is not None else F.r
    if r < 2:
        raise InputError("r must be at least 2")
    v = is_r_closed(F, r, min_set_size=args.min_set_size)
    out = {"ok": v.ok, "r": r, "theta": str(F.theta), "sets": len(F), "reason": v.reason,
           "witness": None if v.ok else [i + 1 for i in v.witness],
           "witness_sets": None if v.ok else [elements(F.sets[i]) for i in v.witness],
           "cardinality": v.cardinality}
    text = f"{len(F)} sets, r={r}, theta={F.theta}: " + ("ok" if v.ok else v.describe(F))
    return (EXIT_OK if v.ok else EXIT_VIOLATION), out, text


def cmd_analyze(args) -> tuple[int, dict, str]:
    F = _load(args.path)
    r = max(F.r, 3) if args.r is None else args.r
    try:
        rep = classify(F, r)
    except StructureError as exc:
        v = is_r_closed(F, max(r, 2))
        return EXIT_VIOLATION, {"refused": str(exc), "verdict": {
            "ok": v.ok, "witness": None if v.ok else [i + 1 for i in v.witness]}}, f"refused: {exc}"
    lp = partition_levels(F, r)
    au = audit(F, r)
    out = {"structure": rep.to_dict(), "levels": lp.to_dict(), "audit": au.to_dict()}

    def name(i):
        return "-" if i is None else f"#{i + 1} {fmt_set(F.sets[i])}"

    lines = [
        f"S      {list(rep.S)}",
        f"S_nor  {list(rep.S_nor)}",
        f"S_exc  {list(rep.S_exc)}",
        f"i_min  {rep.i_min}    i_max  {rep.i_max if rep.i_max is not None else '-'}",
    ]
    for i, core in sorted(rep.core_by_size.items()):
        lines.append(f"core({i:>3})  {fmt_set(core)}")
    lines += [f"E_nor  {name(rep.E_nor)}", f"E_exc  {name(rep.E_exc)}", f"E_theta {name(rep.E_theta)}",
              f"|F| = {len(F)}, |F*| = {len(rep.F_star)}", f"C = {fmt_set(lp.C)}"]
    for lv in lp.levels:
        iv = lv.to_dict()["interval"]
        lines.append(f"I_{lv.k:<2} {iv:<16} sizes {list(lv.sizes)!s:<12} |Y| = {lv.Y.bit_count()}")
    for chk in au.checks:
        lines.append(f"{'PASS' if chk.passed else 'FAIL'}  {chk.name}" + (f"  ({chk.witness})" if chk.witness else ""))
    return (EXIT_OK if au.ok else EXIT_VIOLATION), out, "\n".join(lines)


def _need(args, *names):
    for nm in names:
        if getattr(args, nm) is None:
            raise InputError(f"{args.generator} needs --{nm}")


def cmd_construct(args) -> tuple[int, dict, str, Family]:
    g = args.generator
    try:
        if g == "bisection-max":
            _need(args, "n")
            F = bisection_max(args.n, r=args.r)
        elif g == "hadamard":
            _need(args, "m")
            F = hadamard_family(args.m)
        elif g == "layered":
            _need(args, "n", "layers")
            F = layered_sunflower(args.n, args.theta, args.layers, r=args.r)
        elif g == "two-layer":
            _need(args, "n")
            F = two_layer_shared(args.n, args.theta, r=args.r)
        elif g == "three-layer":
            _need(args, "n")
            F = three_layer(args.n, args.theta, r=args.r)
        elif g == "imin":
            _need(args, "n", "k")
            F = imin_constrained(args.n, args.k, r=args.r)
        else:
            _need(args, "n")
            F = chain_family(args.n, args.theta, r=args.r)
    except FamilyError as exc:
        raise InputError(str(exc)) from None
    v = is_r_closed(F)
    if not v.ok:  # generators verify themselves; this guards the written file
        return EXIT_VIOLATION, {"verdict": v.describe(F)}, f"refusing to write: {v.describe(F)}", F
    out = {"family": to_json_obj(F), "sets": len(F), "verified_r": F.r}
    return EXIT_OK, out, f"{g}: {len(F)} sets over [{F.n}], verified {F.r}-closed", F


def cmd_bound(args) -> tuple[int, dict, str]:
    n, theta = args.n, args.theta
    if n < 1:
        raise InputError("n must be positive")
    if args.r < 2:
        raise InputError("r must be at least 2")
    flags = {"yes": [True], "no": [False], "unknown": [True, False]}[args.has_size_two_set]
    reports = {}
    for has_two in flags:
        rep = main_upper_bound(n, theta, has_two)
        reports.setdefault(rep.case_label, rep)
    out = {"main": [rep.to_dict() for rep in reports.values()]}
    lines = [f"case {rep.case_label}: {rep.expression} = {rep.value_exact:.6f} -> {rep.value_floored}"
             if isinstance(rep.value_exact, float) else
             f"case {rep.case_label}: {rep.expression} = {rep.value_exact}" for rep in reports.values()]
    if n >= theta.a:
        out["tor_full"] = tor_full_bound(n, theta)
        lines.append(f"tor-full layer bound: {out['tor_full']}")
    if theta == Theta(1, 2) and n >= 2:
        out["bisection"] = bisection_bound(n)
        lines.insert(0, f"bisection bound floor(3n/2) - 2 = {out['bisection']}")
    if args.r == 2:
        lines.append("note: the bounds above are proved for r >= 3")
    out["value"] = out.get("bisection", min(rep.value_floored for rep in reports.values()))
    return EXIT_OK, out, "\n".join(lines)


def cmd_search(args) -> tuple[int, dict, str]:
    if args.n < 1 or args.r < 2 or args.min_set_size < 1 or args.width < 1:
        raise InputError("n, width and min-set-size must be positive and r at least 2")
    opts = SearchOptions(
        min_set_size=args.min_set_size,
        isomorph_reduction=not args.no_isomorph_reduction,
        node_budget=args.budget,
        parallel_width=args.width,
        assume_paper_bounds=args.assume_paper_bounds,
    )
    try:
        if args.chain:
            res = chain_search(args.n, args.theta, args.r, opts)
        elif args.enumerate:
            res = enumerate_maximum_families(args.n, args.theta, args.r, opts)
        else:
            res = max_family_search(args.n, args.theta, args.r, opts)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    except CanonicalizationIncomplete as exc:
        return EXIT_INCOMPLETE, {"error": str(exc)}, str(exc)
    out = res.to_dict()
    lines = [
        f"max size   {res.max_size}",
        f"complete   {res.complete}",
        f"nodes      {res.nodes_explored}",
        f"classes    {len(res.witnesses)}",
    ]
    for i, W in enumerate(res.witnesses, start=1):
        lines.append(f"  [{i}] " + " ".join(fmt_set(s) for s in W.sets))
    return (EXIT_OK if res.complete else EXIT_INCOMPLETE), out, "\n".join(lines)


def _inputs(args) -> dict:
    skip = {"format", "out", "verbose", "command"}
    out = {}
    for k, val in vars(args).items():
        if k in skip:
            continue
        if isinstance(val, Theta):
            val = str(val)
        elif isinstance(val, list):
            val = [f"{x.size}:{x.count}" if isinstance(x, LayerSpec) else x for x in val]
        out[k] = val
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    family = None
    try:
        if args.command == "construct":
            code, outputs, text, family = cmd_construct(args)
        else:
            handler = {"verify": cmd_verify, "analyze": cmd_analyze,
                       "bound": cmd_bound, "search": cmd_search}[args.command]
            code, outputs, text = handler(args)
    except InputError as exc:
        code, outputs, text = EXIT_INPUT, {"error": str(exc)}, f"error: {exc}"
    report = {
        "subcommand": args.command,
        "inputs": _inputs(args),
        "outputs": outputs,
        "wall_time": round(time.perf_counter() - t0, 6),
        "version": __version__,
        "exit_code": code,
    }
    structured = args.format == "structured"
    rendered = json.dumps(report, indent=2) if structured else text
    if args.command == "construct" and family is not None and code == EXIT_OK and args.out:
        Path(args.out).write_text(dumps_json(family) + "\n" if structured else dumps_text(family))
        print(rendered)
    elif args.command == "construct" and family is not None and code == EXIT_OK and not structured:
        print(dumps_text(family), end="")
    elif args.out:
        Path(args.out).write_text(json.dumps(report, indent=2) + "\n" if structured else text + "\n")
        print(rendered)
    else:
        print(rendered)
    return code


if __name__ == "__main__":
    sys.exit(main())
