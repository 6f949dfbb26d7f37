"""Command-line front end: load a scenario file, run one command, print a report.

Exit status is 0 when the command passes (valid, coherent, complete, a path
exists), 1 when it fails (the report then lists witnesses), 2 on usage or
parse errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from .extension import (
    ExtensionError,
    IncoherenceReport,
    explicitate,
    find_path,
    project,
)
from .logic.formula import FormulaError, check_law_of_inference, parse_argument
from .logic.properties import (
    PropertyError,
    check_coherence,
    check_completeness,
    check_faithfulness,
    check_s_completeness,
)
from .presence import Display, unify_displays
from .report import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, Report
from .scenario import ScenarioError, format_patch, load_scenario
from .universe import Region
from .web import WebError

PROPERTIES = ("validity", "coherence", "faithfulness", "completeness", "s-completeness")


class UsageError(Exception):
    pass


# -- formatting helpers --------------------------------------------------------------


def _valuation(world: dict) -> str:
    return ",".join(f"{k}={'1' if v else '0'}" for k, v in world.items())


def _incoherence(report: IncoherenceReport) -> list[str]:
    head = f"{report.kind} {report.reason}"
    if report.alternatives:
        head += " alternatives=" + ",".join(f"{u}:{t}" for u, t in report.alternatives)
    if report.reason == "conflict":
        return [
            f"{head} at {c.world or 'reference'}:{c.x},{c.y} {c.attr}={c.left}|{c.right} "
            f"sources={','.join(report.cause)}"
            for c in report.cells
        ]
    return [f"{head} through {' -> '.join(report.cycle)}"]


def _display_lines(display: Display) -> list[str]:
    lines = []
    for (layer, x, y), cell in sorted(display.cells.items(), key=lambda kv: (kv[0][0], kv[0][2], kv[0][1])):
        parts = [f"{a}={v}" for a, v in cell.content]
        parts += [f"token={t}" for t in sorted(cell.tokens)]
        if parts:
            lines.append(f"{layer or 'reference'}:{x},{y} " + " ".join(parts))
    return lines


def _parse_region(text: str) -> Region:
    try:
        x, y, w, h = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"region must be X,Y,W,H, got {text!r}") from None
    return Region(x, y, w, h)


def _parse_stride(text: str | None):
    if text is None:
        return None
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"stride must be WxH, got {text!r}") from None
    return (w, h)


def _figure(args, name: str) -> str | None:
    if not args.figures:
        return None
    return os.path.join(args.figures, name)


def _load(args):
    if args.file is None:
        raise UsageError("a scenario FILE is required")
    return load_scenario(args.file)


def _system(scenario):
    if scenario.system is None:
        raise UsageError("the scenario declares no WINDOW, so it has no representational system")
    return scenario.system


# -- commands -------------------------------------------------------------------------


def cmd_validate(args, argv) -> Report:
    scenario = _load(args)
    return Report(argv, "valid", EXIT_PASS, details={"counts": scenario.counts()})


def cmd_check(args, argv) -> Report:
    return {
        "validity": _check_validity,
        "coherence": _check_coherence,
        "faithfulness": _check_property,
        "completeness": _check_property,
        "s-completeness": _check_property,
    }[args.property](args, argv)


def _check_validity(args, argv) -> Report:
    if args.argument:
        arguments = [("argument", args.argument)]
    else:
        scenario = _load(args)
        arguments = [(q.id, q.text) for q in scenario.queries
                     if q.kind == "validity" and (args.query is None or q.id == args.query)]
        if not arguments:
            raise UsageError("no validity query to check")
    witnesses, results, checked = [], {}, 0
    for qid, text in arguments:
        premises, conclusion = parse_argument(text)
        verdict = check_law_of_inference(premises, conclusion, workers=args.workers)
        checked += verdict.checked
        results[qid] = "valid" if verdict.valid else "invalid"
        if not verdict.valid:
            witnesses.append(f"{qid}: counterexample {_valuation(verdict.counterexample)}")
    ok = not witnesses
    return Report(argv, "valid" if ok else "invalid", EXIT_PASS if ok else EXIT_FAIL,
                  witnesses, {"results": results}, {"valuations": checked})


def _check_coherence(args, argv) -> Report:
    scenario = _load(args)
    system = _system(scenario)
    if args.fragment:
        fragments = [args.fragment]
    else:
        fragments = [q.text for q in scenario.queries if q.kind == "coherence"]
        fragments = fragments or sorted(system.situations)
    if not fragments:
        raise UsageError("nothing to check: no fragment, coherence query or situation")
    witnesses, results, unfolds = [], {}, 0
    for fragment in fragments:
        result = check_coherence(system, fragment, args.budget)
        if isinstance(result, IncoherenceReport):
            results[fragment] = result.kind
            witnesses.extend(f"{fragment}: {line}" for line in _incoherence(result))
        else:
            results[fragment] = "coherent"
            unfolds += len(result.unfolds)
    ok = not witnesses
    return Report(argv, "coherent" if ok else "incoherent", EXIT_PASS if ok else EXIT_FAIL,
                  witnesses, {"results": results},
                  {"fragments": len(fragments), "unfolds": unfolds})


def _check_property(args, argv) -> Report:
    scenario = _load(args)
    system = _system(scenario)
    if args.property == "faithfulness":
        report = check_faithfulness(system)
    else:
        fn = check_completeness if args.property == "completeness" else check_s_completeness
        report = fn(system, stride=_parse_stride(args.stride), budget=args.budget)
    words = {
        "faithfulness": ("faithful", "unfaithful"),
        "completeness": ("complete", "incomplete"),
        "s-completeness": ("s-complete", "s-incomplete"),
    }[args.property]
    details = {"skipped": list(report.skipped)} if report.skipped else {}
    return Report(argv, words[0] if report.verdict else words[1],
                  EXIT_PASS if report.verdict else EXIT_FAIL,
                  [str(w) for w in report.witnesses], details, {"checked": report.checked})


def cmd_navigate(args, argv) -> Report:
    scenario = _load(args)
    system = _system(scenario)
    path = find_path(system, args.start, args.goal)
    if path is None:
        return Report(argv, "no-path", EXIT_FAIL,
                      [f"no chain of links from {args.start} to {args.goal}"], {}, {"steps": 0})
    details = {
        "path": list(path.situations),
        "links": list(path.links),
        "flagged": path.flagged,
    }
    if path.ungrounded:
        details["ungrounded"] = list(path.ungrounded)
    target = _figure(args, "path.png")
    if target:
        from .plotting import render_display

        display = Display()
        for sid in path.situations:
            sit = system.situations[sid]
            merged = unify_displays(display, Display.from_patch(sit.patch, sit.anchor.offset))
            display = merged if isinstance(merged, Display) else display
        details["figures"] = [render_display(display, target, " -> ".join(path.situations))]
    return Report(argv, "path", EXIT_PASS, details=details, timing={"steps": len(path.links)})


def cmd_explicitate(args, argv) -> Report:
    scenario = _load(args)
    system = _system(scenario)
    result = explicitate(system, args.fragment, args.budget)
    if isinstance(result, IncoherenceReport):
        return Report(argv, result.kind, EXIT_FAIL, _incoherence(result), {"reason": result.reason})
    unfolds = []
    figures = []
    for i, unfold in enumerate(result):
        tag = ",".join(f"{u}:{t}" for u, t in unfold.alternatives) or "-"
        unfolds.append("\n".join([f"unfold {i} alternatives={tag}"] + _display_lines(unfold.display)))
        target = _figure(args, f"unfold-{i}.png")
        if target:
            from .plotting import render_display

            figures.append(render_display(unfold.display, target, f"{args.fragment} unfold {i}"))
    details = {"unfolds": unfolds}
    if figures:
        details["figures"] = figures
    cells = sum(len(u.display.cells) for u in result)
    return Report(argv, "coherent", EXIT_PASS, details=details,
                  timing={"unfolds": len(result), "cells": cells})


def cmd_project(args, argv) -> Report:
    scenario = _load(args)
    system = _system(scenario)
    region = _parse_region(args.region) if args.region else None
    patches = project(system, args.unit, region)
    shown, figures = [], []
    for i, patch in enumerate(patches):
        shown.append(format_patch(patch, f"{args.unit}.{i}").rstrip("\n"))
        target = _figure(args, f"{args.unit}-{i}.png")
        if target:
            from .plotting import render_patch

            figures.append(render_patch(patch, target, f"{args.unit} image {i}"))
    details = {"patches": shown}
    if figures:
        details["figures"] = figures
    return Report(argv, "projected", EXIT_PASS, details=details, timing={"patches": len(patches)})


# -- argument parsing ------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", choices=("text", "json"), default=argparse.SUPPRESS,
                        help="report format (default: text)")
    common.add_argument("--figures", metavar="DIR", default=argparse.SUPPRESS,
                        help="also render PNG figures into DIR")
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS,
                        help="add wall-clock time to the report (breaks byte-identity)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="reprlogic", parents=[common],
        description="Check representational systems described in scenario files.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("validate", parents=[common], help="parse a scenario and print its counts")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("check", parents=[common], help="check one property")
    p.add_argument("property", choices=PROPERTIES)
    p.add_argument("file", nargs="?")
    p.add_argument("--fragment", help="coherence: situation, patch label or unit to explicitate")
    p.add_argument("--query", help="validity: only the query with this id")
    p.add_argument("--argument", help="validity: check this argument instead of the file's queries")
    p.add_argument("--stride", help="completeness: region stride WxH (default: the window)")
    p.add_argument("--budget", type=int, help="explicitation rounds (default: PRESENCE_BUDGET or 100)")
    p.add_argument("--workers", type=int, default=1, help="validity: threads for valuation enumeration")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("navigate", parents=[common], help="shortest chain of links between situations")
    p.add_argument("file")
    p.add_argument("start", metavar="FROM")
    p.add_argument("goal", metavar="TO")
    p.set_defaults(func=cmd_navigate)

    p = sub.add_parser("explicitate", parents=[common], help="replace every symbol by its content")
    p.add_argument("file")
    p.add_argument("fragment")
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_explicitate)

    p = sub.add_parser("project", parents=[common], help="display the images of a unit")
    p.add_argument("file")
    p.add_argument("unit")
    p.add_argument("--region", metavar="X,Y,W,H", help="request region for rule images")
    p.set_defaults(func=cmd_project)
    return parser


def run(argv: list[str]) -> tuple[Report, str]:
    """Parse ``argv`` and execute it; returns the report and its format."""
    args = build_parser().parse_args(argv)
    fmt = getattr(args, "report", "text")
    args.figures = getattr(args, "figures", None)
    timing = getattr(args, "timing", False)
    if getattr(args, "budget", None) is not None and args.budget < 1:
        return Report(argv, "error", EXIT_USAGE, details={"error": "budget must be >= 1"}), fmt
    started = time.perf_counter()
    try:
        report = args.func(args, argv)
    except ScenarioError as exc:
        return Report(argv, "error", EXIT_USAGE, details={"error": str(exc)}), fmt
    except (UsageError, FormulaError, ExtensionError, WebError, PropertyError, OSError) as exc:
        return Report(argv, "error", EXIT_USAGE, details={"error": str(exc)}), fmt
    if timing:
        report.timing["elapsed_ms"] = round((time.perf_counter() - started) * 1000, 3)
    return report, fmt


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    report, fmt = run(argv)
    out = report.render(fmt)
    if report.status == EXIT_USAGE:
        sys.stderr.write(f"error: {report.details.get('error', 'usage')}\n")
    sys.stdout.write(out)
    return report.status


if __name__ == "__main__":
    sys.exit(main())
