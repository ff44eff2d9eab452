"""Command-line surface: analyze scenario files or built-in examples.

Exit codes: 0 success, 1 ``--expect`` mismatch, 2 parse error, 3 resource
limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .contextuality import contextuality_report
from .errors import CtxkitError, ParseError, ResourceLimitError
from .examples import Example, example, example_names
from .inchworm import inchworm_entails, is_saturated, mm, ns_interior, spiral_demo
from .logic import constraint_formula, parse_formula
from .model import is_no_signalling, is_sheaf
from .scenariofile import parse_scenario, section_str
from .xor_avn import avn_certificate, extract_xor, global_consistency

SCHEMA_VERSION = 1


def emit_json(report: dict) -> bytes:
    payload = {"schema_version": SCHEMA_VERSION, **report}
    return (json.dumps(payload, indent=2, sort_keys=False) + "\n").encode()


def _sections_json(cplx, U, tuples):
    return sorted(section_str(cplx, U, t) for t in tuples)


def _ctx_json(cplx, U):
    return list(cplx.sort_vars(U))


def _model_json(model):
    cplx = model.cplx
    return {
        "+".join(_ctx_json(cplx, U)) or "(empty)": _sections_json(cplx, U, S)
        for U, S in model.items()
    }


def _load(args):
    """(Example-like object) from --example or a scenario file path."""
    if getattr(args, "example", None):
        return example(args.example)
    if not getattr(args, "file", None):
        raise ParseError("a scenario file or an example name is required")
    with open(args.file, encoding="utf-8") as fh:
        sf = parse_scenario(fh.read())
    return Example(sf.name, sf.cplx, sf.model, sf.theory)


def _model_of(obj, args):
    """The model under analysis: explicit sections, or the theory's
    pre-model (its no-signalling interior with --interior)."""
    if obj.model is not None:
        return obj.model
    if obj.theory is None:
        raise ParseError("this command needs sections or a theory")
    base = mm(obj.theory)
    if getattr(args, "interior", False):
        return ns_interior(base).model
    return base


def _finish(report, args, flags=None):
    lines = report.pop("text_lines", [])
    if args.json:
        sys.stdout.buffer.write(emit_json(report))
    else:
        for line in lines:
            print(line)
    expect = getattr(args, "expect", None)
    if expect and flags is not None:
        for want in expect.split(","):
            want = want.strip()
            invert = want.startswith("not-")
            key = want[4:] if invert else want
            key = key.replace("-", "_")
            if key not in flags:
                raise ParseError(f"unknown --expect flag {want!r}")
            if flags[key] == invert:
                return 1
    return 0


def cmd_check(obj, args):
    model = _model_of(obj, args)
    ns = is_no_signalling(model)
    sheaf = is_sheaf(model)
    cplx = model.cplx
    report = {
        "command": "check",
        "scenario": obj.name,
        "separated": True,  # enforced by construction
        "sheaf": sheaf,
        "no_signalling": ns.ok,
        "empty_model": model.is_empty,
        "witnesses": [
            {
                "context": _ctx_json(cplx, U),
                "larger_context": _ctx_json(cplx, V),
                "section": section_str(cplx, U, s.values),
            }
            for U, V, s in ns.witnesses
        ],
    }
    lines = [
        f"separated: true",
        f"sheaf: {str(sheaf).lower()}",
        f"no-signalling: {str(ns.ok).lower()}",
    ]
    for w in report["witnesses"]:
        lines.append(
            f"  witness: section {w['section']} over {{{' '.join(w['context'])}}}"
            f" has no extension in {{{' '.join(w['larger_context'])}}}"
        )
    report["text_lines"] = lines
    return _finish(report, args, flags={
        "separated": True,
        "sheaf": sheaf,
        "no_signalling": ns.ok,
    })


def cmd_contextuality(obj, args):
    model = _model_of(obj, args)
    cplx = model.cplx
    rep = contextuality_report(model)
    report = {
        "command": "contextuality",
        "scenario": obj.name,
        "logically_contextual": rep.logically_contextual,
        "strongly_contextual": rep.strongly_contextual,
        "empty_model": rep.empty_model,
        "global_section_count": len(rep.global_sections),
        "non_extending": {
            "+".join(_ctx_json(cplx, U)): [section_str(cplx, U, s.values) for s in ws]
            for U, ws in rep.non_extending.items()
        },
    }
    report["text_lines"] = [
        f"logically contextual: {str(rep.logically_contextual).lower()}",
        f"strongly contextual: {str(rep.strongly_contextual).lower()}",
        f"global sections: {len(rep.global_sections)}",
    ]
    return _finish(report, args, flags={
        "logically_contextual": rep.logically_contextual,
        "strongly_contextual": rep.strongly_contextual,
        "empty_model": rep.empty_model,
    })


def cmd_join(obj, args):
    model = _model_of(obj, args)
    cplx = model.cplx
    from .contextuality import global_sections

    sections = global_sections(model)
    strings = [section_str(cplx, frozenset(cplx.variables), g.values) for g in sections]
    report = {
        "command": "join",
        "scenario": obj.name,
        "variables": list(cplx.variables),
        "global_sections": strings,
        "text_lines": [f"global sections over ({' '.join(cplx.variables)}):"]
        + ([f"  {s}" for s in strings] if strings else ["  (none)"]),
    }
    return _finish(report, args, flags={"nonempty": bool(strings)})


def cmd_entail(obj, args):
    if obj.theory is None:
        raise ParseError("entail needs a theory")
    cplx = obj.theory.cplx
    goal = parse_formula(args.goal, cplx, obj.theory.sig)
    result = inchworm_entails(obj.theory, goal)
    report = {
        "command": "entail",
        "scenario": obj.name,
        "goal": args.goal,
        "entailed": result.holds,
    }
    lines = [f"entailed: {str(result.holds).lower()}"]
    if result.holds and args.trace:
        steps = []
        for st in result.trace.steps:
            steps.append({
                "context": _ctx_json(cplx, st.context),
                "constraint": _sections_json(cplx, st.context, st.constraint),
                "constraint_formula": constraint_formula(cplx, st.context, st.constraint),
                "premises": [list(p) for p in st.premises],
                "direction": st.direction,
            })
        report["trace"] = steps
        for i, s in enumerate(steps):
            lines.append(
                f"  step {i} [{s['direction']}] over {{{' '.join(s['context'])}}}: "
                f"{s['constraint_formula']}"
            )
    if not result.holds:
        report["countermodel"] = _model_json(result.countermodel)
        lines.append("countermodel (no-signalling interior of the theory's pre-model):")
        for key, secs in report["countermodel"].items():
            lines.append(f"  {key}: {' '.join(secs) or '(empty)'}")
    report["text_lines"] = lines
    return _finish(report, args, flags={"entailed": result.holds})


def cmd_interior(obj, args):
    if obj.theory is not None:
        base = mm(obj.theory)
    else:
        base = _model_of(obj, args)
    result = ns_interior(base)
    removed = len(result.removed)
    report = {
        "command": "interior",
        "scenario": obj.name,
        "iterations": result.iterations,
        "removed_sections": removed,
        "empty": result.model.is_empty,
        "interior": _model_json(result.model),
    }
    report["text_lines"] = [
        f"iterations: {result.iterations}",
        f"removed sections: {removed}",
        f"empty: {str(result.model.is_empty).lower()}",
    ] + [f"  {k}: {' '.join(v) or '(empty)'}" for k, v in report["interior"].items()]
    return _finish(report, args, flags={"empty": result.model.is_empty})


def cmd_saturated(obj, args):
    if obj.theory is None:
        raise ParseError("saturated needs a theory")
    sat = is_saturated(obj.theory)
    report = {
        "command": "saturated",
        "scenario": obj.name,
        "saturated": sat,
        "text_lines": [f"saturated: {str(sat).lower()}"],
    }
    return _finish(report, args, flags={"saturated": sat})


def cmd_avn(obj, args):
    if obj.theory is None:
        raise ParseError("avn needs a theory")
    system, skipped = extract_xor(obj.theory)
    cert = avn_certificate(system)
    consistent, witness = global_consistency(obj.theory)
    report = {
        "command": "avn",
        "scenario": obj.name,
        "xor_equations": [
            {"vars": sorted(eq.vars), "rhs": eq.rhs} for eq in system
        ],
        "skipped_formulas": skipped,
        "certificate": list(cert.equations) if cert else None,
        "globally_consistent": consistent,
    }
    lines = [f"xor equations: {len(system)} (skipped {len(skipped)} non-xor formulas)"]
    if cert:
        rendered = " (+) ".join(f"eq{i}" for i in cert.equations)
        lines.append(f"certificate: {rendered} gives 0 = 1")
    else:
        lines.append("certificate: none (system satisfiable over GF(2))")
    lines.append(f"globally consistent: {str(consistent).lower()}")
    report["text_lines"] = lines
    return _finish(report, args, flags={
        "certified_inconsistent": cert is not None,
        "globally_consistent": consistent,
    })


def cmd_spiral(obj, args):
    rep = spiral_demo(args.k)
    report = {
        "command": "spiral",
        "k": rep.k,
        "interior_empty": rep.interior_empty,
        "iterations": rep.iterations,
        "text_lines": [
            f"k: {rep.k}",
            f"interior empty: {str(rep.interior_empty).lower()}",
            f"iterations: {rep.iterations}",
        ],
    }
    return _finish(report, args, flags={"interior_empty": rep.interior_empty})


_COMMANDS = {
    "check": cmd_check,
    "contextuality": cmd_contextuality,
    "join": cmd_join,
    "entail": cmd_entail,
    "interior": cmd_interior,
    "saturated": cmd_saturated,
    "avn": cmd_avn,
    "spiral": cmd_spiral,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ctxkit",
        description="Contextuality analysis over finite measurement scenarios.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_file=True):
        if needs_file:
            p.add_argument("file", nargs="?", help="scenario file")
        p.add_argument("--example", help=f"built-in example ({', '.join(example_names())})")
        p.add_argument("--json", action="store_true", help="JSON output")
        p.add_argument("--expect", help="comma-separated flags; exit 1 on mismatch")
        p.add_argument("--interior", action="store_true",
                       help="analyze the no-signalling interior of a theory's pre-model")

    for name in ("check", "contextuality", "join", "interior", "saturated", "avn"):
        common(sub.add_parser(name))
    p = sub.add_parser("entail")
    common(p)
    p.add_argument("--goal", required=True, help="goal formula")
    p.add_argument("--trace", action="store_true", help="print the derivation trace")
    p = sub.add_parser("spiral")
    common(p, needs_file=False)
    p.add_argument("--k", type=int, required=True, help="domain size")
    p = sub.add_parser("example")
    p.add_argument("name", help="example name")
    p.add_argument("rest", nargs=argparse.REMAINDER, help="command to run on the example")
    return parser


def run_command(argv) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "example":
        if not args.rest:
            raise ParseError("example needs a command, e.g. 'example pr_box check'")
        inner = [args.rest[0], "--example", args.name] + args.rest[1:]
        return run_command(inner)
    if args.command == "spiral":
        return cmd_spiral(None, args)
    obj = _load(args)
    return _COMMANDS[args.command](obj, args)


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        return run_command(argv)
    except ResourceLimitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (ParseError, CtxkitError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
