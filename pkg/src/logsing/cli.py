"""Command line front end.

    logsing analyze  INPUT [flags]     weights, exponents, assumption report
    logsing solve    INPUT [flags]     construct the series to a given order
    logsing verify   INPUT [flags]     solve plus the residual certificate
    logsing majorant INPUT [flags]     solve plus a convergence certificate
    logsing examples                   list the built-in equations

INPUT is a file path, ``-`` for stdin, or the equation itself inline.  Input
files may precede the equation with ``name = value`` lines (order, max_deg,
root_index, b, resonance_policy, n, mode, lead, resonance[rho]); explicit
flags override them.  By default everything runs in-process; ``--server URL``
sends the run to a service instance instead.

Exit codes: 0 success, 2 unreadable input, 3 equation outside the handled
regime, 4 unusable leading root, 5 resonance (under the error policy or with
missing/incompatible data), 6 certification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import pipeline
from .errors import ConfigurationError, LogsingError

EXIT_CODES = {
    "parse": 2,
    "config": 2,
    "assumptions": 3,
    "degenerate-root": 4,
    "resonance": 5,
    "inconsistent-system": 5,
    "certification": 6,
    "internal": 1,
}

RUN_COMMANDS = ("analyze", "solve", "verify", "majorant")


def _add_common(sp, with_input=True):
    if with_input:
        sp.add_argument("input", nargs="?",
                        help="input file, '-' for stdin, or an inline equation")
        sp.add_argument("--example", metavar="NAME",
                        help="run a built-in example (see 'logsing examples')")
        sp.add_argument("--order", type=int, metavar="K",
                        help="target t-order (default 12)")
        sp.add_argument("--max-deg", dest="max_deg", type=int, metavar="D",
                        help="x-degree truncation (default 8)")
        sp.add_argument("--root-index", dest="root_index", type=int,
                        metavar="I", help="leading root to follow (default 0)")
        sp.add_argument("--b", metavar="POLY",
                        help="companion coefficient b(x) (default 0)")
        sp.add_argument("--resonance", dest="resonance_policy",
                        choices=("error", "frobenius"),
                        help="on resonance: abort or raise the log degree")
        sp.add_argument("--n", type=int, metavar="N",
                        help="number of space variables (default: inferred)")
    sp.add_argument("--format", choices=("human", "structured"),
                    default="human", help="output rendering (default human)")
    sp.add_argument("--out", metavar="PATH", help="write output to a file")
    sp.add_argument("--server", metavar="URL",
                    help="run on a service instance instead of in-process")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="logsing",
        description="construct and certify log-singular series solutions "
                    "of time-singular PDE initial behavior")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "analyze": "report weights, characteristic exponent and assumptions",
        "solve": "construct the series solution order by order",
        "verify": "solve and certify the residual order",
        "majorant": "solve and derive a convergence certificate",
    }
    for name in RUN_COMMANDS:
        _add_common(sub.add_parser(name, help=helps[name]))
    _add_common(sub.add_parser("examples", help="list built-in equations"),
                with_input=False)
    return p


def read_input(args) -> str:
    if getattr(args, "example", None):
        return pipeline.example_input_text(args.example)
    if not args.input:
        raise ConfigurationError(
            "no input: pass a file, '-' or an inline equation")
    if args.input == "-":
        return sys.stdin.read()
    path = Path(args.input)
    if path.exists():
        return path.read_text()
    return args.input


def overrides_from(args) -> dict:
    return {
        "order": args.order,
        "max_deg": args.max_deg,
        "root_index": args.root_index,
        "b_source": args.b,
        "resonance_policy": args.resonance_policy,
        "n": args.n,
    }


def run_local(args) -> dict:
    if args.command == "examples":
        return pipeline.cmd_examples()
    text = read_input(args)
    overrides = overrides_from(args)
    runner = {
        "analyze": pipeline.cmd_analyze,
        "solve": pipeline.cmd_solve,
        "verify": pipeline.cmd_verify,
        "majorant": pipeline.cmd_majorant,
    }[args.command]
    return runner(text, overrides)


def run_remote(args):
    import httpx

    base = args.server.rstrip("/")
    if args.command == "examples":
        resp = httpx.get(f"{base}/examples", timeout=300)
    else:
        if getattr(args, "example", None):
            payload = {"example": args.example}
        else:
            payload = {"input": read_input(args)}
        for key, value in overrides_from(args).items():
            if value is not None:
                payload["b" if key == "b_source" else key] = value
        resp = httpx.post(f"{base}/{args.command}", json=payload, timeout=300)
    doc = resp.json()
    if resp.status_code != 200 or "error" in doc:
        err = doc.get("error", {})
        kind = err.get("kind", "internal")
        message = err.get("message", f"server returned {resp.status_code}")
        sys.stderr.write(f"error ({kind}): {message}\n")
        return None, EXIT_CODES.get(kind, 1)
    return doc, 0


def emit(doc: dict, args) -> None:
    if args.format == "structured":
        text = pipeline.to_json(doc)
    else:
        text = pipeline.render_human(doc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.server:
            doc, code = run_remote(args)
            if doc is None:
                return code
        else:
            doc = run_local(args)
    except LogsingError as exc:
        sys.stderr.write(f"error ({exc.kind}): {exc}\n")
        return EXIT_CODES.get(exc.kind, 1)
    emit(doc, args)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
