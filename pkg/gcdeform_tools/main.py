#!/usr/bin/env python3
"""
gcdeform command-line entry point.

    python -m gcdeform_tools.main <group> <command> --input FILE [--output json|table] [--deg D] [--k K]
    python -m gcdeform_tools.main selftest [--quick]

Exit codes: 0 success, 1 checked-false (the report carries the witness),
2 input error. Every invocation appends one line to <GCDEFORM_LOG_DIR>/audit.log.
"""

import argparse
import json
import logging
import sys
import time
from contextlib import suppress
from typing import List, Optional

from gcdeform import config
from gcdeform.errors import DomainError, GCDeformError, SchemaError

from .commands import COMMANDS, run_selftest
from .model_loader import load_model
from .report import render

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
EXIT_INPUT = 2
GROUPS = sorted({group for group, _ in COMMANDS} | {"selftest"})


def _audit(kind: str, **fields):
    """Append one JSON line to the audit log; owner-only permissions, never fatal."""
    try:
        target = config.log_dir()
        target.mkdir(mode=0o700, parents=True, exist_ok=True)
        with suppress(OSError):
            target.chmod(0o700)
        audit_file = target / "audit.log"
        fresh = not audit_file.exists()
        with audit_file.open("a", encoding="utf-8") as out:
            out.write(json.dumps({"ts": time.time(), "type": kind, **fields}, sort_keys=True) + "\n")
        if fresh:
            with suppress(OSError):
                audit_file.chmod(0o600)
    except Exception:
        logger.debug("audit log not written", exc_info=True)


def setup_logging():
    root = logging.getLogger()
    try:
        level = config.log_level()
    except GCDeformError as exc:
        level = logging.WARNING
        print(f"warning: {exc}", file=sys.stderr)
    root.setLevel(level)
    if not any(getattr(h, "_gcdeform", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._gcdeform = True
        root.addHandler(handler)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gcdeform",
                                     description="Exact deformation calculus for generalized complex branes.")
    parser.add_argument("group", choices=GROUPS)
    parser.add_argument("command", nargs="?", default=None)
    parser.add_argument("--input", help="JSON model file")
    parser.add_argument("--output", choices=("json", "table"), default=None,
                        help="report format (json by default, table for selftest)")
    parser.add_argument("--deg", type=int, default=None, help="polynomial degree bound D")
    parser.add_argument("--k", type=int, default=None, help="cohomological degree")
    parser.add_argument("--filtration", choices=("stable", "naive"), default="stable")
    parser.add_argument("--quick", action="store_true", help="selftest with reduced sample counts")
    return parser


def _validate(args):
    if args.group == "selftest":
        if args.command is not None:
            raise DomainError("selftest takes no subcommand")
        return
    known = sorted(cmd for group, cmd in COMMANDS if group == args.group)
    if args.command not in known:
        raise DomainError(f"unknown command {args.group} {args.command or ''}; expected one of {', '.join(known)}")
    if not args.input:
        raise DomainError("--input is required")
    if args.deg is not None and not 0 <= args.deg <= config.max_degree():
        raise DomainError(f"--deg must lie in 0..{config.max_degree()}")
    if args.k is not None and args.k < 0:
        raise DomainError("--k must be non-negative")


def _error_payload(exc: GCDeformError) -> dict:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, SchemaError):
        payload["path"] = exc.path
        payload["message"] = exc.reason
    simplex = getattr(exc, "simplex", None)
    if simplex is not None:
        payload["simplex"] = list(simplex)
    return payload


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging()
    args = build_parser().parse_args(argv)
    name = args.group if args.command is None else f"{args.group} {args.command}"
    digest = None
    try:
        _validate(args)
        if args.group == "selftest":
            code, payload = run_selftest(args.quick)
        else:
            model = load_model(args.input)
            digest = model.sha256
            code, payload = COMMANDS[(args.group, args.command)](model, args)
    except GCDeformError as exc:
        logger.debug("input error in %s", name, exc_info=True)
        code, payload = EXIT_INPUT, _error_payload(exc)
    except OSError as exc:
        code, payload = EXIT_INPUT, {"error": type(exc).__name__, "message": str(exc)}
    output = args.output or ("table" if args.group == "selftest" else "json")
    print(render(payload, output))
    _audit("command", command=name, input_sha256=digest, exit=code)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
