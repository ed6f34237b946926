"""``relcheck`` command line.

Exit codes: ``check`` exits 0 when access is granted, 1 when denied and 2 on
any error.  ``validate`` and ``parse`` exit 1 on violations/diagnostics and
2 when the input cannot be read.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import oracle
from .checker import EvaluationError, audience, evaluate_access, explain
from .model import ModelError, load_model, materialize_reverse, parse_document, validate
from .parser import PolicySyntaxError, parse, pretty_print
from .scenarios import fixture_bytes
from .syntax import to_json
from .transform import desugar


class UsageError(Exception):
    pass


def _color(text: str, code: str) -> str:
    if os.environ.get("RELCHECK_COLOR") == "1":
        return f"\033[{code}m{text}\033[0m"
    return text


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _policy_text(arg: str) -> str:
    # inline policies start with '@'; anything else names a file
    if arg.lstrip().startswith("@"):
        return arg
    return _read_text(arg)


def _load(path: str):
    with open(path, "rb") as fh:
        return load_model(fh.read())


def _err(msg: str) -> None:
    print(f"relcheck: {msg}", file=sys.stderr)


def cmd_validate(args) -> int:
    try:
        with open(args.model, "rb") as fh:
            raw = fh.read()
        m = parse_document(raw)
    except OSError as exc:
        _err(f"cannot read {args.model}: {exc.strerror}")
        return 2
    except ModelError as exc:
        _err(str(exc))
        return 2
    problems = validate(materialize_reverse(m))
    if args.format == "json":
        print(json.dumps([{"code": v.code, "element": v.element} for v in problems], indent=2))
    else:
        for v in problems:
            print(v)
        if not problems:
            print("ok")
    return 1 if problems else 0


def cmd_parse(args) -> int:
    try:
        text = _policy_text(args.policy)
    except OSError as exc:
        _err(f"cannot read {args.policy}: {exc.strerror}")
        return 2
    try:
        f = parse(text)
    except PolicySyntaxError as exc:
        _err(f"syntax error at {exc}")
        return 1
    if args.desugar or args.expand_cat:
        model = None
        if args.expand_cat:
            if not args.model:
                _err("--expand-cat needs a model (-m)")
                return 2
            try:
                model = _load(args.model)
            except (OSError, ModelError) as exc:
                _err(str(exc))
                return 2
        try:
            f = desugar(f, model, expand_cat=args.expand_cat)
        except ModelError as exc:
            _err(str(exc))
            return 2
    if args.format == "json":
        print(json.dumps({"policy": pretty_print(f), "ast": to_json(f)}, indent=2))
    else:
        print(pretty_print(f))
    return 0


def _prepare(args):
    m = _load(args.model)
    try:
        policy = parse(_policy_text(args.policy))
    except PolicySyntaxError as exc:
        raise UsageError(f"syntax error at {exc}") from None
    if args.expand_cat:
        policy = desugar(policy, m, expand_cat=True)
    return m, policy


def cmd_check(args) -> int:
    m, policy = _prepare(args)
    decision = explain(m, policy, args.own, args.req) if args.trace else \
        evaluate_access(m, policy, args.own, args.req)
    if args.oracle:
        expected = oracle.naive_check(m, policy, {"own": args.own, "req": args.req}, args.own)
        if expected != decision.granted:
            _err(f"oracle mismatch: checker says {decision.granted}, naive evaluation says {expected}")
            return 2
    if args.format == "json":
        out = {"granted": decision.granted, "owner": args.own, "requester": args.req}
        if args.trace:
            out["witness"] = None if decision.witness is None else [
                {"path": s.path, "op": s.op, "source": s.source, "targets": list(s.targets),
                 "via": s.via} for s in decision.witness]
        print(json.dumps(out, indent=2))
    else:
        print(_color("GRANTED", "32") if decision.granted else _color("DENIED", "31"))
        for step in decision.witness or ():
            print(f"  {step}")
    return 0 if decision.granted else 1


def cmd_audience(args) -> int:
    m, policy = _prepare(args)
    users = sorted(audience(m, policy, args.own))
    if args.oracle:
        naive = sorted(u for u in m.users
                       if oracle.naive_check(m, policy, {"own": args.own, "req": u}, args.own))
        if naive != users:
            _err(f"oracle mismatch: checker {users}, naive evaluation {naive}")
            return 2
    if args.format == "json":
        print(json.dumps(users))
    else:
        for u in users:
            print(u)
    return 0


def cmd_fixture(args) -> int:
    sys.stdout.flush()
    sys.stdout.buffer.write(fixture_bytes())
    sys.stdout.buffer.flush()
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="relcheck",
                                 description="Evaluate social-network access-control policies.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model file against the model invariants")
    p.add_argument("model")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("parse", help="parse a policy and print it in normal form")
    p.add_argument("policy", help="policy file, '-' for stdin, or inline text starting with '@'")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--desugar", action="store_true", help="rewrite pub[q]/usr[p] filters")
    p.add_argument("--expand-cat", action="store_true",
                   help="also expand category nominals (needs -m)")
    p.add_argument("-m", "--model")
    p.set_defaults(func=cmd_parse)

    for name, func, helptext in (("check", cmd_check, "decide one access request"),
                                 ("audience", cmd_audience, "list every requester granted access")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("-m", "--model", required=True)
        p.add_argument("-p", "--policy", required=True,
                       help="policy file, '-' for stdin, or inline text starting with '@'")
        p.add_argument("--own", required=True, help="owner id")
        if name == "check":
            p.add_argument("--req", required=True, help="requester id")
            p.add_argument("--trace", action="store_true", help="print a witness when granted")
        p.add_argument("--oracle", action="store_true",
                       help="re-verify with the naive evaluator; exit 2 on disagreement")
        p.add_argument("--expand-cat", action="store_true",
                       help="expand category nominals before evaluating")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.set_defaults(func=func)

    p = sub.add_parser("fixture", help="write the bundled fig1 model to stdout")
    p.set_defaults(func=cmd_fixture)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except OSError as exc:
        _err(f"{exc.filename or ''}: {exc.strerror}")
    except (UsageError, ModelError, EvaluationError) as exc:
        _err(str(exc))
    return 2
