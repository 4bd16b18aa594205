"""Command-line interface.

    fmcheck check MODEL.fm CONFIG.cfg    validity of a configuration
    fmcheck analyze MODEL.fm [--count]   void / dead / core / product count
    fmcheck configure MODEL.fm           interactive propagation session
    fmcheck encode MODEL.fm --pretty     conjunct list (--dimacs for CNF)
    fmcheck count MODEL.fm               number of valid products
    fmcheck enumerate MODEL.fm           list products
    fmcheck serve DIR --port N           JSON API over a model directory

Exit codes: 0 success / valid / satisfiable; 1 negative analysis result
(invalid, void, conflict); 2 usage or parse error; 3 size limit hit.

Configuration files hold one feature per line, `+id` to select and `-id` to
deselect; anything unlisted stays undecided. Output is deterministic:
identical inputs produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .analysis import (
    DEFAULT_COUNT_CAP,
    ModelTooLargeError,
    VoidModelError,
    analyze,
    check_full_configuration,
    count_cap_from_env,
    count_products,
    enumerate_products,
)
from .cnf import to_cnf, to_dimacs
from .dsl import ParseFailure, parse_model
from .logic import EncodedModel, encode_model, format_formula
from .model import (
    Configuration,
    ConflictReport,
    CrossTreeConstraint,
    Decision,
    FeatureModel,
    GroupRef,
    RootRef,
)
from .propagate import PropagationResult, propagate, reason_text
from .solve import SolverBackend, sat

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_TOO_LARGE = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _load_model(path: str) -> FeatureModel:
    try:
        source = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return parse_model(source, name_hint=Path(path).stem)
    except ParseFailure as failure:
        listing = "\n".join(f"{path}:{e.message}" for e in failure.errors)
        raise CliError(listing) from failure


def _load_config(path: str, model: FeatureModel) -> Configuration:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc
    decisions = {}
    errors = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sign, fid = line[0], line[1:].strip()
        if sign not in "+-" or not fid:
            errors.append(f"{path}:{lineno}: expected '+feature' or '-feature', found {raw.strip()!r}")
            continue
        if fid not in model.by_id:
            errors.append(f"{path}:{lineno}: unknown feature '{fid}'")
            continue
        decisions[fid] = Decision.SELECTED if sign == "+" else Decision.DESELECTED
    if errors:
        raise CliError("\n".join(errors))
    return Configuration(decisions)


def _fmt_value(value: bool) -> str:
    return "T" if value else "F"


def _conflict_lines(conflict: ConflictReport) -> list[str]:
    lines = [f"conflict on {conflict.conflicting_feature}:"]
    for step in conflict.cause_chain:
        sign = "+" if step.value else "-"
        lines.append(f"  {sign} {step.feature} ({reason_text(step.via)})")
    return lines


def _via_json(via) -> dict:
    if isinstance(via, RootRef):
        return {"type": "root", "root": via.root}
    if isinstance(via, GroupRef):
        return {"type": "group", "parent": via.parent, "kind": via.kind.keyword}
    if isinstance(via, CrossTreeConstraint):
        return {"type": "constraint", "kind": via.kind.value,
                "source": via.source, "target": via.target}
    raise TypeError(f"unexpected conjunct reference: {via!r}")


def conflict_json(conflict: ConflictReport) -> dict:
    return {
        "feature": conflict.conflicting_feature,
        "forced_value": conflict.forced_value,
        "chain": [
            {"feature": step.feature, "value": step.value,
             "via": _via_json(step.via), "text": reason_text(step.via)}
            for step in conflict.cause_chain
        ],
    }


# --- check -------------------------------------------------------------------

def cmd_check(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    encoded = encode_model(model)
    cfg = _load_config(args.config, model)

    result: PropagationResult | None = None
    if not cfg.is_full(model.feature_ids):
        result = propagate(encoded, cfg)
        if result.conflict is not None:
            return _emit_check(args, model, encoded, None, result)
        cfg = result.configuration.completed(model.feature_ids)
    check = check_full_configuration(encoded, cfg)
    return _emit_check(args, model, encoded, check, result)


def _emit_check(args, model, encoded: EncodedModel, check, result: PropagationResult | None) -> int:
    forced = list(result.derivations) if result is not None else []
    conflict = result.conflict if result is not None else None
    if args.json:
        payload = {
            "model": model.name,
            "valid": check.valid if check is not None else None,
            "conflict": conflict_json(conflict) if conflict else None,
            "forced": [
                {"feature": d.feature, "value": d.value, "reason": reason_text(d.via)}
                for d in forced
            ],
            "conjuncts": [
                {"label": c.conjunct.label,
                 "formula": format_formula(c.conjunct.formula, args.ascii),
                 "value": c.value}
                for c in (check.checks if check is not None else ())
            ],
        }
        print(json.dumps(payload, indent=2, ensure_ascii=args.ascii))
        return EXIT_OK if check is not None and check.valid else EXIT_NEGATIVE

    print(f"model {model.name}")
    if forced:
        print("forced decisions:")
        for d in forced:
            sign = "+" if d.value else "-"
            print(f"  {sign} {d.feature} ({reason_text(d.via)})")
    if conflict is not None:
        for line in _conflict_lines(conflict):
            print(line)
        print("result: CONFLICT")
        return EXIT_NEGATIVE
    assert check is not None
    print("conjuncts:")
    for c in check.checks:
        formula = format_formula(c.conjunct.formula, args.ascii)
        print(f"  {c.conjunct.label}: {formula} = {_fmt_value(c.value)}")
    print(f"result: {'VALID' if check.valid else 'INVALID'}")
    return EXIT_OK if check.valid else EXIT_NEGATIVE


# --- analyze -----------------------------------------------------------------

def cmd_analyze(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    encoded = encode_model(model)
    cap = count_cap_from_env(args.cap)
    try:
        report = analyze(encoded, backend=args.backend,
                         with_count=args.count, cap=cap)
    except ModelTooLargeError as exc:
        raise CliError(str(exc), EXIT_TOO_LARGE) from exc

    order = {fid: i for i, fid in enumerate(model.feature_ids)}
    dead = sorted(report.dead_features, key=order.__getitem__)
    core = sorted(report.core_features, key=order.__getitem__)
    if args.json:
        payload = {
            "model": model.name,
            "void": report.void,
            "dead": dead,
            "core": core,
            "product_count": report.product_count,
        }
        print(json.dumps(payload, indent=2, ensure_ascii=args.ascii))
    else:
        print(f"model {model.name}")
        print(f"void: {'true' if report.void else 'false'}")
        print(f"dead: {' '.join(dead) if dead else '(none)'}")
        print(f"core: {' '.join(core) if core else '(none)'}")
        if report.product_count is not None:
            print(f"products: {report.product_count}")
    return EXIT_NEGATIVE if report.void else EXIT_OK


# --- configure ---------------------------------------------------------------

def cmd_configure(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    encoded = encode_model(model)
    cfg = Configuration()

    for raw in sys.stdin:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "done":
            break
        if line == "?":
            result = propagate(encoded, cfg)
            _print_status(model, cfg, result)
            continue
        sign, fid = line[0], line[1:].strip()
        if sign not in "+-" or not fid:
            print(f"? unrecognized command {line!r} (use +id, -id, ?, done)")
            continue
        if fid not in model.by_id:
            print(f"? unknown feature '{fid}', step ignored")
            continue
        cfg = cfg.with_decision(
            fid, Decision.SELECTED if sign == "+" else Decision.DESELECTED)
        result = propagate(encoded, cfg)
        print(f"{sign} {fid}")
        if result.conflict is not None:
            for out in _conflict_lines(result.conflict):
                print(out)
            return EXIT_NEGATIVE
        for d in result.derivations:
            dsign = "+" if d.value else "-"
            print(f"forced {dsign} {d.feature} ({reason_text(d.via)})")

    result = propagate(encoded, cfg)
    if result.conflict is not None:
        for out in _conflict_lines(result.conflict):
            print(out)
        return EXIT_NEGATIVE
    assumptions = [(fid, d is Decision.SELECTED)
                   for fid, d in result.configuration.decisions.items()]
    extensible = sat(encoded, assumptions, backend=args.backend).satisfiable
    print(f"extensible: {'yes' if extensible else 'no'}")
    return EXIT_OK if extensible else EXIT_NEGATIVE


def _print_status(model: FeatureModel, cfg: Configuration, result: PropagationResult) -> None:
    merged = result.configuration
    forced = result.forced
    for fid in model.feature_ids:
        if cfg.of(fid) is not Decision.UNDECIDED:
            tag = "+" if cfg.of(fid) is Decision.SELECTED else "-"
            print(f"{tag} {fid} (user)")
        elif fid in forced:
            tag = "+" if forced[fid] else "-"
            print(f"{tag} {fid} (forced)")
        else:
            print(f"? {fid}")


# --- encode ------------------------------------------------------------------

def cmd_encode(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    encoded = encode_model(model)
    if args.dimacs:
        sys.stdout.write(to_dimacs(to_cnf(encoded)))
    else:
        for conjunct in encoded.conjuncts():
            print(f"{conjunct.label}: {format_formula(conjunct.formula, args.ascii)}")
    return EXIT_OK


# --- count / enumerate ---------------------------------------------------------

def cmd_count(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    encoded = encode_model(model)
    cap = count_cap_from_env(args.cap)
    try:
        count = count_products(encoded, cap=cap)
    except ModelTooLargeError as exc:
        raise CliError(str(exc), EXIT_TOO_LARGE) from exc
    print(count)
    return EXIT_OK if count > 0 else EXIT_NEGATIVE


def cmd_enumerate(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    encoded = encode_model(model)
    cap = count_cap_from_env(args.cap)
    try:
        products = enumerate_products(encoded, limit=args.limit, cap=cap)
    except ModelTooLargeError as exc:
        raise CliError(str(exc), EXIT_TOO_LARGE) from exc
    if args.json:
        payload = [sorted(p.selected, key={f: i for i, f in enumerate(model.feature_ids)}.__getitem__)
                   for p in products]
        print(json.dumps(payload, indent=2))
    else:
        for i, product in enumerate(products, 1):
            chosen = [fid for fid in model.feature_ids if product.of(fid) is Decision.SELECTED]
            print(f"{i}: {' '.join(chosen)}")
    return EXIT_OK if products else EXIT_NEGATIVE


# --- serve ---------------------------------------------------------------------

def cmd_serve(args: argparse.Namespace) -> int:
    import socket

    import uvicorn

    from .service import create_app, load_model_dir

    if not Path(args.dir).is_dir():
        raise CliError(f"not a directory: {args.dir}")
    models, load_errors = load_model_dir(args.dir)
    for filename, errors in load_errors:
        for error in errors:
            print(f"skipping {filename}: {error.message}", file=sys.stderr)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        raise CliError(f"cannot bind {args.host}:{args.port}: {exc.strerror or exc}") from exc
    finally:
        probe.close()
    app = create_app(models=models, cors_origin=args.cors_origin)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# --- entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", type=SolverBackend, default=SolverBackend.AUTO,
                        choices=list(SolverBackend), metavar="{brute,dpll,auto}")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--ascii", action="store_true",
                        help="ASCII connectives instead of unicode glyphs")
    common.add_argument("--cap", type=int, default=DEFAULT_COUNT_CAP,
                        help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="fmcheck",
        description="Feature-model encoding and analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common],
                       help="check a configuration against a model")
    p.add_argument("model")
    p.add_argument("config")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("analyze", parents=[common],
                       help="void, dead and core features")
    p.add_argument("model")
    p.add_argument("--count", action="store_true", help="also count products")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("configure", parents=[common],
                       help="interactive session reading +id/-id/?/done from stdin")
    p.add_argument("model")
    p.set_defaults(fn=cmd_configure)

    p = sub.add_parser("encode", parents=[common], help="print the encoding")
    p.add_argument("model")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--dimacs", action="store_true", help="CNF in DIMACS format")
    group.add_argument("--pretty", action="store_true", help="conjunct list (default)")
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("count", parents=[common], help="count valid products")
    p.add_argument("model")
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("enumerate", parents=[common], help="list valid products")
    p.add_argument("model")
    p.add_argument("--limit", type=int, default=10)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("serve", parents=[common], help="serve the JSON API")
    p.add_argument("dir")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8551)
    p.add_argument("--cors-origin", default="*")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
