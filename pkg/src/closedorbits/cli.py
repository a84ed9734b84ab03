"""Command-line entry point: ``closedorbits <verb> [flags]``.

Exit status: 0 success, 1 "not closed" (classify) or a failing check, 2
unsupported input, 3 schema errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

from .canonical import ClosedSeed, NilpotentSeed, UnsupportedInput, representative_from_invariants
from .classify import descend, is_closed, mvw_stabilizer_witness
from .groups import EnhancedPoint, GroupDescriptor, MembershipError, in_lie_algebra, sample
from .invariants import InvariantVector, effective_kind, quotient_map
from .linalg import Mat
from .oracle import point_to_json, run_checks
from .scalar import ExtensionError, extension_of, format_scalar, parse_scalar

EXIT_OK, EXIT_NOT_CLOSED, EXIT_UNSUPPORTED, EXIT_SCHEMA = 0, 1, 2, 3
VERBS = ("invariants", "classify", "represent", "descend", "witness", "sample", "check")


class CliError(Exception):
    def __init__(self, code: str, message: str, status: int):
        super().__init__(message)
        self.code = code
        self.status = status


def schema_error(message: str) -> CliError:
    return CliError("schema", message, EXIT_SCHEMA)


# ---------------------------------------------------------------- schemas

@lru_cache(maxsize=None)
def _registry() -> Registry:
    pairs = []
    for name in ("scalar", "point", "invariants", "seed", "report"):
        pairs.append((f"{name}.json", Resource.from_contents(load_schema(name))))
    return Registry().with_resources(pairs)


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("closedorbits").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def validate(obj, name: str):
    validator = jsonschema.Draft202012Validator(load_schema(name), registry=_registry())
    err = jsonschema.exceptions.best_match(validator.iter_errors(obj))
    if err is not None:
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise schema_error(f"{name} input invalid at {where}: {err.message}")


def read_json(arg: str | None, what: str):
    """Inline JSON or a path to a JSON file."""
    if arg is None:
        raise schema_error(f"--{what} is required for this verb")
    text = arg
    if not arg.lstrip().startswith(("{", "[")):
        path = Path(arg)
        if not path.is_file():
            raise schema_error(f"--{what}: no such file and not inline JSON: {arg}")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise schema_error(f"--{what}: malformed JSON ({exc})") from None


# ----------------------------------------------------------------- inputs

def _group(args, obj: dict | None = None, key: str = "group") -> GroupDescriptor:
    kind = args.group or (obj or {}).get(key)
    rank = args.rank if args.rank is not None else (obj or {}).get("rank")
    if kind is None or rank is None:
        raise schema_error("group kind and rank are required (--group/--rank or in the input)")
    if obj and obj.get(key) and obj[key] != kind:
        raise schema_error(f"--group {kind} contradicts input {key} {obj[key]}")
    if obj and obj.get("rank") is not None and obj["rank"] != rank:
        raise schema_error(f"--rank {rank} contradicts input rank {obj['rank']}")
    return GroupDescriptor(kind, int(rank))


def parse_point(args) -> EnhancedPoint:
    obj = read_json(args.point, "point")
    validate(obj, "point")
    group = _group(args, obj)
    try:
        X = Mat([[parse_scalar(x) for x in row] for row in obj["X"]]) if obj["X"] else Mat.zeros(0)
        u = tuple(parse_scalar(x) for x in obj["u"])
        v = tuple(parse_scalar(x) for x in obj["v"]) if "v" in obj else None
        p = EnhancedPoint(group, X, u, v)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise schema_error(f"point: {exc}") from None
    if not in_lie_algebra(p.X, group):
        raise schema_error(f"X is not in the Lie algebra of {group.label()}")
    return p


def parse_invariants(args) -> tuple[GroupDescriptor, InvariantVector]:
    obj = read_json(args.invariants, "invariants")
    validate(obj, "invariants")
    group = _group(args, obj, "kind")
    kind, n = effective_kind(group)
    try:
        iv = InvariantVector.from_json({**obj, "kind": kind, "rank": n})
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise schema_error(f"invariants: {exc}") from None
    return group, iv


def parse_seed(args) -> ClosedSeed:
    obj = read_json(args.input, "input")
    validate(obj, "seed")
    try:
        if "k" in obj:
            return ClosedSeed.nilpotent(NilpotentSeed.from_json(obj))
        return ClosedSeed.from_json(obj)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise schema_error(f"seed: {exc}") from None


# ------------------------------------------------------------------ verbs

def _matrix_json(M: Mat) -> list:
    return [[format_scalar(x) for x in row] for row in M.tolist()]


def cmd_invariants(args) -> tuple[dict, int]:
    p = parse_point(args)
    out = quotient_map(p).to_json()
    return {"traces": out["traces"], "pairings": out["pairings"]}, EXIT_OK


def cmd_classify(args) -> tuple[dict, int]:
    report = is_closed(parse_point(args))
    return report.to_json(), EXIT_OK if report.is_closed else EXIT_NOT_CLOSED


def cmd_represent(args) -> tuple[dict, int]:
    group, iv = parse_invariants(args)
    p = representative_from_invariants(group, iv)
    out = point_to_json(p)
    d = extension_of(*p.u, *p.X.entries(), *(p.v or ()))
    out["extension"] = None if d is None else f"sqrt({d})"
    return out, EXIT_OK


def cmd_descend(args) -> tuple[dict, int]:
    try:
        report = descend(parse_seed(args))
    except ArithmeticError as exc:
        raise CliError("not_closed", str(exc), EXIT_NOT_CLOSED) from None
    return report.to_json(), EXIT_OK


def cmd_witness(args) -> tuple[dict, int]:
    seed = parse_seed(args)
    if seed.kind != "gl":
        raise CliError("unsupported", "explicit MVW witnesses are provided for GL seeds only", EXIT_UNSUPPORTED)
    e = mvw_stabilizer_witness(seed)
    return {"g": _matrix_json(e.g), "delta": e.delta}, EXIT_OK


def cmd_sample(args) -> tuple[dict, int]:
    group = _group(args)
    e, p = sample(group, args.seed)
    return {"element": {"g": _matrix_json(e.g), "delta": e.delta}, "point": point_to_json(p)}, EXIT_OK


def cmd_check(args) -> tuple[dict, int]:
    try:
        grid = [parse_scalar(x.strip()) for x in args.grid.split(",") if x.strip()]
    except (ValueError, TypeError, ZeroDivisionError):
        raise schema_error(f"--grid must be comma-separated rationals, got {args.grid!r}") from None
    if not grid:
        raise schema_error("--grid is empty")
    if not 0 <= args.max_rank <= 4:
        raise schema_error("--max-rank must be between 0 and 4")
    reports = run_checks(args.max_rank, grid, args.trials, args.seed)
    passed = all(r.passed for r in reports)
    out = {"passed": passed, "suites": [_stable(r.to_json()) for r in reports]}
    return out, EXIT_OK if passed else EXIT_NOT_CLOSED


def _stable(rep: dict) -> dict:
    # timings would break byte-identical output
    rep = dict(rep)
    rep.pop("wall_time", None)
    return rep


COMMANDS = {
    "invariants": cmd_invariants,
    "classify": cmd_classify,
    "represent": cmd_represent,
    "descend": cmd_descend,
    "witness": cmd_witness,
    "sample": cmd_sample,
    "check": cmd_check,
}


# ----------------------------------------------------------------- driver

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="closedorbits", description="Closed orbits in g x E for classical groups.")
    ap.add_argument("verb", choices=VERBS)
    ap.add_argument("--group", choices=("gl", "sp", "oodd", "oeven"))
    ap.add_argument("--rank", type=int)
    ap.add_argument("--point", help="point JSON, inline or a file path")
    ap.add_argument("--invariants", help="invariant vector JSON, inline or a file path")
    ap.add_argument("--input", help="seed JSON for descend/witness, inline or a file path")
    ap.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--max-rank", type=int, default=2, help="check: largest rank swept")
    ap.add_argument("--grid", default="-1,1,2", help="check: seed coefficient grid, comma separated")
    ap.add_argument("--trials", type=int, default=20, help="check: invariance trials per group")
    return ap


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))
    if "error" in payload:
        err = payload["error"]
        return f"error [{err['code']}]: {err['message']}"
    return "\n".join(f"{key}: {json.dumps(payload[key], sort_keys=True)}" for key in sorted(payload))


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage; unknown flags are schema errors
        return EXIT_OK if exc.code == 0 else EXIT_SCHEMA
    try:
        payload, status = COMMANDS[args.verb](args)
    except CliError as exc:
        status, payload = exc.status, _err(args.verb, exc.code, str(exc))
    except ExtensionError as exc:
        status, payload = EXIT_UNSUPPORTED, _err(args.verb, "extension", str(exc))
    except UnsupportedInput as exc:
        status, payload = EXIT_UNSUPPORTED, _err(args.verb, exc.code, str(exc))
    except (MembershipError, ValueError, TypeError, KeyError) as exc:
        status, payload = EXIT_SCHEMA, _err(args.verb, "schema", str(exc))
    print(render(payload, args.format), file=stdout)
    return status


def _err(verb: str, code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message, "verb": verb}}


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
