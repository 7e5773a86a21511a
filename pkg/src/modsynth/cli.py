"""Command-line access to the full pipeline, independent of the service.

Exit codes: 0 success, 1 validation failure, 2 internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .assemble import assemble, export
from .catalog import load_catalog, validate_catalog
from .interpret import bom, interpret
from .jsonio import canonical_dumps, load_json
from .oracle import enumerate_by_oracle
from .pipeline import solve, solve_targets_by_oracle
from .repo import Request, build_static_repository
from .types import AtomSet, SynthError, Term, parse_type


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_validate(args) -> int:
    catalog = load_catalog(args.catalog)
    diagnostics = validate_catalog(catalog)
    for d in diagnostics:
        print(d, file=sys.stderr)
    if any(d.severity == "error" for d in diagnostics):
        return 1
    print(f"ok: {len(catalog.components)} components", file=sys.stderr)
    return 0


def cmd_solve(args) -> int:
    catalog = load_catalog(args.catalog)
    request = Request.from_json(load_json(args.request))
    outcome = solve(catalog, request, expansion_cap=args.expansion_cap, verify=args.verify)
    if args.dump_repo:
        print(outcome.dynamic_repo.dump(), file=sys.stderr)
    if args.dump_grammar:
        print(outcome.grammar.dump(), file=sys.stderr)
    _write(args.output, canonical_dumps(outcome.to_json()))
    print(
        f"count={outcome.count} returned={len(outcome.results)} "
        f"in {outcome.timings_ms['total_ms']:.1f}ms",
        file=sys.stderr,
    )
    return 0


def cmd_oracle(args) -> int:
    catalog = load_catalog(args.catalog)
    if args.request:
        request = Request.from_json(load_json(args.request))
        if args.max_size:
            request = Request(
                request.goal, request.aggregates, args.max_size, request.max_results,
                request.filters,
            )
        terms = solve_targets_by_oracle(catalog, request)
    else:
        goal = parse_type(args.goal)
        if not isinstance(goal, AtomSet):
            print("oracle goal must be an intersection of atoms", file=sys.stderr)
            return 1
        repo = build_static_repository(catalog)
        terms = enumerate_by_oracle(
            repo, catalog.taxonomy, [goal], args.max_size or 6
        )
    doc = {"results": [{"term": t.to_json(), "size": t.size()} for t in terms]}
    _write(args.output, canonical_dumps(doc))
    print(f"oracle found {len(terms)} terms", file=sys.stderr)
    return 0


def cmd_bom(args) -> int:
    catalog = load_catalog(args.catalog)
    term = Term.from_json(load_json(args.term))
    repo = build_static_repository(catalog)
    program = interpret(term, repo, catalog)
    _write(args.output, canonical_dumps(bom(program, catalog).to_json()))
    return 0


def cmd_assemble(args) -> int:
    catalog = load_catalog(args.catalog)
    term = Term.from_json(load_json(args.term))
    repo = build_static_repository(catalog)
    program = interpret(term, repo, catalog)
    if args.program:
        Path(args.program).write_text(canonical_dumps(program.to_json()))
    scene = assemble(program, catalog)
    data = export(scene, args.format, catalog)
    if args.output and args.output != "-":
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.storage)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modsynth",
        description="Synthesize assemblies from catalogs of typed modular components",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a catalog directory")
    p.add_argument("--catalog", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="solve a request against a catalog")
    p.add_argument("--catalog", required=True)
    p.add_argument("--request", required=True)
    p.add_argument("-o", "--output", default=None, help="results JSON path (default stdout)")
    p.add_argument("--expansion-cap", type=int, default=10**6)
    p.add_argument("--verify", action="store_true", help="re-typecheck every emitted term")
    p.add_argument("--dump-grammar", action="store_true", help="print the tree grammar to stderr")
    p.add_argument("--dump-repo", action="store_true",
                   help="print the expanded repository, one combinator per line")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="brute-force enumeration for cross-checking solve")
    p.add_argument("--catalog", required=True)
    p.add_argument("--goal", default=None, help="target type, e.g. 'tower'")
    p.add_argument("--request", default=None, help="request JSON (alternative to --goal)")
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bom", help="bill of materials for a term")
    p.add_argument("--catalog", required=True)
    p.add_argument("--term", required=True, help="term JSON file")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_bom)

    p = sub.add_parser("assemble", help="assemble a term into a posed scene")
    p.add_argument("--catalog", required=True)
    p.add_argument("--term", required=True)
    p.add_argument("--format", choices=["scene-json", "gltf"], default="scene-json")
    p.add_argument("--program", default=None, help="also write the assembly program JSON here")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--storage", default=None, help="storage root (default $MODSYNTH_STORAGE)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SynthError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001
        print(f"internal error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
