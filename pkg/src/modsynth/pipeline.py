"""End-to-end solve: request -> repository -> grammar -> terms -> BOMs.

The CLI and the HTTP service both run requests through this module, so
their result documents are byte-identical for identical pinned inputs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import repo as repogen
from . import solver
from .catalog import Catalog, validate_catalog
from .interpret import BOM, bom, interpret
from .repo import Repository, Request
from .types import SynthError, Term, UnknownAtomError, is_subtype, typecheck


class ValidationError(SynthError):
    def __init__(self, diagnostics):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


@dataclass
class SolveOutcome:
    count: solver.SolutionCount
    results: list[tuple[Term, int, BOM]]
    truncated: bool
    request: Request
    grammar: solver.TreeGrammar
    dynamic_repo: Repository
    static_repo: Repository
    raw_terms: list[Term] = field(default_factory=list)  # pre-erasure solver output
    targets: list = field(default_factory=list)
    timings_ms: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        """The canonical results document; must stay byte-stable across runs."""
        return {
            "count": self.count.to_json(),
            "enumeration": {
                "max_size": self.request.max_size,
                "max_results": self.request.max_results,
                "returned": len(self.results),
                "truncated": self.truncated,
            },
            "results": [
                {"index": i, "term": term.to_json(), "size": size, "bom": b.to_json()}
                for i, (term, size, b) in enumerate(self.results)
            ],
        }


def validate_request(catalog: Catalog, request: Request) -> None:
    """Reject goals naming atoms absent from the merged taxonomy."""
    taxonomy = catalog.taxonomy
    for atom in request.goal:
        if not atom.is_property and atom.name not in taxonomy.nodes:
            raise UnknownAtomError(atom.name)


def solve(
    catalog: Catalog,
    request: Request,
    expansion_cap: int = repogen.DEFAULT_EXPANSION_CAP,
    verify: bool = False,
) -> SolveOutcome:
    """Run the full synthesis pipeline for one request.

    With ``verify`` every enumerated term is re-checked with the
    typechecker against a start target before it is accepted.
    """
    diagnostics = [d for d in validate_catalog(catalog) if d.severity == "error"]
    if diagnostics:
        raise ValidationError(diagnostics)
    validate_request(catalog, request)
    taxonomy = catalog.taxonomy
    timings: dict[str, float] = {}

    clock = time.perf_counter
    t0 = clock()
    static_repo = repogen.build_static_repository(catalog)
    targets = repogen.translate_request(request)
    timings["translate_ms"] = (clock() - t0) * 1000

    t0 = clock()
    dynamic_repo = repogen.dynamic_expand(static_repo, request, catalog, expansion_cap)
    timings["expand_ms"] = (clock() - t0) * 1000

    t0 = clock()
    grammar = solver.build_grammar(dynamic_repo, taxonomy, targets)
    timings["grammar_ms"] = (clock() - t0) * 1000

    t0 = clock()
    solution_count = solver.count(grammar)
    timings["count_ms"] = (clock() - t0) * 1000

    t0 = clock()
    terms = solver.enumerate_terms(grammar, request.max_size, request.max_results)
    available = solver.count_up_to_size(grammar, request.max_size)
    timings["enumerate_ms"] = (clock() - t0) * 1000

    if verify:
        for term in terms:
            result = typecheck(dynamic_repo, taxonomy, term)
            if not any(is_subtype(taxonomy, result, target) for target in targets):
                raise SynthError(f"solver emitted ill-typed term {term}")

    t0 = clock()
    results: list[tuple[Term, int, BOM]] = []
    for term in terms:
        erased = repogen.erase_term(dynamic_repo, term)
        program = interpret(erased, static_repo, catalog)
        term_bom = bom(program, catalog)
        if all(f.accepts(dict(term_bom.totals)) for f in request.filters):
            results.append((erased, term.size(), term_bom))
    timings["interpret_ms"] = (clock() - t0) * 1000
    timings["total_ms"] = sum(timings.values())

    truncated = len(terms) < available
    return SolveOutcome(
        count=solution_count,
        results=results,
        truncated=truncated,
        request=request,
        grammar=grammar,
        dynamic_repo=dynamic_repo,
        static_repo=static_repo,
        raw_terms=terms,
        targets=targets,
        timings_ms=timings,
    )


def solve_targets_by_oracle(catalog: Catalog, request: Request) -> list[Term]:
    """Brute-force reference enumeration for the same request, erased terms."""
    from .oracle import enumerate_by_oracle

    validate_request(catalog, request)
    taxonomy = catalog.taxonomy
    static_repo = repogen.build_static_repository(catalog)
    dynamic_repo = repogen.dynamic_expand(static_repo, request, catalog)
    targets = repogen.translate_request(request)
    terms = enumerate_by_oracle(dynamic_repo, taxonomy, targets, request.max_size)
    return [repogen.erase_term(dynamic_repo, t) for t in terms]
