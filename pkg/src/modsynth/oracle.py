"""Brute-force enumeration of well-typed terms.

Builds every term up to a size bound by exhaustive application of
repository combinators, keeping only applications the typechecker
accepts.  Deliberately independent of the tree-grammar solver: this is
the executable witness the solver is tested against, and it ships in the
CLI so the check is user-runnable.
"""

from __future__ import annotations

from .repo import Repository
from .taxonomy import Taxonomy
from .types import AtomSet, Term, is_subtype


def all_well_typed_terms(repo: Repository, taxonomy: Taxonomy, max_size: int) -> dict[Term, AtomSet]:
    """Every well-typed term with at most ``max_size`` combinator nodes.

    Returns a mapping from term to its type (the root's result set).
    """
    by_size: list[list[tuple[Term, AtomSet]]] = [[] for _ in range(max_size + 1)]
    sorted_ids = sorted(repo.entries)
    for size in range(1, max_size + 1):
        layer: list[tuple[Term, AtomSet]] = []
        for cid in sorted_ids:
            ctype = repo.entries[cid]
            if ctype.arity == 0:
                if size == 1:
                    layer.append((Term(cid), ctype.result))
                continue
            if size == 1:
                continue
            for combo in _typed_argument_tuples(
                by_size, taxonomy, ctype.args, size - 1
            ):
                layer.append((Term(cid, combo), ctype.result))
        by_size[size] = layer
    out: dict[Term, AtomSet] = {}
    for layer in by_size[1:]:
        for term, ty in layer:
            out[term] = ty
    return out


def _typed_argument_tuples(by_size, taxonomy, declared: tuple[AtomSet, ...], budget: int):
    """Argument tuples whose term types pass the subtype check slot-wise."""
    if not declared:
        if budget == 0:
            yield ()
        return
    first, rest = declared[0], declared[1:]
    for s in range(1, budget - len(rest) + 1):
        for term, ty in by_size[s]:
            if not is_subtype(taxonomy, ty, first):
                continue
            for tail in _typed_argument_tuples(by_size, taxonomy, rest, budget - s):
                yield (term,) + tail


def enumerate_by_oracle(
    repo: Repository,
    taxonomy: Taxonomy,
    targets: list[AtomSet],
    max_size: int,
) -> list[Term]:
    """All well-typed terms whose type is a subtype of some target, solver order."""
    matching = [
        term
        for term, ty in all_well_typed_terms(repo, taxonomy, max_size).items()
        if any(is_subtype(taxonomy, ty, target) for target in targets)
    ]
    matching.sort(key=lambda t: (t.size(), t.preorder_ids()))
    return matching
