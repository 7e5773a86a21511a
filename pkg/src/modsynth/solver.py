"""Type inhabitation over a combinator repository.

The solver builds a tree grammar whose nonterminals are atom
intersections: a rule ``T -> c(s1..sk)`` exists for every combinator
``c: s1 -> .. -> sk -> r`` with ``r`` a subtype of ``T``.  Argument types
are taken verbatim as nonterminals, so the grammar is finite.  After
pruning unproductive rules the grammar is counted and enumerated in a
fixed order: term size ascending, then lexicographic by combinator
identifier depth-first.
"""

from __future__ import annotations

from dataclasses import dataclass

from .repo import Repository
from .taxonomy import Taxonomy
from .types import AtomSet, Term, is_subtype

U64_MAX = 2**64 - 1
_SATURATED = 2**64  # sentinel: any value beyond the reportable range


@dataclass(frozen=True)
class TreeGrammar:
    """Rules per nonterminal plus the requested start symbols.

    ``rules`` only contains productive nonterminals; ``start`` keeps every
    requested target, productive or not.
    """

    rules: dict[AtomSet, list[tuple[str, tuple[AtomSet, ...]]]]
    start: tuple[AtomSet, ...]

    @property
    def nonterminals(self) -> set[AtomSet]:
        return set(self.rules)

    def dump(self) -> str:
        """One rule per line, deterministic; used by the CLI debug flag."""
        lines = []
        for nt in sorted(self.rules, key=str):
            for cid, args in self.rules[nt]:
                rendered = ", ".join(str(a) for a in args)
                lines.append(f"{nt} -> {cid}({rendered})")
        return "\n".join(lines)


@dataclass(frozen=True)
class SolutionCount:
    """Exact solution count, infinity, or a saturated lower bound."""

    kind: str  # "finite" | "infinite" | "at_least"
    value: int | None = None

    @staticmethod
    def finite(n: int) -> "SolutionCount":
        return SolutionCount("finite", n)

    @staticmethod
    def infinite() -> "SolutionCount":
        return SolutionCount("infinite")

    @staticmethod
    def at_least(n: int) -> "SolutionCount":
        return SolutionCount("at_least", n)

    def to_json(self) -> dict:
        if self.kind == "infinite":
            return {"kind": "infinite"}
        return {"kind": self.kind, "value": self.value}

    def __str__(self) -> str:
        if self.kind == "infinite":
            return "Infinite"
        if self.kind == "at_least":
            return f"Finite(at least {self.value})"
        return f"Finite({self.value})"


def build_grammar(repo: Repository, taxonomy: Taxonomy, targets: list[AtomSet]) -> TreeGrammar:
    """Worklist construction of the inhabitation tree grammar, then pruning."""
    subtype_cache: dict[tuple[AtomSet, AtomSet], bool] = {}

    def cached_subtype(lhs: AtomSet, rhs: AtomSet) -> bool:
        key = (lhs, rhs)
        hit = subtype_cache.get(key)
        if hit is None:
            hit = is_subtype(taxonomy, lhs, rhs)
            subtype_cache[key] = hit
        return hit

    sorted_ids = repo.sorted_ids()
    rules: dict[AtomSet, list[tuple[str, tuple[AtomSet, ...]]]] = {}
    start: list[AtomSet] = []
    for t in targets:
        if t not in start:
            start.append(t)
    worklist = list(start)
    seen: set[AtomSet] = set(start)
    while worklist:
        target = worklist.pop()
        alternatives = []
        for cid in sorted_ids:
            ctype = repo.entries[cid]
            if cached_subtype(ctype.result, target):
                alternatives.append((cid, ctype.args))
                for arg in ctype.args:
                    if arg not in seen:
                        seen.add(arg)
                        worklist.append(arg)
        rules[target] = alternatives

    return TreeGrammar(_prune(rules), tuple(start))


def _prune(rules: dict[AtomSet, list[tuple[str, tuple[AtomSet, ...]]]]):
    """Keep only nonterminals that derive at least one finite term."""
    productive: set[AtomSet] = set()
    changed = True
    while changed:
        changed = False
        for nt, alternatives in rules.items():
            if nt in productive:
                continue
            for _, args in alternatives:
                if all(a in productive for a in args):
                    productive.add(nt)
                    changed = True
                    break
    pruned: dict[AtomSet, list[tuple[str, tuple[AtomSet, ...]]]] = {}
    for nt, alternatives in rules.items():
        if nt not in productive:
            continue
        kept = [(c, args) for c, args in alternatives if all(a in productive for a in args)]
        pruned[nt] = kept
    return pruned


def _sat_add(a: int, b: int) -> int:
    return min(a + b, _SATURATED)


def _sat_mul(a: int, b: int) -> int:
    return min(a * b, _SATURATED)


def count(grammar: TreeGrammar) -> SolutionCount:
    """Count distinct derivable terms over the start symbols.

    Infinite iff a productive nonterminal reachable from a start symbol
    lies on a cycle; counts beyond 2^64-1 saturate to an explicit
    lower-bound report.
    """
    reachable: set[AtomSet] = set()
    stack = [s for s in grammar.start if s in grammar.rules]
    while stack:
        nt = stack.pop()
        if nt in reachable:
            continue
        reachable.add(nt)
        for _, args in grammar.rules[nt]:
            stack.extend(a for a in args if a not in reachable)

    # iterative DFS cycle check over the rule-dependency graph
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[AtomSet, int] = {nt: 0 for nt in reachable}
    order: list[AtomSet] = []
    for root in reachable:
        if color[root] != WHITE:
            continue
        dfs: list[tuple[AtomSet, int]] = [(root, 0)]
        color[root] = GRAY
        while dfs:
            node, idx = dfs[-1]
            succ = [a for _, args in grammar.rules[node] for a in args]
            if idx >= len(succ):
                dfs.pop()
                color[node] = BLACK
                order.append(node)
                continue
            dfs[-1] = (node, idx + 1)
            nxt = succ[idx]
            if color[nxt] == GRAY:
                return SolutionCount.infinite()
            if color[nxt] == WHITE:
                color[nxt] = GRAY
                dfs.append((nxt, 0))

    counts: dict[AtomSet, int] = {}
    for nt in order:  # reverse topological: dependencies first
        total = 0
        for _, args in grammar.rules[nt]:
            product = 1
            for a in args:
                product = _sat_mul(product, counts[a])
            total = _sat_add(total, product)
        counts[nt] = total

    grand = 0
    for s in grammar.start:
        grand = _sat_add(grand, counts.get(s, 0))
    if grand > U64_MAX:
        return SolutionCount.at_least(U64_MAX)
    return SolutionCount.finite(grand)


def count_up_to_size(grammar: TreeGrammar, max_size: int) -> int:
    """Number of distinct start-derivable terms with at most ``max_size`` nodes."""
    per_size = _size_counts(grammar, max_size)
    seen_starts: set[AtomSet] = set()
    total = 0
    for s in grammar.start:
        if s in seen_starts or s not in grammar.rules:
            continue
        seen_starts.add(s)
        total += sum(per_size[s][1 : max_size + 1])
    return total


def _size_counts(grammar: TreeGrammar, max_size: int) -> dict[AtomSet, list[int]]:
    table = {nt: [0] * (max_size + 1) for nt in grammar.rules}
    for size in range(1, max_size + 1):
        for nt in grammar.rules:
            n = 0
            for _, args in grammar.rules[nt]:
                n += _count_compositions(table, args, size - 1)
            table[nt][size] = n
    return table


def _count_compositions(table, args: tuple[AtomSet, ...], budget: int) -> int:
    if not args:
        return 1 if budget == 0 else 0
    total = 0
    first, rest = args[0], args[1:]
    for s in range(1, budget - len(rest) + 1):
        c = table[first][s]
        if c:
            total += c * _count_compositions(table, rest, budget - s)
    return total


def enumerate_terms(grammar: TreeGrammar, max_size: int, max_results: int) -> list[Term]:
    """All distinct start-derivable terms up to ``max_size`` nodes, in order.

    Order is term size ascending, then lexicographic on the depth-first
    sequence of combinator identifiers; output is truncated to
    ``max_results`` and deterministic across runs.
    """
    by_size: dict[AtomSet, list[list[Term]]] = {
        nt: [[] for _ in range(max_size + 1)] for nt in grammar.rules
    }
    starts: list[AtomSet] = []
    for s in grammar.start:
        if s in grammar.rules and s not in starts:
            starts.append(s)

    results: list[Term] = []
    for size in range(1, max_size + 1):
        for nt in grammar.rules:
            bucket: list[Term] = []
            for cid, args in sorted(grammar.rules[nt], key=lambda r: r[0]):
                bucket.extend(
                    Term(cid, tuple(chosen))
                    for chosen in _argument_tuples(by_size, args, size - 1)
                )
            by_size[nt][size] = bucket
        emitted: set[Term] = set()
        layer: list[Term] = []
        for s in starts:
            for term in by_size[s][size]:
                if term not in emitted:
                    emitted.add(term)
                    layer.append(term)
        layer.sort(key=Term.preorder_ids)
        for term in layer:
            if len(results) >= max_results:
                return results
            results.append(term)
    return results


def _argument_tuples(by_size, args: tuple[AtomSet, ...], budget: int):
    """Tuples of argument terms with total size exactly ``budget``."""
    if not args:
        if budget == 0:
            yield ()
        return
    first, rest = args[0], args[1:]
    for s in range(1, budget - len(rest) + 1):
        for head in by_size[first][s]:
            for tail in _argument_tuples(by_size, rest, budget - s):
                yield (head,) + tail
