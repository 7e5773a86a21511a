"""Atoms, intersection types, combinator types and terms.

The type language is deliberately small: a combinator type is a curried
arrow over finite intersections of atoms, and a term is a combinator
applied to argument terms.  Subtyping between atom intersections is
decided against a taxonomy; property-annotated atoms compare by exact
equality only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union


class SynthError(Exception):
    """Base class for all domain errors."""


class UnknownAtomError(SynthError):
    def __init__(self, name: str):
        super().__init__(f"unknown atom {name!r}")
        self.atom = name


class UnknownCombinatorError(SynthError):
    def __init__(self, name: str):
        super().__init__(f"unknown combinator {name!r}")
        self.combinator = name


class ArityMismatchError(SynthError):
    def __init__(self, combinator: str, expected: int, actual: int, path: tuple[int, ...]):
        super().__init__(
            f"combinator {combinator!r} at path {list(path)} takes "
            f"{expected} argument(s), got {actual}"
        )
        self.combinator = combinator
        self.expected = expected
        self.actual = actual
        self.path = path


class ArgumentTypeMismatchError(SynthError):
    def __init__(self, path: tuple[int, ...], expected: "AtomSet", actual: "AtomSet"):
        super().__init__(
            f"argument at path {list(path)} has type {actual} which is not a "
            f"subtype of the declared {expected}"
        )
        self.path = path
        self.expected = expected
        self.actual = actual


class TypeSyntaxError(SynthError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Atom:
    """A semantic identifier, optionally annotated with an integer property.

    Plain atoms name taxonomy nodes.  Property atoms carry a ``(key, value)``
    pair and compare by exact equality; their name may be empty, in which
    case the atom is a pure aggregation marker such as ``@cubes=3``.
    """

    name: str
    prop: tuple[str, int] | None = None

    def __post_init__(self):
        if self.prop is None and not self.name:
            raise ValueError("plain atoms must have a non-empty name")

    def sort_key(self) -> tuple:
        return (self.name, self.prop is not None, self.prop or ("", 0))

    def __lt__(self, other: "Atom") -> bool:
        return self.sort_key() < other.sort_key()

    @property
    def is_property(self) -> bool:
        return self.prop is not None

    def __str__(self) -> str:
        if self.prop is None:
            return self.name
        key, value = self.prop
        return f"{self.name}@{key}={value}"

    def to_json(self) -> dict:
        doc: dict = {"name": self.name}
        if self.prop is not None:
            doc["prop"] = {"key": self.prop[0], "value": self.prop[1]}
        return doc

    @staticmethod
    def from_json(doc: dict) -> "Atom":
        prop = None
        if "prop" in doc and doc["prop"] is not None:
            prop = (doc["prop"]["key"], int(doc["prop"]["value"]))
        return Atom(doc["name"], prop)


@dataclass(frozen=True)
class AtomSet:
    """A finite intersection of atoms; the empty set is the universal type."""

    atoms: frozenset[Atom]

    @staticmethod
    def of(*atoms: Atom | str) -> "AtomSet":
        return AtomSet(frozenset(a if isinstance(a, Atom) else Atom(a) for a in atoms))

    @staticmethod
    def empty() -> "AtomSet":
        return AtomSet(frozenset())

    def __iter__(self) -> Iterator[Atom]:
        return iter(sorted(self.atoms))

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.atoms

    def union(self, other: "AtomSet") -> "AtomSet":
        return AtomSet(self.atoms | other.atoms)

    def add(self, atom: Atom) -> "AtomSet":
        return AtomSet(self.atoms | {atom})

    def without_properties(self) -> "AtomSet":
        """Strip aggregation markers; named property atoms lose their annotation."""
        return AtomSet(frozenset(Atom(a.name) for a in self.atoms if a.name))

    def plain_names(self) -> set[str]:
        return {a.name for a in self.atoms if not a.is_property}

    def __str__(self) -> str:
        if not self.atoms:
            return "omega"
        return " & ".join(str(a) for a in self)

    def to_json(self) -> list:
        return [a.to_json() for a in self]

    @staticmethod
    def from_json(doc: Iterable) -> "AtomSet":
        atoms = []
        for entry in doc:
            if isinstance(entry, str):
                atoms.append(Atom(entry))
            else:
                atoms.append(Atom.from_json(entry))
        return AtomSet(frozenset(atoms))


@dataclass(frozen=True)
class CombinatorType:
    """A curried arrow: args[0] -> args[1] -> ... -> result."""

    args: tuple[AtomSet, ...]
    result: AtomSet

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self) -> str:
        parts = [str(a) for a in self.args] + [str(self.result)]
        return " -> ".join(parts)

    def to_json(self) -> dict:
        return {"args": [a.to_json() for a in self.args], "result": self.result.to_json()}

    @staticmethod
    def from_json(doc: dict) -> "CombinatorType":
        return CombinatorType(
            tuple(AtomSet.from_json(a) for a in doc["args"]),
            AtomSet.from_json(doc["result"]),
        )


@dataclass(frozen=True)
class Term:
    """A combinator applied to argument terms."""

    combinator: str
    args: tuple["Term", ...] = ()

    def size(self) -> int:
        """Number of combinator nodes."""
        total = 0
        stack = [self]
        while stack:
            node = stack.pop()
            total += 1
            stack.extend(node.args)
        return total

    def preorder_ids(self) -> tuple[str, ...]:
        """Combinator identifiers in depth-first pre-order; the enumeration sort key."""
        out: list[str] = []
        stack = [self]
        while stack:
            node = stack.pop()
            out.append(node.combinator)
            stack.extend(reversed(node.args))
        return tuple(out)

    def __str__(self) -> str:
        out: list[str] = []
        stack: list[Term | str] = [self]
        while stack:
            item = stack.pop()
            if isinstance(item, str):
                out.append(item)
            elif not item.args:
                out.append(item.combinator)
            else:
                out.append(f"{item.combinator}(")
                tail: list[Term | str] = [")"]
                for i, arg in enumerate(item.args):
                    if i:
                        tail.append(", ")
                    tail.append(arg)
                stack.extend(reversed(tail))
        return "".join(out)

    def to_json(self) -> dict:
        return {"combinator": self.combinator, "args": [a.to_json() for a in self.args]}

    @staticmethod
    def from_json(doc: dict) -> "Term":
        return Term(doc["combinator"], tuple(Term.from_json(a) for a in doc.get("args", [])))


def is_subtype(taxonomy, lhs: AtomSet, rhs: AtomSet) -> bool:
    """Whether ``lhs`` is a subtype of ``rhs`` under the taxonomy order.

    Holds iff every atom of ``rhs`` is covered by some atom of ``lhs``:
    plain atoms through the reflexive-transitive taxonomy order, property
    atoms by exact equality.  The empty ``rhs`` (omega) is the top type.
    Raises UnknownAtomError for plain atoms absent from the taxonomy.
    """
    for atom in lhs.atoms | rhs.atoms:
        if not atom.is_property and atom.name not in taxonomy.nodes:
            raise UnknownAtomError(atom.name)
    lhs_props = {a for a in lhs.atoms if a.is_property}
    lhs_plain = [a for a in lhs.atoms if not a.is_property]
    for want in rhs.atoms:
        if want.is_property:
            if want not in lhs_props:
                return False
        else:
            if not any(want.name in taxonomy.supertype_closure(a.name) for a in lhs_plain):
                return False
    return True


def typecheck(repository, taxonomy, term: Term) -> AtomSet:
    """Compute the type of ``term`` against a repository of combinator types.

    Returns the result AtomSet of the root combinator iff every argument
    term's type is a subtype of the corresponding declared argument type.
    This is the independent check applied to all solver output.
    """
    entries: Mapping[str, CombinatorType] = getattr(repository, "entries", repository)

    # post-order over an explicit stack so deep terms stay within limits
    stack: list[tuple[Term, tuple[int, ...], bool]] = [(term, (), False)]
    done: list[AtomSet] = []
    while stack:
        node, path, expanded = stack.pop()
        if node.combinator not in entries:
            raise UnknownCombinatorError(node.combinator)
        ctype = entries[node.combinator]
        if len(node.args) != ctype.arity:
            raise ArityMismatchError(node.combinator, ctype.arity, len(node.args), path)
        if not expanded:
            stack.append((node, path, True))
            stack.extend((arg, path + (i,), False) for i, arg in enumerate(node.args))
        else:
            actuals = [done.pop() for _ in node.args]
            for i, (actual, declared) in enumerate(zip(actuals, ctype.args)):
                if not is_subtype(taxonomy, actual, declared):
                    raise ArgumentTypeMismatchError(path + (i,), declared, actual)
            done.append(ctype.result)
    return done.pop()


TypeExpr = Union[AtomSet, CombinatorType]


def parse_type(text: str) -> TypeExpr:
    """Parse the textual type grammar.

    Atoms are identifiers, ``&`` intersects, ``->`` is right-associative,
    ``@key=value`` annotates a property and ``omega`` is the empty
    intersection.  Inverse of :func:`print_type`.
    """
    tokens = _tokenize(text)
    parts = [_parse_intersection(tokens)]
    while tokens.peek()[0] == "ARROW":
        tokens.next()
        parts.append(_parse_intersection(tokens))
    kind, _, pos = tokens.peek()
    if kind != "END":
        raise TypeSyntaxError("unexpected trailing input", pos)
    if len(parts) == 1:
        return parts[0]
    return CombinatorType(tuple(parts[:-1]), parts[-1])


def print_type(t: TypeExpr) -> str:
    return str(t)


class _Tokens:
    def __init__(self, items: list[tuple[str, str, int]]):
        self.items = items
        self.index = 0

    def peek(self) -> tuple[str, str, int]:
        return self.items[self.index]

    def next(self) -> tuple[str, str, int]:
        tok = self.items[self.index]
        self.index += 1
        return tok


def _tokenize(text: str) -> _Tokens:
    out: list[tuple[str, str, int]] = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c.isalpha() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] in "_-"):
                j += 1
            out.append(("IDENT", text[i:j], i))
            i = j
        elif c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            out.append(("INT", text[i:j], i))
            i = j
        elif text.startswith("->", i):
            out.append(("ARROW", "->", i))
            i += 2
        elif c in "&@=":
            out.append((c, c, i))
            i += 1
        else:
            raise TypeSyntaxError(f"unexpected character {c!r}", i)
    out.append(("END", "", len(text)))
    return _Tokens(out)


def _parse_atom(tokens: _Tokens) -> Atom:
    kind, value, pos = tokens.peek()
    name = ""
    if kind == "IDENT":
        tokens.next()
        name = value
        kind, value, pos = tokens.peek()
    if kind == "@":
        tokens.next()
        kkind, key, kpos = tokens.next()
        if kkind != "IDENT":
            raise TypeSyntaxError("expected property key", kpos)
        ekind, _, epos = tokens.next()
        if ekind != "=":
            raise TypeSyntaxError("expected '=' in property annotation", epos)
        vkind, vtext, vpos = tokens.next()
        if vkind != "INT":
            raise TypeSyntaxError("expected integer property value", vpos)
        return Atom(name, (key, int(vtext)))
    if not name:
        raise TypeSyntaxError("expected atom", pos)
    return Atom(name)


def _parse_intersection(tokens: _Tokens) -> AtomSet:
    kind, value, _ = tokens.peek()
    if kind == "IDENT" and value == "omega":
        tokens.next()
        return AtomSet.empty()
    atoms = [_parse_atom(tokens)]
    while tokens.peek()[0] == "&":
        tokens.next()
        atoms.append(_parse_atom(tokens))
    return AtomSet(frozenset(atoms))
