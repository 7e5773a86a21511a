"""modsynth: synthesizes valid assemblies from catalogs of typed modular components."""

from .types import Atom, AtomSet, CombinatorType, Term, is_subtype, parse_type, typecheck
from .taxonomy import Taxonomy, merge
from .catalog import Catalog, ComponentSpec, ConnectionPoint, Frame, load_catalog, save_catalog
from .repo import Aggregate, Filter, Repository, Request
from .pipeline import solve

__all__ = [
    "Atom",
    "AtomSet",
    "CombinatorType",
    "Term",
    "is_subtype",
    "parse_type",
    "typecheck",
    "Taxonomy",
    "merge",
    "Catalog",
    "ComponentSpec",
    "ConnectionPoint",
    "Frame",
    "load_catalog",
    "save_catalog",
    "Aggregate",
    "Filter",
    "Repository",
    "Request",
    "solve",
]

__version__ = "0.1.0"
