"""Finite relational signatures, structures and homomorphisms.

Universes are always the initial segment ``{0, ..., size-1}``.  Every
construction in the package renumbers its output canonically (ascending
original order), which makes equality of structures a plain comparison of
sizes and tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

Tuple = tuple[int, ...]


class SizeBoundError(ValueError):
    """Raised when an operation would exceed a configured size bound."""


@dataclass(frozen=True)
class Signature:
    name: str
    relations: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        rels = tuple((str(r), int(a)) for r, a in self.relations)
        object.__setattr__(self, "relations", rels)
        names = [r for r, _ in rels]
        if len(set(names)) != len(names):
            raise ValueError(f"signature {self.name!r}: duplicate relation names")
        for r, a in rels:
            if a < 1:
                raise ValueError(f"signature {self.name!r}: relation {r} has arity {a}; nullary relations are not allowed")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r for r, _ in self.relations)

    def arity(self, rel: str) -> int:
        for r, a in self.relations:
            if r == rel:
                return a
        raise KeyError(f"unknown relation {rel!r} in signature {self.name!r}")

    def __contains__(self, rel: object) -> bool:
        return any(r == rel for r, _ in self.relations)

    def same_shape(self, other: Signature) -> bool:
        """Signatures are interchangeable when their relation lists agree (names may differ)."""
        return self.relations == other.relations


@dataclass(frozen=True)
class RelStructure:
    """A finite structure over ``signature`` with universe ``range(size)``.

    ``tables`` may be given as any mapping from relation name to an iterable
    of tuples; it is normalised to a tuple of frozensets in signature order.
    The constructor does not check bounds; use :func:`validate` for that.
    """

    signature: Signature
    size: int
    tables: tuple[frozenset[Tuple], ...]
    name: str = field(default="", compare=False)

    def __init__(self, signature: Signature, size: int,
                 tables: Mapping[str, Iterable[Sequence[int]]] | Sequence[Iterable[Sequence[int]]] | None = None,
                 name: str = "") -> None:
        if tables is None:
            tables = {}
        if isinstance(tables, Mapping):
            unknown = set(tables) - set(signature.names)
            if unknown:
                raise KeyError(f"relations {sorted(unknown)} not in signature {signature.name!r}")
            norm = tuple(frozenset(tuple(int(v) for v in t) for t in tables.get(r, ())) for r in signature.names)
        else:
            tables = list(tables)
            if len(tables) != len(signature.relations):
                raise ValueError("table count does not match signature")
            norm = tuple(frozenset(tuple(int(v) for v in t) for t in tab) for tab in tables)
        object.__setattr__(self, "signature", signature)
        object.__setattr__(self, "size", int(size))
        object.__setattr__(self, "tables", norm)
        object.__setattr__(self, "name", name)

    def table(self, rel: str) -> frozenset[Tuple]:
        return self.tables[self.signature.names.index(rel)]

    def items(self) -> Iterator[tuple[str, frozenset[Tuple]]]:
        return zip(self.signature.names, self.tables)

    def all_tuples(self) -> Iterator[tuple[str, Tuple]]:
        """Every ``(relation, tuple)`` pair, relations in signature order, tuples sorted."""
        for rel, tab in self.items():
            for t in sorted(tab):
                yield rel, t

    @property
    def tuple_count(self) -> int:
        return sum(len(t) for t in self.tables)

    @property
    def universe(self) -> range:
        return range(self.size)

    def renamed(self, name: str) -> RelStructure:
        return RelStructure(self.signature, self.size, self.tables, name=name)

    def __repr__(self) -> str:
        body = ", ".join(f"{r}={sorted(t)}" for r, t in self.items())
        label = f"{self.name}: " if self.name else ""
        return f"<RelStructure {label}size={self.size} {body}>"


class Violation(NamedTuple):
    relation: str
    tuple: Tuple
    reason: str

    def __str__(self) -> str:
        return f"{self.relation}{self.tuple}: {self.reason}"


def validate(structure: RelStructure) -> Violation | None:
    """Return ``None`` for a well-formed structure, else the first offending tuple."""
    if structure.size < 0:
        return Violation("", (), f"negative size {structure.size}")
    for (rel, arity), tab in zip(structure.signature.relations, structure.tables):
        for t in sorted(tab):
            if len(t) != arity:
                return Violation(rel, t, f"length {len(t)} but arity {arity}")
            for v in t:
                if not 0 <= v < structure.size:
                    return Violation(rel, t, f"entry {v} outside universe of size {structure.size}")
    return None


@dataclass(frozen=True)
class Homomorphism:
    source: RelStructure
    target: RelStructure
    map: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "map", tuple(int(v) for v in self.map))

    def __call__(self, x: int) -> int:
        return self.map[x]

    def is_valid(self) -> bool:
        return is_homomorphism(self.map, self.source, self.target)

    @property
    def image(self) -> frozenset[int]:
        return frozenset(self.map)

    def is_surjective(self) -> bool:
        return len(self.image) == self.target.size

    def compose(self, after: Homomorphism) -> Homomorphism:
        """``after`` applied to the result of ``self``."""
        return Homomorphism(self.source, after.target, tuple(after.map[v] for v in self.map))


def is_homomorphism(mapping: Sequence[int] | Mapping[int, int], source: RelStructure, target: RelStructure) -> bool:
    if isinstance(mapping, Mapping):
        if set(mapping) != set(range(source.size)):
            raise ValueError("map domain does not match the source universe")
        mapping = [mapping[i] for i in range(source.size)]
    if len(mapping) != source.size:
        raise ValueError(f"map has {len(mapping)} entries but source has size {source.size}")
    if not source.signature.same_shape(target.signature):
        raise ValueError("source and target signatures differ")
    for v in mapping:
        if not 0 <= v < target.size:
            raise ValueError(f"map value {v} outside target universe")
    for src_tab, tgt_tab in zip(source.tables, target.tables):
        for t in src_tab:
            if tuple(mapping[v] for v in t) not in tgt_tab:
                return False
    return True


def induced_substructure(structure: RelStructure, subset: Iterable[int]) -> RelStructure:
    """Substructure on ``subset``, renumbered in ascending original order."""
    elems = sorted(set(subset))
    for v in elems:
        if not 0 <= v < structure.size:
            raise ValueError(f"element {v} outside universe of size {structure.size}")
    index = {v: i for i, v in enumerate(elems)}
    tabs = [
        [tuple(index[v] for v in t) for t in tab if all(v in index for v in t)]
        for tab in structure.tables
    ]
    return RelStructure(structure.signature, len(elems), tabs)


def remove_tuple(structure: RelStructure, rel: str, t: Tuple) -> RelStructure:
    tabs = {r: (tab - {t} if r == rel else tab) for r, tab in structure.items()}
    return RelStructure(structure.signature, structure.size, tabs)


class WeakSubstructure(NamedTuple):
    elements: tuple[int, ...]
    structure: RelStructure

    def inclusion(self, parent: RelStructure) -> Homomorphism:
        return Homomorphism(self.structure, parent, self.elements)


def enumerate_proper_weak_substructures(structure: RelStructure, bound: int = 20) -> Iterator[WeakSubstructure]:
    """Every proper weak substructure, universe subsets by size then lexicographically.

    Within one universe subset the tuple subsets are produced by size and then
    lexicographically over the ``(relation index, tuple)`` order.  The guard
    ``bound`` caps ``size + tuple_count``; the number of results is exponential
    in that quantity.
    """
    if structure.size + structure.tuple_count > bound:
        raise SizeBoundError(
            f"size + tuples = {structure.size + structure.tuple_count} exceeds enumeration bound {bound}")
    full_count = structure.tuple_count
    for k in range(structure.size + 1):
        for subset in itertools.combinations(range(structure.size), k):
            members = set(subset)
            index = {v: i for i, v in enumerate(subset)}
            fitting = [(ri, t) for ri, tab in enumerate(structure.tables) for t in sorted(tab)
                       if all(v in members for v in t)]
            for m in range(len(fitting) + 1):
                for chosen in itertools.combinations(fitting, m):
                    if k == structure.size and m == full_count:
                        continue
                    tabs: list[list[Tuple]] = [[] for _ in structure.tables]
                    for ri, t in chosen:
                        tabs[ri].append(tuple(index[v] for v in t))
                    yield WeakSubstructure(subset, RelStructure(structure.signature, k, tabs))


def is_isomorphism(mapping: Sequence[int], source: RelStructure, target: RelStructure) -> bool:
    if source.size != target.size or sorted(mapping) != list(range(target.size)):
        return False
    if [len(t) for t in source.tables] != [len(t) for t in target.tables]:
        return False
    return is_homomorphism(mapping, source, target)
