"""Finite bounded lattices by operation tables, and the stacked M_k counterexample.

``a_n(n, k)`` has no homomorphism into a fixed lattice L once ``k`` exceeds
``max(|L|, 2)``, yet every sublattice generated by at most ``n`` elements
maps onto the two-element lattice.  So no universal sentence in ``n``
variables can separate the lattices that map into L.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

Table = tuple[tuple[int, ...], ...]


class LatticeError(ValueError):
    pass


class LatticeBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class BoundedLattice:
    size: int
    join: Table
    meet: Table
    bottom: int
    top: int
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "join", tuple(tuple(int(v) for v in r) for r in self.join))
        object.__setattr__(self, "meet", tuple(tuple(int(v) for v in r) for r in self.meet))

    def leq(self, x: int, y: int) -> bool:
        return self.meet[x][y] == x

    @property
    def universe(self) -> range:
        return range(self.size)

    def renamed(self, name: str) -> BoundedLattice:
        return BoundedLattice(self.size, self.join, self.meet, self.bottom, self.top, name)


def lattice_violations(lat: BoundedLattice) -> list[str]:
    """Every failed lattice law, as readable strings (empty when ``lat`` is a bounded lattice)."""
    n, j, m = lat.size, lat.join, lat.meet
    out: list[str] = []
    if n < 1:
        return ["empty universe"]
    if len(j) != n or len(m) != n or any(len(r) != n for r in (*j, *m)):
        return ["tables are not size x size"]
    if any(not 0 <= v < n for r in (*j, *m) for v in r):
        return ["table entry outside the universe"]
    if not (0 <= lat.bottom < n and 0 <= lat.top < n):
        return ["bounds outside the universe"]
    r = range(n)
    for x in r:
        if j[x][x] != x or m[x][x] != x:
            out.append(f"idempotence fails at {x}")
        if j[x][lat.bottom] != x or m[x][lat.top] != x:
            out.append(f"bound identity fails at {x}")
        if j[x][lat.top] != lat.top or m[x][lat.bottom] != lat.bottom:
            out.append(f"bound absorption fails at {x}")
        for y in r:
            if j[x][y] != j[y][x] or m[x][y] != m[y][x]:
                out.append(f"commutativity fails at ({x},{y})")
            if j[x][m[x][y]] != x or m[x][j[x][y]] != x:
                out.append(f"absorption fails at ({x},{y})")
            for z in r:
                if j[j[x][y]][z] != j[x][j[y][z]] or m[m[x][y]][z] != m[x][m[y][z]]:
                    out.append(f"associativity fails at ({x},{y},{z})")
    return out


def validate_lattice(lat: BoundedLattice) -> BoundedLattice:
    bad = lattice_violations(lat)
    if bad:
        raise LatticeError(f"{lat.name or 'lattice'}: {bad[0]}" + (f" (and {len(bad) - 1} more)" if len(bad) > 1 else ""))
    return lat


def from_order(size: int, leq: Sequence[Sequence[bool]], name: str = "") -> BoundedLattice:
    """Lattice from its order relation; raises if some pair lacks a join or meet."""
    def bound(x: int, y: int, upper: bool) -> int:
        cands = [z for z in range(size) if (leq[x][z] and leq[y][z] if upper else leq[z][x] and leq[z][y])]
        best = [z for z in cands if all((leq[z][w] if upper else leq[w][z]) for w in cands)]
        if len(best) != 1:
            raise LatticeError(f"no {'join' if upper else 'meet'} for ({x},{y})")
        return best[0]

    join = tuple(tuple(bound(x, y, True) for y in range(size)) for x in range(size))
    meet = tuple(tuple(bound(x, y, False) for y in range(size)) for x in range(size))
    bottom = next(z for z in range(size) if all(leq[z][w] for w in range(size)))
    top = next(z for z in range(size) if all(leq[w][z] for w in range(size)))
    return validate_lattice(BoundedLattice(size, join, meet, bottom, top, name))


def chain(n: int) -> BoundedLattice:
    if n < 1:
        raise ValueError("a chain needs at least one element")
    return from_order(n, [[x <= y for y in range(n)] for x in range(n)], name=f"C{n}")


TWO = chain(2).renamed("2")


def m_k(k: int) -> BoundedLattice:
    """Bottom 0, atoms 1..k, top k+1."""
    if k < 1:
        raise ValueError("M_k needs k >= 1")
    top = k + 1

    def le(x: int, y: int) -> bool:
        return x == y or x == 0 or y == top

    return from_order(k + 2, [[le(x, y) for y in range(k + 2)] for x in range(k + 2)], name=f"M{k}")


def stack(lower: BoundedLattice, upper: BoundedLattice) -> BoundedLattice:
    """Ordinal sum with ``lower.top`` glued to ``upper.bottom``.

    Lower elements keep their ids; the other upper elements follow in their
    original order.
    """
    rest = [u for u in upper.universe if u != upper.bottom]
    new_id = {u: lower.size + i for i, u in enumerate(rest)}
    new_id[upper.bottom] = lower.top
    size = lower.size + len(rest)
    origin: list[tuple[str, int]] = [("L", x) for x in lower.universe] + [("U", u) for u in rest]

    def op(x: int, y: int, is_join: bool) -> int:
        (px, a), (py, b) = origin[x], origin[y]
        if px == py == "L":
            return (lower.join if is_join else lower.meet)[a][b]
        if px == py == "U":
            return new_id[(upper.join if is_join else upper.meet)[a][b]]
        lo, hi = (x, y) if px == "L" else (y, x)
        return hi if is_join else lo

    join = tuple(tuple(op(x, y, True) for y in range(size)) for x in range(size))
    meet = tuple(tuple(op(x, y, False) for y in range(size)) for x in range(size))
    top = new_id[upper.top]
    name = f"{lower.name}+{upper.name}" if lower.name and upper.name else ""
    return validate_lattice(BoundedLattice(size, join, meet, lower.bottom, top, name))


def stack_many(parts: Sequence[BoundedLattice]) -> BoundedLattice:
    if not parts:
        raise ValueError("nothing to stack")
    out = parts[0]
    for p in parts[1:]:
        out = stack(out, p)
    return out


def a_n(n: int, k: int) -> BoundedLattice:
    if n < 1 or k < 1:
        raise ValueError("a_n needs n >= 1 and k >= 1")
    return stack_many([m_k(k)] * n).renamed(f"A{n}(M{k})")


def p_n(n: int) -> BoundedLattice:
    if n < 1:
        raise ValueError("p_n needs n >= 1")
    return stack_many([m_k(3)] * n).renamed(f"P{n}")


def layer_atoms(n: int, k: int) -> list[list[int]]:
    """Atom ids of each M_k layer of ``a_n(n, k)``, bottom layer first."""
    return [[layer * (k + 1) + a for a in range(1, k + 1)] for layer in range(n)]


def p_n_embedding(n: int, k: int) -> tuple[int, ...]:
    """Embedding of ``p_n(n)`` into ``a_n(n, k)`` using the first three atoms of every layer."""
    if k < 3:
        raise ValueError("need k >= 3")
    out = []
    for layer in range(n):
        base = layer * (k + 1)
        if layer == 0:
            out.append(0)
        out.extend([base + 1, base + 2, base + 3, base + k + 1])
    return tuple(out)


def is_lattice_hom(mapping: Sequence[int], source: BoundedLattice, target: BoundedLattice) -> bool:
    if len(mapping) != source.size:
        raise ValueError("map length does not match the source size")
    if mapping[source.bottom] != target.bottom or mapping[source.top] != target.top:
        return False
    for x in source.universe:
        for y in source.universe:
            if mapping[source.join[x][y]] != target.join[mapping[x]][mapping[y]]:
                return False
            if mapping[source.meet[x][y]] != target.meet[mapping[x]][mapping[y]]:
                return False
    return True


@dataclass(frozen=True)
class LatticeHom:
    source: BoundedLattice
    target: BoundedLattice
    map: tuple[int, ...]

    def is_valid(self) -> bool:
        return is_lattice_hom(self.map, self.source, self.target)

    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.size

    def is_monotone(self) -> bool:
        s = self.source
        return all(self.target.leq(self.map[x], self.map[y])
                   for x in s.universe for y in s.universe if s.leq(x, y))


def _homs(source: BoundedLattice, target: BoundedLattice, budget: int, surjective: bool):
    """Backtracking with closure propagation: fixing x and y also fixes x∨y and x∧y."""
    nodes = 0

    def extend(assign: dict[int, int], x: int, v: int) -> dict[int, int] | None:
        assign = dict(assign)
        queue = [(x, v)]
        while queue:
            a, val = queue.pop()
            if a in assign:
                if assign[a] != val:
                    return None
                continue
            assign[a] = val
            for b, w in list(assign.items()):
                queue.append((source.join[a][b], target.join[val][w]))
                queue.append((source.meet[a][b], target.meet[val][w]))
        return assign

    start = extend({}, source.bottom, target.bottom)
    start = start and extend(start, source.top, target.top)
    if start is None:
        return

    def search(assign: dict[int, int]):
        nonlocal nodes
        free = [x for x in source.universe if x not in assign]
        if not free:
            yield tuple(assign[x] for x in source.universe)
            return
        x = free[0]
        for v in target.universe:
            nodes += 1
            if nodes > budget:
                raise LatticeBudgetExceeded(f"lattice search exceeded {budget} nodes")
            nxt = extend(assign, x, v)
            if nxt is not None:
                yield from search(nxt)

    for m in search(start):
        if not surjective or len(set(m)) == target.size:
            yield m


def lattice_hom_exists(source: BoundedLattice, target: BoundedLattice,
                       budget: int = 10_000_000) -> LatticeHom | None:
    """Least bound-preserving lattice homomorphism in lexicographic order, or ``None``."""
    m = next(_homs(source, target, budget, False), None)
    return None if m is None else LatticeHom(source, target, m)


def enumerate_lattice_homs(source: BoundedLattice, target: BoundedLattice,
                           budget: int = 10_000_000) -> list[LatticeHom]:
    return [LatticeHom(source, target, m) for m in _homs(source, target, budget, False)]


def hom_onto_two(source: BoundedLattice, budget: int = 10_000_000) -> bool:
    return next(_homs(source, TWO, budget, True), None) is not None


def sublattice_generated(lat: BoundedLattice, generators: Iterable[int]) -> frozenset[int]:
    """Least subuniverse containing ``generators`` and both bounds."""
    current = {lat.bottom, lat.top}
    for g in generators:
        if not 0 <= g < lat.size:
            raise ValueError(f"generator {g} outside the universe")
        current.add(g)
    frontier = list(current)
    while frontier:
        new = set()
        for x in frontier:
            for y in list(current):
                for z in (lat.join[x][y], lat.meet[x][y]):
                    if z not in current:
                        new.add(z)
        current |= new
        frontier = list(new)
    return frozenset(current)


def sublattice(lat: BoundedLattice, subset: Iterable[int], name: str = "") -> BoundedLattice:
    """The sublattice on a closed subset, renumbered in ascending order."""
    elems = sorted(set(subset))
    index = {v: i for i, v in enumerate(elems)}
    try:
        join = tuple(tuple(index[lat.join[x][y]] for y in elems) for x in elems)
        meet = tuple(tuple(index[lat.meet[x][y]] for y in elems) for x in elems)
        bottom, top = index[lat.bottom], index[lat.top]
    except KeyError as exc:
        raise LatticeError(f"subset is not closed under the operations (missing {exc.args[0]})") from None
    return BoundedLattice(len(elems), join, meet, bottom, top, name)


def is_modular(lat: BoundedLattice) -> bool:
    j, m = lat.join, lat.meet
    r = lat.universe
    return all(j[x][m[y][z]] == m[j[x][y]][z] for x in r for z in r if lat.leq(x, z) for y in r)


def hasse_covers(lat: BoundedLattice) -> list[tuple[int, int]]:
    r = lat.universe
    return [(x, y) for x in r for y in r if x != y and lat.leq(x, y)
            and not any(z not in (x, y) and lat.leq(x, z) and lat.leq(z, y) for z in r)]


def hasse_dot(lat: BoundedLattice, highlight: Iterable[int] = ()) -> str:
    marked = set(highlight)
    lines = [f'digraph "{lat.name or "L"}" {{', "  rankdir=BT;", "  node [shape=circle];"]
    for x in lat.universe:
        style = ", style=filled" if x in marked else ""
        lines.append(f'  {x} [label="{x}"{style}];')
    for x, y in hasse_covers(lat):
        lines.append(f"  {x} -> {y} [arrowhead=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LatticeCexReport:
    n: int
    k: int
    lattice_size: int
    no_hom_into_L: bool
    generator_sets: int
    onto_two: int
    into_L: int
    first_failure: tuple[int, ...] | None

    @property
    def passed(self) -> bool:
        return self.no_hom_into_L and self.first_failure is None


def verify_lattice_cex(L: BoundedLattice, n: int, subset_cap: int = 100_000,
                 budget: int = 10_000_000) -> LatticeCexReport:
    """Both clauses for ``A = a_n(n, k)`` with ``k = max(|L|, 2) + 1``.

    Clause (2) runs over generator sets of size 1..n; the empty set
    generates only the bounds and needs no check.
    """
    if L.size < 2:
        raise ValueError("L must have at least two elements")
    if n < 1:
        raise ValueError("n must be at least 1")
    validate_lattice(L)
    k = max(L.size, 2) + 1
    A = a_n(n, k)
    count = sum(comb(A.size, r) for r in range(1, n + 1))
    if count > subset_cap:
        raise LatticeBudgetExceeded(f"{count} generator sets exceed the cap {subset_cap}")
    clause1 = lattice_hom_exists(A, L, budget) is None
    onto = into = 0
    failure = None
    for r in range(1, n + 1):
        for gens in itertools.combinations(A.universe, r):
            sub = sublattice(A, sublattice_generated(A, gens))
            ok_two = hom_onto_two(sub, budget)
            ok_l = lattice_hom_exists(sub, L, budget) is not None
            onto += ok_two
            into += ok_l
            if failure is None and not (ok_two and ok_l):
                failure = gens
    return LatticeCexReport(n, k, A.size, clause1, count, onto, into, failure)


@dataclass(frozen=True)
class WitnessReport:
    n: int
    maps_onto_two: bool
    atoms_generate: bool
    smaller_sets_checked: int
    smaller_generating: tuple[int, ...] | None


def check_witness(n: int, all_subsets: bool = False, budget: int = 10_000_000) -> WitnessReport:
    """Properties of ``p_n(n)``: does not map onto 2, and needs all ``3n`` atoms to generate it.

    By default only the (3n-1)-subsets of the atoms are tried; ``all_subsets``
    tries every (3n-1)-subset of the universe.
    """
    P = p_n(n)
    atoms = [a for layer in layer_atoms(n, 3) for a in layer]
    full = frozenset(P.universe)
    pool = P.universe if all_subsets else atoms
    checked = 0
    found = None
    for gens in itertools.combinations(pool, 3 * n - 1):
        checked += 1
        if sublattice_generated(P, gens) == full:
            found = gens
            break
    return WitnessReport(n, hom_onto_two(P, budget), sublattice_generated(P, atoms) == full, checked, found)
