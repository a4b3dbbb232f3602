"""Structure algebra, the n-link / n-pinch family, and incidence metrics."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .structures import Homomorphism, RelStructure, Signature, SizeBoundError, Tuple, induced_substructure

INF = math.inf
ExtendedNat = int | float  # a non-negative int or math.inf

DEFAULT_SIZE_BOUND = 5000


def _common_signature(parts: Sequence[RelStructure]) -> Signature:
    sig = parts[0].signature
    for p in parts[1:]:
        if not p.signature.same_shape(sig):
            raise ValueError("structures do not share a signature")
    return sig


def disjoint_union(parts: Sequence[RelStructure], signature: Signature | None = None) -> tuple[RelStructure, list[int]]:
    """Concatenate universes; returns the union and the offset of each part."""
    if not parts:
        if signature is None:
            from .catalog import GRAPH
            signature = GRAPH
        return RelStructure(signature, 0, {}), []
    sig = _common_signature(parts)
    offsets, tabs, total = [], [[] for _ in sig.relations], 0
    for p in parts:
        offsets.append(total)
        for ri, tab in enumerate(p.tables):
            tabs[ri].extend(tuple(v + total for v in t) for t in tab)
        total += p.size
    return RelStructure(sig, total, tabs), offsets


def direct_product(factors: Sequence[RelStructure], size_bound: int = DEFAULT_SIZE_BOUND) -> RelStructure:
    """Cartesian product with row-major numbering (last factor varies fastest)."""
    sig = _common_signature(factors)
    size = math.prod(f.size for f in factors)
    if size > size_bound:
        raise SizeBoundError(f"product has {size} elements, bound is {size_bound}")
    strides = []
    s = 1
    for f in reversed(factors):
        strides.append(s)
        s *= f.size
    strides.reverse()
    tabs = []
    for ri in range(len(sig.relations)):
        combined = set()
        for choice in itertools.product(*(sorted(f.tables[ri]) for f in factors)):
            combined.add(tuple(sum(stride * t[pos] for stride, t in zip(strides, choice))
                               for pos in range(sig.relations[ri][1])))
        tabs.append(combined)
    return RelStructure(sig, size, tabs)


def product_coordinates(index: int, sizes: Sequence[int]) -> tuple[int, ...]:
    coords = []
    for s in reversed(sizes):
        index, r = divmod(index, s)
        coords.append(r)
    return tuple(reversed(coords))


def quotient(structure: RelStructure, partition: Sequence[Sequence[int]]) -> tuple[RelStructure, tuple[int, ...]]:
    """Quotient by a partition; classes numbered by least member.

    The quotient relation is the image of the original one under the class
    map.  Returns the quotient and the class map.
    """
    class_map = [-1] * structure.size
    blocks = sorted((sorted(b) for b in partition if b), key=lambda b: b[0])
    if sum(len(b) for b in blocks) != structure.size:
        raise ValueError("partition does not cover the universe exactly")
    for ci, block in enumerate(blocks):
        for v in block:
            if not 0 <= v < structure.size or class_map[v] != -1:
                raise ValueError(f"invalid partition at element {v}")
            class_map[v] = ci
    tabs = [{tuple(class_map[v] for v in t) for t in tab} for tab in structure.tables]
    return RelStructure(structure.signature, len(blocks), tabs), tuple(class_map)


def n_link(signature: Signature, n: int) -> RelStructure:
    if n < 0:
        raise ValueError("n must be non-negative")
    tabs = []
    for _, arity in signature.relations:
        tab = set()
        for j in range(1, n + 1):
            tab.update(itertools.product((j - 1, j), repeat=arity))
        tabs.append(tab)
    return RelStructure(signature, n + 1, tabs, name=f"L{n}")


class ClassLabel(NamedTuple):
    """Position and template coordinates of a pinch element.

    At position 0 only ``a`` is meaningful (``b`` is ``None``); at position n
    only ``b`` is.
    """
    iota: int
    a: int | None
    b: int | None


@dataclass(frozen=True)
class PinchedStructure:
    underlying: RelStructure
    n: int
    template: RelStructure
    classes: tuple[frozenset[tuple[int, int, int]], ...]
    iota: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.underlying.size

    def label(self, e: int) -> ClassLabel:
        i = self.iota[e]
        _, a, b = min(self.classes[e])
        if i == 0:
            return ClassLabel(0, a, None)
        if i == self.n:
            return ClassLabel(i, None, b)
        return ClassLabel(i, a, b)

    def element(self, i: int, a: int, b: int) -> int:
        """Class of the triple ``(i, a, b)``."""
        m = self.template.size
        return self._index[(i * m + a) * m + b]

    @property
    def _index(self) -> tuple[int, ...]:
        cached = self.__dict__.get("_class_of")
        if cached is None:
            m = self.template.size
            cached = [0] * ((self.n + 1) * m * m)
            for e, cls in enumerate(self.classes):
                for i, a, b in cls:
                    cached[(i * m + a) * m + b] = e
            cached = tuple(cached)
            object.__setattr__(self, "_class_of", cached)
        return cached


def pinch_partition(n: int, m: int) -> list[list[int]]:
    """Classes of the pinch equivalence on row-major indices of ``{0..n} x m x m``."""
    def idx(i: int, a: int, b: int) -> int:
        return (i * m + a) * m + b

    blocks = [[idx(0, a, b) for b in range(m)] for a in range(m)]
    for i in range(1, n):
        blocks.extend([idx(i, a, b)] for a in range(m) for b in range(m))
    blocks.extend([idx(n, a, b) for a in range(m)] for b in range(m))
    return blocks


def n_pinch(template: RelStructure, n: int, size_bound: int = DEFAULT_SIZE_BOUND) -> PinchedStructure:
    """The quotient of ``L_n x A x A`` that glues the two ends onto copies of ``A``."""
    if n < 1:
        raise ValueError("pinches need n >= 1")
    m = template.size
    if (n + 1) * m * m > size_bound:
        raise SizeBoundError(f"pinch product has {(n + 1) * m * m} elements, bound is {size_bound}")
    link = n_link(template.signature, n)
    prod = direct_product([link, template, template], size_bound=size_bound)
    q, class_map = quotient(prod, pinch_partition(n, m))
    members: list[set[tuple[int, int, int]]] = [set() for _ in range(q.size)]
    for idx, c in enumerate(class_map):
        members[c].add(product_coordinates(idx, (n + 1, m, m)))
    classes = tuple(frozenset(s) for s in members)
    iota = tuple(next(iter(s))[0] for s in classes)
    name = f"P{n}({template.name})" if template.name else f"P{n}"
    return PinchedStructure(q.renamed(name), n, template, classes, iota)


class ElementTrace(NamedTuple):
    pinch_element: int
    iota: int
    a: int | None
    b: int | None
    in_slice: bool


@dataclass(frozen=True)
class PinchSide:
    """``B_R`` or ``B_L``: the pinch with one end pinch removed."""
    side: str
    structure: RelStructure
    trace: tuple[ElementTrace, ...]
    pinch: PinchedStructure

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(t.pinch_element for t in self.trace)


def _side(p: PinchedStructure, side: str) -> PinchSide:
    dropped = 0 if side == "R" else p.n
    slice_at = 1 if side == "R" else p.n - 1
    keep = [e for e in range(p.size) if p.iota[e] != dropped]
    sub = induced_substructure(p.underlying, keep)
    base = p.underlying.name or "P"
    trace = tuple(ElementTrace(e, *p.label(e), in_slice=p.iota[e] == slice_at) for e in keep)
    return PinchSide(side, sub.renamed(f"B{side}[{base}]"), trace, p)


def b_right(p: PinchedStructure) -> PinchSide:
    return _side(p, "R")


def b_left(p: PinchedStructure) -> PinchSide:
    return _side(p, "L")


def swap_correspondence(p: PinchedStructure) -> tuple[int, ...]:
    """Map from ``B_L`` elements to ``B_R`` elements induced by ``(i, a, b) -> (n-i, b, a)``."""
    left, right = b_left(p), b_right(p)
    pos_in_right = {e: k for k, e in enumerate(right.elements)}
    out = []
    for e in left.elements:
        i, a, b = min(p.classes[e])
        out.append(pos_in_right[p.element(p.n - i, b, a)])
    return tuple(out)


def pinch_projection_hom(p: PinchedStructure, side: str) -> Homomorphism:
    """Class-to-coordinate map: ``b`` on ``B_R``, ``a`` on ``B_L``."""
    if side not in ("R", "L"):
        raise ValueError("side must be 'R' or 'L'")
    part = _side(p, side)
    coords = [t.b if side == "R" else t.a for t in part.trace]
    return Homomorphism(part.structure, p.template, coords)


def pinch_collapse_hom(template: RelStructure, n: int, size_bound: int = DEFAULT_SIZE_BOUND) -> Homomorphism:
    """Surjection ``P_{n+1}(A) -> P_n(A)`` sending the last position onto position n."""
    big = n_pinch(template, n + 1, size_bound)
    small = n_pinch(template, n, size_bound)
    mapping = []
    for cls in big.classes:
        images = {small.element(min(i, n), a, b) for i, a, b in cls}
        if len(images) != 1:
            raise AssertionError("collapse map is not well defined on a class")
        mapping.append(images.pop())
    return Homomorphism(big.underlying, small.underlying, mapping)


@dataclass(frozen=True)
class IncidenceGraph:
    n_elements: int
    blocks: tuple[tuple[str, Tuple], ...]
    edges: tuple[tuple[int, int, int], ...]  # (element, position k starting at 1, block index)

    def adjacency(self) -> list[list[int]]:
        """Vertex-level adjacency lists; block ``j`` is vertex ``n_elements + j``.  Parallel edges repeat."""
        adj: list[list[int]] = [[] for _ in range(self.n_elements + len(self.blocks))]
        for a, _, j in self.edges:
            adj[a].append(self.n_elements + j)
            adj[self.n_elements + j].append(a)
        return adj

    def to_dot(self, name: str = "Inc") -> str:
        lines = [f"graph {_dot_id(name)} {{"]
        for a in range(self.n_elements):
            lines.append(f'  e{a} [shape=circle, label="{a}"];')
        for j, (rel, t) in enumerate(self.blocks):
            lines.append(f'  b{j} [shape=box, label="{rel}({",".join(map(str, t))})"];')
        for a, k, j in self.edges:
            lines.append(f'  e{a} -- b{j} [label="{k}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_id(name: str) -> str:
    return '"' + name.replace('"', "'") + '"'


def incidence(structure: RelStructure) -> IncidenceGraph:
    blocks = tuple(structure.all_tuples())
    edges = tuple((a, k + 1, j) for j, (_, t) in enumerate(blocks) for k, a in enumerate(t))
    return IncidenceGraph(structure.size, blocks, edges)


def _bfs(adj: list[list[int]], root: int) -> list[ExtendedNat]:
    dist: list[ExtendedNat] = [INF] * len(adj)
    dist[root] = 0
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] == INF:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def distances_from(structure: RelStructure, u: int, graph: IncidenceGraph | None = None) -> list[ExtendedNat]:
    """Incidence distance from ``u`` to every element."""
    if not 0 <= u < structure.size:
        raise ValueError(f"element {u} outside universe")
    graph = graph or incidence(structure)
    raw = _bfs(graph.adjacency(), u)[:structure.size]
    out: list[ExtendedNat] = []
    for d in raw:
        if d == INF:
            out.append(INF)
        else:
            assert d % 2 == 0, "element-to-element path of odd length in a bipartite graph"
            out.append(d // 2)
    return out


def dist(structure: RelStructure, u: int, v: int) -> ExtendedNat:
    return distances_from(structure, u)[v]


def girth(structure: RelStructure) -> ExtendedNat:
    """Half the length of a shortest cycle of the incidence multigraph; ``INF`` if acyclic."""
    for _, t in structure.all_tuples():
        if len(set(t)) < len(t):
            return 1
    adj = incidence(structure).adjacency()
    best: ExtendedNat = INF
    for root in range(len(adj)):
        depth = [-1] * len(adj)
        parent = [-1] * len(adj)
        depth[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * depth[u] + 1 >= best:
                break
            for w in adj[u]:
                if depth[w] == -1:
                    depth[w] = depth[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif w != parent[u]:
                    best = min(best, depth[u] + depth[w] + 1)
    if best == INF:
        return INF
    assert best % 2 == 0, "odd cycle in a bipartite incidence graph"
    return best // 2


def diameter(structure: RelStructure) -> ExtendedNat:
    """Largest incidence distance over ordered pairs; ``INF`` when disconnected, 0 when empty."""
    if structure.size == 0:
        return 0
    graph = incidence(structure)
    best: ExtendedNat = 0
    for u in range(structure.size):
        best = max(best, max(distances_from(structure, u, graph)))
        if best == INF:
            return INF
    return best
