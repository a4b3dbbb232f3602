"""Brute-force reference implementations, deliberately naive.

Nothing here imports the search or construction code under test except the
plain data types.
"""

from __future__ import annotations

import itertools
from collections import deque

from pinchlab.structures import RelStructure

INF = float("inf")


def all_maps(n: int, m: int):
    return itertools.product(range(m), repeat=n)


def brute_is_hom(f, a: RelStructure, b: RelStructure) -> bool:
    for ta, tb in zip(a.tables, b.tables):
        for t in ta:
            if tuple(f[v] for v in t) not in tb:
                return False
    return True


def brute_homs(a: RelStructure, b: RelStructure) -> list[tuple[int, ...]]:
    return [f for f in all_maps(a.size, b.size) if brute_is_hom(f, a, b)]


def brute_maps_into_some(s, family) -> bool:
    return any(brute_homs_exists(s, t) for t in family)


def brute_homs_exists(a, b) -> bool:
    return any(brute_is_hom(f, a, b) for f in all_maps(a.size, b.size))


def brute_pinch_classes(m: int, n: int) -> list[frozenset[tuple[int, int, int]]]:
    """Classes of the pinch equivalence by explicit union-find over the triple set."""
    triples = [(i, a, b) for i in range(n + 1) for a in range(m) for b in range(m)]
    parent = {t: t for t in triples}

    def find(t):
        while parent[t] != t:
            t = parent[t]
        return t

    for s in triples:
        for t in triples:
            same = (s[0] == t[0] == 0 and s[1] == t[1]) or (s[0] == t[0] == n and s[2] == t[2])
            if same:
                rs, rt = find(s), find(t)
                if rs != rt:
                    parent[max(rs, rt)] = min(rs, rt)
    groups: dict = {}
    for t in triples:
        groups.setdefault(find(t), set()).add(t)
    return [frozenset(g) for g in groups.values()]


def brute_pinch_tuples(template: RelStructure, n: int):
    """The pinch as (classes, set of (rel, tuple of classes)) with no numbering choices."""
    classes = brute_pinch_classes(template.size, n)
    cls = {t: c for c in classes for t in c}
    out = set()
    for (rel, arity), tab in zip(template.signature.relations, template.tables):
        for lpos in itertools.product(range(n + 1), repeat=arity):
            if not any(all(p in (j - 1, j) for p in lpos) for j in range(1, n + 1)):
                continue
            for ta in tab:
                for tb in tab:
                    out.add((rel, tuple(cls[(lpos[q], ta[q], tb[q])] for q in range(arity))))
    return classes, out


def incidence_edges(s: RelStructure):
    """Edges as (element, block) pairs, one per tuple position."""
    edges = []
    blocks = [(rel, t) for rel, tab in zip(s.signature.names, s.tables) for t in sorted(tab)]
    for bi, (_, t) in enumerate(blocks):
        for a in t:
            edges.append((a, bi))
    return blocks, edges


def brute_dist_matrix(s: RelStructure):
    """All-pairs element distance by Floyd-Warshall on the element graph where a tuple joins all its members."""
    n = s.size
    d = [[INF] * n for _ in range(n)]
    for i in range(n):
        d[i][i] = 0
    for tab in s.tables:
        for t in tab:
            for a in t:
                for b in t:
                    if a != b:
                        d[a][b] = min(d[a][b], 1)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def brute_girth(s: RelStructure):
    """Half the shortest cycle of the incidence multigraph, by removing each edge and re-running BFS."""
    blocks, edges = incidence_edges(s)
    best = INF
    for ei, (a, b) in enumerate(edges):
        adj: dict = {}
        for ej, (x, y) in enumerate(edges):
            if ej == ei:
                continue
            adj.setdefault(("e", x), []).append(("b", y))
            adj.setdefault(("b", y), []).append(("e", x))
        seen = {("e", a): 0}
        q = deque([("e", a)])
        while q:
            u = q.popleft()
            for v in adj.get(u, []):
                if v not in seen:
                    seen[v] = seen[u] + 1
                    q.append(v)
        if ("b", b) in seen:
            best = min(best, (seen[("b", b)] + 1) / 2)
    return best


def canonical_form(s: RelStructure):
    """Least relabelled table tuple over all permutations."""
    best = None
    for perm in itertools.permutations(range(s.size)):
        key = tuple(tuple(sorted(tuple(perm[v] for v in t) for t in tab)) for tab in s.tables)
        if best is None or key < best:
            best = key
    return (s.size, best)


def all_structures(signature, n):
    """Every labelled structure of size n (small n only)."""
    slots = [(ri, t) for ri, (_, ar) in enumerate(signature.relations) for t in itertools.product(range(n), repeat=ar)]
    for mask in range(1 << len(slots)):
        tabs = [[] for _ in signature.relations]
        for k, (ri, t) in enumerate(slots):
            if mask >> k & 1:
                tabs[ri].append(t)
        yield RelStructure(signature, n, tabs)


def brute_lattice_homs(src, tgt):
    out = []
    for f in all_maps(src.size, tgt.size):
        if f[src.bottom] != tgt.bottom or f[src.top] != tgt.top:
            continue
        if all(f[src.join[x][y]] == tgt.join[f[x]][f[y]] and f[src.meet[x][y]] == tgt.meet[f[x]][f[y]]
               for x in range(src.size) for y in range(src.size)):
            out.append(f)
    return out


def brute_closure(lat, gens):
    s = set(gens) | {lat.bottom, lat.top}
    while True:
        new = {lat.join[x][y] for x in s for y in s} | {lat.meet[x][y] for x in s for y in s}
        if new <= s:
            return frozenset(s)
        s |= new


def _partial_iso(a, b, pairs):
    fwd, back = {}, {}
    for x, y in pairs:
        if fwd.setdefault(x, y) != y or back.setdefault(y, x) != x:
            return False
    dom = list(fwd)
    for (_, ar), ta, tb in zip(a.signature.relations, a.tables, b.tables):
        for t in itertools.product(dom, repeat=ar):
            if (t in ta) != (tuple(fwd[v] for v in t) in tb):
                return False
    return True


def brute_game(a, b, k, pairs=()):
    """Duplicator wins the k-round game from ``pairs``; plain recursion, no memo."""
    if k == 0:
        return True
    for x in range(a.size):
        if not any(_partial_iso(a, b, pairs + ((x, y),)) and brute_game(a, b, k - 1, pairs + ((x, y),))
                   for y in range(b.size)):
            return False
    for y in range(b.size):
        if not any(_partial_iso(a, b, pairs + ((x, y),)) and brute_game(a, b, k - 1, pairs + ((x, y),))
                   for x in range(a.size)):
            return False
    return True


def one_round_types(s):
    """Atomic type of each single element: which relations hold on its constant tuple."""
    return {tuple((x,) * ar in tab for (_, ar), tab in zip(s.signature.relations, s.tables)) for x in range(s.size)}
