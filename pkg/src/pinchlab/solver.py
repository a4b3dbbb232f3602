"""Backtracking homomorphism search with generalised arc consistency.

Variables are the source elements, visited in ascending order; values are
tried in ascending order.  The first solution found is therefore the
lexicographically least homomorphism, and that is part of the contract.
Connected components of the source are independent sub-problems, so
``find_hom`` solves them separately (optionally in worker processes) and
glues the per-component least solutions, which is again the global least.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

from .structures import Homomorphism, RelStructure

class BudgetExceeded(RuntimeError):
    """The node budget ran out before the search was decided."""


class EnumerationCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    node_budget: int = 10_000_000
    enumeration_cap: int = 1_000_000
    parallel: bool = False
    workers: int | None = None

    def __post_init__(self) -> None:
        if self.node_budget < 1 or self.enumeration_cap < 1:
            raise ValueError("search budgets must be positive")


DEFAULT = SearchConfig()


@dataclass
class SearchStats:
    nodes: int = 0


def _check_shapes(source: RelStructure, target: RelStructure) -> None:
    if not source.signature.same_shape(target.signature):
        raise ValueError(
            f"signatures differ: {source.signature.relations} vs {target.signature.relations}")


class _Problem:
    """CSP instance restricted to a chosen set of source variables."""

    def __init__(self, source: RelStructure, target: RelStructure, variables: Sequence[int]):
        self.variables = list(variables)
        self.nvals = target.size
        self.full = (1 << target.size) - 1
        members = set(self.variables)
        self.constraints: list[tuple[Sequence[tuple[int, ...]], tuple[int, ...]]] = []
        self.watch: dict[int, list[int]] = {v: [] for v in self.variables}
        target_tabs = [sorted(tab) for tab in target.tables]
        for ri, tab in enumerate(source.tables):
            for t in sorted(tab):
                if t[0] not in members:
                    continue
                ci = len(self.constraints)
                self.constraints.append((target_tabs[ri], t))
                for v in set(t):
                    self.watch[v].append(ci)

    def revise(self, ci: int, dom: dict[int, int]) -> list[int] | None:
        """Prune unsupported values of one constraint; return changed variables, ``None`` on wipe-out."""
        cands, t = self.constraints[ci]
        support = dict.fromkeys(t, 0)
        for s in cands:
            seen: dict[int, int] = {}
            ok = True
            for var, val in zip(t, s):
                if not (dom[var] >> val) & 1:
                    ok = False
                    break
                prev = seen.setdefault(var, val)
                if prev != val:
                    ok = False
                    break
            if ok:
                for var, val in seen.items():
                    support[var] |= 1 << val
        changed = []
        for var, sup in support.items():
            new = dom[var] & sup
            if new == 0:
                return None
            if new != dom[var]:
                dom[var] = new
                changed.append(var)
        return changed

    def propagate(self, dom: dict[int, int], queue: list[int]) -> bool:
        pending = set(queue)
        queue = list(queue)
        while queue:
            ci = queue.pop()
            pending.discard(ci)
            changed = self.revise(ci, dom)
            if changed is None:
                return False
            for var in changed:
                for cj in self.watch[var]:
                    if cj != ci and cj not in pending:
                        pending.add(cj)
                        queue.append(cj)
        return True

    def solutions(self, stats: SearchStats, budget: int, surjective: bool = False) -> Iterator[dict[int, int]]:
        dom = {v: self.full for v in self.variables}
        if self.nvals == 0 and self.variables:
            return
        if not self.propagate(dom, list(range(len(self.constraints)))):
            return
        yield from self._search(0, dom, stats, budget, surjective)

    def _search(self, depth: int, dom: dict[int, int], stats: SearchStats, budget: int,
                surjective: bool) -> Iterator[dict[int, int]]:
        if depth == len(self.variables):
            yield {v: dom[v].bit_length() - 1 for v in self.variables}
            return
        var = self.variables[depth]
        d = dom[var]
        val = 0
        while d >> val:
            if (d >> val) & 1:
                stats.nodes += 1
                if stats.nodes > budget:
                    raise BudgetExceeded(f"node budget {budget} exhausted")
                child = dict(dom)
                child[var] = 1 << val
                if self.propagate(child, self.watch[var]) and (
                        not surjective or self._can_cover(child, depth + 1)):
                    yield from self._search(depth + 1, child, stats, budget, surjective)
            val += 1

    def _can_cover(self, dom: dict[int, int], depth: int) -> bool:
        hit = 0
        for v in self.variables[:depth]:
            hit |= dom[v]
        missing = bin(self.full & ~hit).count("1")
        if missing == 0:
            return True
        rest = self.variables[depth:]
        if missing > len(rest):
            return False
        reach = 0
        for v in rest:
            reach |= dom[v]
        return (self.full & ~hit & ~reach) == 0


def components(structure: RelStructure) -> list[list[int]]:
    """Connected components of the Gaifman graph, each sorted, ordered by least element."""
    parent = list(range(structure.size))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for tab in structure.tables:
        for t in tab:
            r0 = find(t[0])
            for v in t[1:]:
                rv = find(v)
                if rv != r0:
                    parent[max(rv, r0)] = min(rv, r0)
                    r0 = min(rv, r0)
    groups: dict[int, list[int]] = {}
    for v in range(structure.size):
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values(), key=lambda g: g[0])


def _solve_component(source: RelStructure, target: RelStructure, comp: list[int],
                     budget: int) -> tuple[dict[int, int] | None, int]:
    stats = SearchStats()
    sol = next(_Problem(source, target, comp).solutions(stats, budget), None)
    return sol, stats.nodes


def _solve_job(job: tuple[RelStructure, RelStructure, list[int], int]) -> tuple[dict[int, int] | None, int]:
    return _solve_component(*job)


def find_hom(source: RelStructure, target: RelStructure, config: SearchConfig = DEFAULT,
             stats: SearchStats | None = None) -> Homomorphism | None:
    """Lexicographically least homomorphism ``source -> target``, or ``None``.

    Raises :class:`BudgetExceeded` when the node budget runs out; that is
    never reported as ``None``.
    """
    _check_shapes(source, target)
    stats = stats if stats is not None else SearchStats()
    comps = components(source)
    mapping = [0] * source.size
    if config.parallel and len(comps) > 1:
        jobs = [(source, target, c, config.node_budget) for c in comps]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_solve_job, jobs))
    else:
        results = []
        for c in comps:
            remaining = config.node_budget - stats.nodes - sum(n for _, n in results)
            results.append(_solve_component(source, target, c, remaining))
            if results[-1][0] is None:
                break
    for sol, nodes in results:
        stats.nodes += nodes
    if stats.nodes > config.node_budget:
        raise BudgetExceeded(f"node budget {config.node_budget} exhausted")
    for sol, _ in results:
        if sol is None:
            return None
        for v, val in sol.items():
            mapping[v] = val
    return Homomorphism(source, target, mapping)


def csp_member(instance: RelStructure, template: RelStructure, config: SearchConfig = DEFAULT) -> bool:
    return find_hom(instance, template, config) is not None


def enumerate_homs(source: RelStructure, target: RelStructure, config: SearchConfig = DEFAULT) -> list[Homomorphism]:
    """All homomorphisms in lexicographic order; raises once the count exceeds the cap."""
    _check_shapes(source, target)
    problem = _Problem(source, target, range(source.size))
    out = []
    for sol in problem.solutions(SearchStats(), config.node_budget):
        if len(out) >= config.enumeration_cap:
            raise EnumerationCapExceeded(f"more than {config.enumeration_cap} homomorphisms")
        out.append(Homomorphism(source, target, [sol[v] for v in range(source.size)]))
    return out


def find_surjective_hom(source: RelStructure, target: RelStructure,
                        config: SearchConfig = DEFAULT) -> Homomorphism | None:
    _check_shapes(source, target)
    if target.size > source.size:
        return None
    problem = _Problem(source, target, range(source.size))
    for sol in problem.solutions(SearchStats(), config.node_budget, surjective=True):
        mapping = [sol[v] for v in range(source.size)]
        if len(set(mapping)) == target.size:
            return Homomorphism(source, target, mapping)
    return None


def is_hom_independent(family: Sequence[RelStructure], config: SearchConfig = DEFAULT) -> bool:
    for i, a in enumerate(family):
        for j, b in enumerate(family):
            if i != j and find_hom(a, b, config) is not None:
                return False
    return True


def maps_into_some(structure: RelStructure, family: Sequence[RelStructure], config: SearchConfig = DEFAULT) -> bool:
    return any(find_hom(structure, member, config) is not None for member in family)
