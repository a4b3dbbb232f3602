"""Small named structures used throughout the tests, demos and the CLI."""

from __future__ import annotations

from .structures import RelStructure, Signature

GRAPH = Signature("graph", (("E", 2),))
UNARY = Signature("unary", (("P", 1), ("Q", 1)))


def complete_graph(n: int) -> RelStructure:
    return RelStructure(GRAPH, n, {"E": [(i, j) for i in range(n) for j in range(n) if i != j]}, name=f"K{n}")


def directed_cycle(n: int) -> RelStructure:
    return RelStructure(GRAPH, n, {"E": [(i, (i + 1) % n) for i in range(n)]}, name=f"C{n}")


def symmetric_cycle(n: int) -> RelStructure:
    edges = [(i, (i + 1) % n) for i in range(n)]
    return RelStructure(GRAPH, n, {"E": edges + [(j, i) for i, j in edges]}, name=f"SC{n}")


def symmetric_path(n: int) -> RelStructure:
    """Path on ``n`` vertices with both edge directions."""
    edges = [(i, i + 1) for i in range(n - 1)]
    return RelStructure(GRAPH, n, {"E": edges + [(j, i) for i, j in edges]}, name=f"SP{n}")


def loop() -> RelStructure:
    return RelStructure(GRAPH, 1, {"E": [(0, 0)]}, name="LOOP")


def point() -> RelStructure:
    return RelStructure(GRAPH, 1, {}, name="PT")


def empty(signature: Signature = GRAPH) -> RelStructure:
    return RelStructure(signature, 0, {}, name="EMPTY")


def p_point() -> RelStructure:
    return RelStructure(UNARY, 1, {"P": [(0,)]}, name="P-point")


def q_point() -> RelStructure:
    return RelStructure(UNARY, 1, {"Q": [(0,)]}, name="Q-point")


def unary_family() -> list[RelStructure]:
    return [p_point(), q_point()]


K2 = complete_graph(2)
K3 = complete_graph(3)
C3 = directed_cycle(3)
LOOP = loop()
PT = point()

_NAMED = {
    "k2": lambda: complete_graph(2),
    "k3": lambda: complete_graph(3),
    "k4": lambda: complete_graph(4),
    "c3": lambda: directed_cycle(3),
    "sc5": lambda: symmetric_cycle(5),
    "loop": loop,
    "pt": point,
    "p-point": p_point,
    "q-point": q_point,
}


def builtin_names() -> list[str]:
    return sorted(_NAMED) + ["unary"]


def builtin(name: str) -> list[RelStructure]:
    """Look up a named template; ``unary`` names the two-member unary family."""
    key = name.lower()
    if key == "unary":
        return unary_family()
    if key not in _NAMED:
        raise KeyError(f"unknown builtin structure {name!r}; known: {', '.join(builtin_names())}")
    return [_NAMED[key]()]
