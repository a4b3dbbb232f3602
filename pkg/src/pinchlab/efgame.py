"""Ehrenfeucht-Fraisse game boards built from pinches, and the Duplicator strategy.

``G = P_n' ⊔ H`` and ``H = (k+1) × (B_R ⊔ B_L)`` with ``n' = 2^(k+1) + 2``.
Every board element remembers its block, the block kind, its position
``iota`` and its template coordinates, which is all the strategy looks at.
The strategy is checked move by move against partial isomorphism and the
seven distance conditions; either may fail, and failures are reported.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .constructions import (
    DEFAULT_SIZE_BOUND,
    INF,
    ClassLabel,
    ExtendedNat,
    b_left,
    b_right,
    disjoint_union,
    n_pinch,
)
from .solver import is_hom_independent
from .structures import RelStructure, SizeBoundError


class BlockKind(Enum):
    PINCH = "PINCH"
    BR = "BR"
    BL = "BL"
    EXTRA_TEMPLATE = "EXTRA_TEMPLATE"


LANDMARKS = ("left_pinch", "right_pinch", "left_slice", "right_slice")
# which block kind carries each landmark in H; answers to moves near a landmark go there
_HOME = {"left_pinch": BlockKind.BL, "left_slice": BlockKind.BL,
         "right_pinch": BlockKind.BR, "right_slice": BlockKind.BR}


@dataclass(frozen=True)
class Block:
    id: int
    kind: BlockKind
    offset: int
    size: int
    landmarks: dict[str, tuple[int, ...]]
    extended: dict[str, tuple[int, ...]]
    lookup: dict[ClassLabel, int] = field(repr=False)

    @property
    def elements(self) -> range:
        return range(self.offset, self.offset + self.size)


@dataclass(frozen=True)
class Board:
    """A tagged disjoint union of block components."""
    name: str
    structure: RelStructure
    n: int
    blocks: tuple[Block, ...]
    block_of: tuple[int, ...]
    iota: tuple[int, ...]
    label: tuple[ClassLabel, ...]

    @property
    def size(self) -> int:
        return self.structure.size

    def kind(self, e: int) -> BlockKind:
        return self.blocks[self.block_of[e]].kind

    def landmark_distance(self, e: int, which: str, extended: bool = False) -> ExtendedNat:
        blk = self.blocks[self.block_of[e]]
        layers = (blk.extended if extended else blk.landmarks).get(which, ())
        if not layers:
            return INF
        return min(abs(self.iota[e] - t) for t in layers)

    def describe(self, e: int) -> str:
        return f"{e}({self.block_of[e]},{self.kind(e).value},{self.iota[e]})"

    def census(self) -> dict[str, int]:
        out = {k.value: 0 for k in BlockKind}
        for b in self.blocks:
            out[b.kind.value] += 1
        return out


def _landmarks(kind: BlockKind, n: int) -> tuple[dict[str, tuple[int, ...]], dict[str, tuple[int, ...]]]:
    if kind is BlockKind.PINCH:
        primary = {"left_pinch": (0,), "right_pinch": (n,)}
        return primary, {**primary, "right_slice": (1,), "left_slice": (n - 1,)}
    if kind is BlockKind.BR:
        primary = {"right_pinch": (n,), "right_slice": (1,)}
    elif kind is BlockKind.BL:
        primary = {"left_pinch": (0,), "left_slice": (n - 1,)}
    else:
        primary = {}
    return primary, dict(primary)


def assemble_board(name: str, parts: Sequence[tuple[BlockKind, RelStructure, Sequence[ClassLabel]]],
                   n: int) -> Board:
    """Disjoint union of labelled blocks, in the order given."""
    union, offsets = disjoint_union([p for _, p, _ in parts])
    blocks, block_of, iota, label = [], [], [], []
    for bid, ((kind, part, labels), off) in enumerate(zip(parts, offsets)):
        if len(labels) != part.size:
            raise ValueError("one label per block element is required")
        primary, extended = _landmarks(kind, n)
        lookup = {lab: off + i for i, lab in enumerate(labels)}
        blocks.append(Block(bid, kind, off, part.size, primary, extended, lookup))
        block_of.extend([bid] * part.size)
        iota.extend(lab.iota for lab in labels)
        label.extend(labels)
    return Board(name, union.renamed(name), n, tuple(blocks), tuple(block_of), tuple(iota), tuple(label))


def board_from_structure(name: str, s: RelStructure) -> Board:
    """A board made of a single template-copy block; iota is 0 throughout."""
    return assemble_board(name, [(BlockKind.EXTRA_TEMPLATE, s, [ClassLabel(0, a, None) for a in range(s.size)])], 0)


def n_prime(k: int) -> int:
    if k < 0:
        raise ValueError("k must be non-negative")
    return 2 ** (k + 1) + 2


def _board_parts(template: RelStructure, k: int, size_bound: int):
    n = n_prime(k)
    p = n_pinch(template, n, size_bound)
    br, bl = b_right(p), b_left(p)
    pinch_part = (BlockKind.PINCH, p.underlying, [p.label(e) for e in range(p.size)])
    br_part = (BlockKind.BR, br.structure, [ClassLabel(t.iota, t.a, t.b) for t in br.trace])
    bl_part = (BlockKind.BL, bl.structure, [ClassLabel(t.iota, t.a, t.b) for t in bl.trace])
    h_parts = [br_part, bl_part] * (k + 1)
    return n, pinch_part, h_parts


def build_boards(template: RelStructure, k: int, size_bound: int = DEFAULT_SIZE_BOUND) -> tuple[Board, Board]:
    n, pinch_part, h_parts = _board_parts(template, k, size_bound)
    g_size = pinch_part[1].size + sum(p.size for _, p, _ in h_parts)
    if g_size > size_bound:
        raise SizeBoundError(f"board G would have {g_size} elements, bound {size_bound}")
    return (assemble_board(f"G{k}", [pinch_part, *h_parts], n),
            assemble_board(f"H{k}", h_parts, n))


def build_boards_colour(family: Sequence[RelStructure], j: int, k: int,
                        size_bound: int = DEFAULT_SIZE_BOUND) -> tuple[Board, Board]:
    """Boards over ``family[j]`` with one extra copy of that template in both."""
    if not is_hom_independent(family):
        raise ValueError("family is not homomorphism-independent")
    if not 0 <= j < len(family):
        raise IndexError(f"template index {j} out of range")
    a = family[j]
    n, pinch_part, h_parts = _board_parts(a, k, size_bound)
    extra = (BlockKind.EXTRA_TEMPLATE, a, [ClassLabel(0, x, None) for x in range(a.size)])
    h_all = [extra, *h_parts]
    g_size = pinch_part[1].size + sum(p.size for _, p, _ in h_all)
    if g_size > size_bound:
        raise SizeBoundError(f"board G would have {g_size} elements, bound {size_bound}")
    return (assemble_board(f"G{k}[{a.name}]", [pinch_part, *h_all], n),
            assemble_board(f"H{k}[{a.name}]", h_all, n))


def board_distance(board: Board, x: int, y: int) -> ExtendedNat:
    if board.block_of[x] != board.block_of[y]:
        return INF
    return abs(board.iota[x] - board.iota[y])


def large_threshold(k: int, i: int) -> int:
    """Distances at round ``i`` of a ``k``-round game count as large from ``2^(k-i+1)`` on."""
    return 2 ** (k - i + 1)


@dataclass(frozen=True)
class Move:
    board: str  # "G" or "H"
    element: int


@dataclass
class GameState:
    G: Board
    H: Board
    k: int
    history: list[tuple[int, int]] = field(default_factory=list)

    @property
    def round(self) -> int:
        return len(self.history)

    def board(self, side: str) -> Board:
        return self.G if side == "G" else self.H

    def played(self, side: str) -> list[int]:
        ix = 0 if side == "G" else 1
        return [p[ix] for p in self.history]

    def copy(self) -> GameState:
        return GameState(self.G, self.H, self.k, list(self.history))


def pairs_partial_isomorphism(G: Board | RelStructure, H: Board | RelStructure,
                              pairs: Sequence[tuple[int, int]]) -> bool:
    gs = G.structure if isinstance(G, Board) else G
    hs = H.structure if isinstance(H, Board) else H
    fwd: dict[int, int] = {}
    back: dict[int, int] = {}
    for g, h in pairs:
        if fwd.setdefault(g, h) != h or back.setdefault(h, g) != g:
            return False
    dom = list(fwd)
    for (_, arity), gt, ht in zip(gs.signature.relations, gs.tables, hs.tables):
        for t in itertools.product(dom, repeat=arity):
            if (t in gt) != (tuple(fwd[v] for v in t) in ht):
                return False
    return True


def is_partial_isomorphism(state: GameState) -> bool:
    return pairs_partial_isomorphism(state.G, state.H, state.history)


class StrategyFailure(RuntimeError):
    """No element satisfies the requirements of the strategy case that applies."""


@dataclass(frozen=True)
class Response:
    element: int
    case: str


def _place(target: Board, block: Block, src: ClassLabel, t: int) -> int:
    n = target.n
    if src.a is None or src.b is None:
        if src.a is None and t != n or src.b is None and t != 0:
            raise StrategyFailure(f"pinch class {src} cannot be placed at position {t}")
    elif t in (0, n) and block.kind is not BlockKind.EXTRA_TEMPLATE:
        raise StrategyFailure(f"middle class {src} would land on a pinch at position {t}")
    key = ClassLabel(t, src.a if t != n else None, src.b if t != 0 else None)
    e = block.lookup.get(key)
    if e is None:
        raise StrategyFailure(f"block {block.id} ({block.kind.value}) has no element {key}")
    return e


def _middle(block: Block) -> int:
    # midpoint between the block's landmarks; ties go to the smaller position
    layers = [t for v in block.landmarks.values() for t in v]
    lo, hi = min(layers), max(layers)
    return (lo + hi) // 2


def duplicator_response(state: GameState, move: Move) -> Response:
    """The strategy's answer to ``move``; raises :class:`StrategyFailure`."""
    side, x = move.board, move.element
    other = "H" if side == "G" else "G"
    X, Y = state.board(side), state.board(other)
    mine, theirs = state.played(side), state.played(other)
    i = state.round
    if i >= state.k:
        raise ValueError("the game is over")
    if x in mine:
        return Response(theirs[mine.index(x)], "repeat")
    bx = X.blocks[X.block_of[x]]
    if bx.kind is BlockKind.EXTRA_TEMPLATE:
        ext = [b for b in Y.blocks if b.kind is BlockKind.EXTRA_TEMPLATE]
        if not ext or x - bx.offset >= ext[0].size:
            raise StrategyFailure("no corresponding element in an extra template copy")
        return Response(ext[0].offset + (x - bx.offset), "extra")
    # a move counts as close when it is within 2^(k-(i+1)+1) of something
    t_next = 2 ** (state.k - i)
    near = [(board_distance(X, x, p), l) for l, p in enumerate(mine) if board_distance(X, x, p) < t_next]
    if near:
        _, l = min(near)
        anchor, partner = mine[l], theirs[l]
        blk = Y.blocks[Y.block_of[partner]]
        t = Y.iota[partner] + (X.iota[x] - X.iota[anchor])
        return Response(_place(Y, blk, X.label[x], t), "2")
    close = [(X.landmark_distance(x, w), r, w) for r, w in enumerate(LANDMARKS)
             if X.landmark_distance(x, w) < t_next]
    used = {Y.block_of[p] for p in theirs}
    if close:
        _, _, which = min(close)
        want = _HOME[which]
        for blk in Y.blocks:
            if blk.kind is want and blk.id not in used:
                return Response(_place(Y, blk, X.label[x], X.iota[x]), "1b")
        raise StrategyFailure(f"no unplayed {want.value} block left")
    for blk in Y.blocks:
        if blk.kind in (BlockKind.BR, BlockKind.BL) and blk.id not in used:
            return Response(_place(Y, blk, X.label[x], _middle(blk)), "1a")
    raise StrategyFailure("no unplayed BR or BL block left")


def check_conditions(state: GameState, extended: bool = False) -> str | None:
    """First violated condition among (1)-(7) for the current round, else ``None``."""
    thr = large_threshold(state.k, state.round)
    for first, second, tag in ((state.G, state.H, ""), (state.H, state.G, " dual")):
        a = state.played("G" if first is state.G else "H")
        b = state.played("H" if first is state.G else "G")
        for l, j in itertools.product(range(len(a)), repeat=2):
            d = board_distance(first, a[l], a[j])
            e = board_distance(second, b[l], b[j])
            if d < thr and e != d:
                return f"(1){tag}: d({a[l]},{a[j]}) = {d} but partner distance {e}"
            if d >= thr and e < thr:
                return f"(2){tag}: d({a[l]},{a[j]}) = {d} but partner distance {e}"
        for num, which in zip((3, 4, 5, 6), LANDMARKS):
            for j in range(len(a)):
                d = first.landmark_distance(a[j], which, extended)
                if d < thr and second.landmark_distance(b[j], which, extended) != d:
                    return f"({num}){tag}: element {a[j]} at {d} from {which}"
    return None


@dataclass(frozen=True)
class Round:
    spoiler: Move
    duplicator: int
    case: str


@dataclass(frozen=True)
class Transcript:
    G: Board
    H: Board
    rounds: tuple[Round, ...]
    verdict: str

    def dump(self) -> str:
        lines = []
        for i, r in enumerate(self.rounds, 1):
            here = self.G if r.spoiler.board == "G" else self.H
            there = self.H if r.spoiler.board == "G" else self.G
            lines.append(f"{i}: S@{r.spoiler.board}:{here.describe(r.spoiler.element)} "
                         f"D:{there.describe(r.duplicator)} [{r.case}]")
        lines.append(f"result: {self.verdict}")
        return "\n".join(lines)


@dataclass(frozen=True)
class StrategyReport:
    winner: str
    k: int
    mode: str
    transcripts: int
    rounds_checked: int
    counterexample: Transcript | None
    divergences: int
    divergence_example: str | None
    seed: int | None = None

    @property
    def duplicator_wins(self) -> bool:
        return self.winner == "DUPLICATOR"


def _moves(G: Board, H: Board) -> list[Move]:
    return [Move("G", e) for e in range(G.size)] + [Move("H", e) for e in range(H.size)]


class _Walker:
    def __init__(self, G: Board, H: Board, k: int):
        self.G, self.H, self.k = G, H, k
        self.moves = _moves(G, H)
        self.transcripts = 0
        self.rounds = 0
        self.divergences = 0
        self.divergence_example: str | None = None

    def play(self, state: GameState, trail: list[Round], move: Move) -> Transcript | None:
        """Apply one round; return a failing transcript or ``None``."""
        try:
            resp = duplicator_response(state, move)
        except StrategyFailure as exc:
            return Transcript(self.G, self.H, (*trail, Round(move, -1, "none")), f"STRATEGY_FAILURE {exc}")
        pair = (move.element, resp.element) if move.board == "G" else (resp.element, move.element)
        state.history.append(pair)
        trail.append(Round(move, resp.element, resp.case))
        self.rounds += 1
        if not is_partial_isomorphism(state):
            return Transcript(self.G, self.H, tuple(trail), "SPOILER WINS (partial isomorphism broken)")
        bad = check_conditions(state)
        if bad is not None:
            return Transcript(self.G, self.H, tuple(trail), f"CONDITION_VIOLATION {bad}")
        ext = check_conditions(state, extended=True)
        if ext is not None:
            self.divergences += 1
            if self.divergence_example is None:
                self.divergence_example = Transcript(self.G, self.H, tuple(trail), f"extended reading: {ext}").dump()
        return None

    def exhaust(self, state: GameState, trail: list[Round]) -> Transcript | None:
        if state.round == self.k:
            self.transcripts += 1
            return None
        for mv in self.moves:
            child, sub = state.copy(), list(trail)
            bad = self.play(child, sub, mv)
            if bad is None:
                bad = self.exhaust(child, sub)
            if bad is not None:
                return bad
        return None


def _first_move_job(args: tuple[Board, Board, int, int]) -> tuple[Transcript | None, int, int, int, str | None]:
    G, H, k, idx = args
    w = _Walker(G, H, k)
    state, trail = GameState(G, H, k), []
    bad = w.play(state, trail, w.moves[idx])
    if bad is None:
        bad = w.exhaust(state, trail)
    return bad, w.transcripts, w.rounds, w.divergences, w.divergence_example


def verify_boards(G: Board, H: Board, k: int, mode: str = "exhaustive", seed: int = 0, trials: int = 1000,
                  max_transcripts: int = 2_000_000, workers: int | None = None) -> StrategyReport:
    """Play the strategy against every (or sampled) Spoiler sequence of length ``k``."""
    w = _Walker(G, H, k)
    if mode == "exhaustive":
        total = len(w.moves) ** k
        if total > max_transcripts:
            raise SizeBoundError(f"{total} transcripts exceed the exhaustive bound {max_transcripts}")
        if k == 0:
            return StrategyReport("DUPLICATOR", k, mode, 1, 0, None, 0, None)
        if workers and workers > 1:
            jobs = [(G, H, k, idx) for idx in range(len(w.moves))]
            bad = None
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for res in pool.map(_first_move_job, jobs, chunksize=8):
                    if bad is not None:
                        continue
                    bad, t, r, dv, ex = res
                    w.transcripts += t
                    w.rounds += r
                    w.divergences += dv
                    if w.divergence_example is None:
                        w.divergence_example = ex
        else:
            bad = w.exhaust(GameState(G, H, k), [])
        used_seed = None
    elif mode == "random":
        rng = random.Random(seed)
        bad = None
        for _ in range(trials):
            state, trail = GameState(G, H, k), []
            for _ in range(k):
                bad = w.play(state, trail, rng.choice(w.moves))
                if bad is not None:
                    break
            if bad is not None:
                break
            w.transcripts += 1
        used_seed = seed
    else:
        raise ValueError(f"unknown mode {mode!r}")
    winner = "DUPLICATOR" if bad is None else (
        "SPOILER" if bad.verdict.startswith("SPOILER") else "UNVERIFIED")
    return StrategyReport(winner, k, mode, w.transcripts, w.rounds, bad, w.divergences,
                          w.divergence_example, used_seed)


def verify_strategy(template: RelStructure, k: int, mode: str = "exhaustive", seed: int = 0,
                    trials: int = 1000, workers: int | None = None,
                    size_bound: int = DEFAULT_SIZE_BOUND) -> StrategyReport:
    G, H = build_boards(template, k, size_bound)
    return verify_boards(G, H, k, mode, seed, trials, workers=workers)


class GameBudgetExceeded(RuntimeError):
    pass


def solve_game(G: Board | RelStructure, H: Board | RelStructure, k: int, budget: int = 5_000_000) -> str:
    """Winner of the ``k``-round game by plain alternating search."""
    gs = G.structure if isinstance(G, Board) else G
    hs = H.structure if isinstance(H, Board) else H
    nodes = 0
    # repeated moves shrink the pair set, so the rounds left belong in the key
    memo: dict[tuple[frozenset[tuple[int, int]], int], bool] = {}

    def duplicator_wins(pairs: tuple[tuple[int, int], ...], left: int) -> bool:
        nonlocal nodes
        if left == 0:
            return True
        key = (frozenset(pairs), left)
        if key in memo:
            return memo[key]
        result = True
        for side, size in (("G", gs.size), ("H", hs.size)):
            for x in range(size):
                answered = False
                for y in range(hs.size if side == "G" else gs.size):
                    nodes += 1
                    if nodes > budget:
                        raise GameBudgetExceeded(f"game search exceeded {budget} nodes")
                    pair = (x, y) if side == "G" else (y, x)
                    ext = (*pairs, pair)
                    if pairs_partial_isomorphism(gs, hs, ext) and duplicator_wins(ext, left - 1):
                        answered = True
                        break
                if not answered:
                    result = False
                    break
            if not result:
                break
        memo[key] = result
        return result

    return "DUPLICATOR" if duplicator_wins((), k) else "SPOILER"
