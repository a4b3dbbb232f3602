"""The k-round game on pinch boards, at k = 1.

G contains a full pinch and cannot be 2-coloured; H is made of pinch sides
and can.  Duplicator still survives one round, so no rank-1 sentence tells
them apart.
"""

from pinchlab.catalog import K2, LOOP, PT
from pinchlab.efgame import (
    GameState,
    Move,
    board_from_structure,
    build_boards,
    duplicator_response,
    solve_game,
    verify_boards,
)
from pinchlab.solver import csp_member

G, H = build_boards(K2, 1)
print(f"G: {G.size} elements {G.census()}")
print(f"H: {H.size} elements {H.census()}")
print("G -> K2:", csp_member(G.structure, K2), " H -> K2:", csp_member(H.structure, K2))

state = GameState(G, H, 1)
pinch = G.blocks[0]
for iota in (0, 1, 3, 6):
    g = next(e for e in pinch.elements if G.iota[e] == iota)
    r = duplicator_response(state, Move("G", g))
    print(f"Spoiler {G.describe(g)} -> Duplicator {H.describe(r.element)} [case {r.case}]")

rep = verify_boards(G, H, 1)
print(f"\nexhaustive check: {rep.winner} over {rep.transcripts} transcripts")
print("independent game search:", solve_game(G, H, 1))

print("\nnegative control, a loop against a bare point:")
print(verify_boards(board_from_structure("L", LOOP), board_from_structure("P", PT), 1).counterexample.dump())
