import pytest
from hypothesis import given, settings

from conftest import structures
from oracles import brute_game, one_round_types
from pinchlab.catalog import C3, GRAPH, K2, K3, LOOP, PT, UNARY, p_point, q_point
from pinchlab.constructions import b_left, b_right, n_pinch
from pinchlab.efgame import (
    INF,
    BlockKind,
    GameBudgetExceeded,
    GameState,
    Move,
    StrategyFailure,
    board_distance,
    board_from_structure,
    build_boards,
    build_boards_colour,
    check_conditions,
    duplicator_response,
    is_partial_isomorphism,
    large_threshold,
    n_prime,
    solve_game,
    verify_boards,
    verify_strategy,
)
from pinchlab.solver import csp_member
from pinchlab.structures import RelStructure


@pytest.fixture(scope="module")
def boards1():
    return build_boards(K2, 1)


def test_board_sizes():
    G0, H0 = build_boards(K2, 0)
    assert (n_prime(0), H0.size, G0.size) == (4, 28, 44)
    G1, H1 = build_boards(K2, 1)
    assert (n_prime(1), H1.size, G1.size) == (6, 88, 112)
    assert H0.census() == {"PINCH": 0, "BR": 1, "BL": 1, "EXTRA_TEMPLATE": 0}
    assert G1.census()["PINCH"] == 1 and G1.census()["BR"] == 2


def test_n_prime():
    assert [n_prime(k) for k in range(4)] == [4, 6, 10, 18]
    with pytest.raises(ValueError):
        n_prime(-1)


def test_distance_and_threshold(boards1):
    G, _ = boards1
    pinch = G.blocks[0]
    at = {G.iota[e]: e for e in pinch.elements}
    assert board_distance(G, at[3], at[5]) == 2
    other = G.blocks[1].offset
    assert board_distance(G, at[3], other) == INF
    assert large_threshold(2, 1) == 4
    assert large_threshold(1, 0) == 4


def test_landmarks(boards1):
    G, H = boards1
    br = next(b for b in H.blocks if b.kind is BlockKind.BR)
    bl = next(b for b in H.blocks if b.kind is BlockKind.BL)
    assert br.landmarks == {"right_pinch": (6,), "right_slice": (1,)}
    assert bl.landmarks == {"left_pinch": (0,), "left_slice": (5,)}
    assert G.blocks[0].landmarks == {"left_pinch": (0,), "right_pinch": (6,)}
    assert G.blocks[0].extended["right_slice"] == (1,)


def test_partial_isomorphism_examples(boards1):
    G, H = boards1
    assert is_partial_isomorphism(GameState(G, H, 1))
    lp, pt = board_from_structure("L", LOOP), board_from_structure("P", PT)
    assert not is_partial_isomorphism(GameState(lp, pt, 1, [(0, 0)]))
    kk = board_from_structure("K", K2)
    assert is_partial_isomorphism(GameState(kk, kk, 2, [(0, 1), (1, 0)]))
    assert not is_partial_isomorphism(GameState(kk, kk, 2, [(0, 0), (1, 0)]))


def test_left_pinch_goes_to_left_pinch_of_fresh_bl(boards1):
    G, H = boards1
    e = next(x for x in G.blocks[0].elements if G.iota[x] == 0)
    r = duplicator_response(GameState(G, H, 1), Move("G", e))
    assert r.case == "1b"
    assert H.kind(r.element) is BlockKind.BL
    assert H.landmark_distance(r.element, "left_pinch") == 0
    assert H.label[r.element] == G.label[e]


def test_repeat_is_mirrored(boards1):
    G, H = boards1
    st = GameState(G, H, 2, [(5, 17)])
    assert duplicator_response(st, Move("G", 5)).element == 17
    assert duplicator_response(st, Move("H", 17)).element == 5


def test_far_move_goes_to_middle(boards1):
    G, H = boards1
    e = next(x for x in G.blocks[0].elements if G.iota[x] == 3)
    r = duplicator_response(GameState(G, H, 1), Move("G", e))
    assert r.case == "1a"
    assert H.kind(r.element) in (BlockKind.BR, BlockKind.BL)
    assert H.iota[r.element] == 3


def test_game_over(boards1):
    G, H = boards1
    with pytest.raises(ValueError):
        duplicator_response(GameState(G, H, 1, [(0, 0)]), Move("G", 1))


def test_strategy_failure_reported():
    G, H = build_boards(K2, 0)
    st = GameState(G, H, 1)
    lone = board_from_structure("X", K2)
    with pytest.raises(StrategyFailure):
        duplicator_response(GameState(lone, H, 1), Move("G", 0))
    assert check_conditions(st) is None


def test_verify_k0_and_k1():
    r0 = verify_strategy(K2, 0)
    assert r0.duplicator_wins and r0.transcripts == 1
    r1 = verify_strategy(K2, 1)
    assert r1.duplicator_wins and r1.transcripts == 200 and r1.counterexample is None


def test_verify_other_templates_k1():
    for tpl in (C3, K3):
        assert verify_strategy(tpl, 1).duplicator_wins


def test_negative_control():
    lp, pt = board_from_structure("L", LOOP), board_from_structure("P", PT)
    rep = verify_boards(lp, pt, 1)
    assert rep.winner == "SPOILER"
    assert "S@G:0(0,EXTRA_TEMPLATE,0)" in rep.counterexample.dump()
    assert solve_game(lp, pt, 1) == "SPOILER"


def test_solve_game_agrees_at_k1(boards1):
    G, H = boards1
    assert solve_game(G, H, 1) == "DUPLICATOR"
    assert csp_member(H.structure, K2)
    assert not csp_member(G.structure, K2)


def test_solve_game_budget(boards1):
    with pytest.raises(GameBudgetExceeded):
        solve_game(*boards1, 2, budget=100)


def test_random_mode_is_reproducible():
    a = verify_strategy(K2, 2, mode="random", seed=3, trials=200)
    b = verify_strategy(K2, 2, mode="random", seed=3, trials=200)
    assert a == b and a.duplicator_wins and a.seed == 3
    with pytest.raises(ValueError):
        verify_strategy(K2, 1, mode="bogus")


def test_workers_match_serial():
    serial = verify_strategy(K2, 1)
    par = verify_strategy(K2, 1, workers=2)
    assert (serial.winner, serial.transcripts, serial.rounds_checked, serial.divergences) == \
        (par.winner, par.transcripts, par.rounds_checked, par.divergences)


def test_colour_boards():
    fam = [K2, C3]
    G, H = build_boards_colour(fam, 0, 1)
    assert H.census()["EXTRA_TEMPLATE"] == 1 and G.census()["EXTRA_TEMPLATE"] == 1
    p = n_pinch(K2, n_prime(1))
    assert H.size == K2.size + 2 * (b_right(p).structure.size + b_left(p).structure.size)
    extra = next(b for b in G.blocks if b.kind is BlockKind.EXTRA_TEMPLATE)
    r = duplicator_response(GameState(G, H, 1), Move("G", extra.offset + 1))
    assert r.case == "extra" and r.element == H.blocks[0].offset + 1
    assert verify_boards(G, H, 1).duplicator_wins
    with pytest.raises(ValueError):
        build_boards_colour([K2, K3], 0, 1)


def test_colour_boards_unary_family():
    G, H = build_boards_colour([p_point(), q_point()], 1, 0)
    assert H.census() == {"PINCH": 0, "BR": 1, "BL": 1, "EXTRA_TEMPLATE": 1}


def test_transcript_format():
    lp, pt = board_from_structure("L", LOOP), board_from_structure("P", PT)
    text = verify_boards(lp, pt, 1).counterexample.dump()
    assert text.splitlines()[-1].startswith("result: SPOILER WINS")


@settings(max_examples=40)
@given(structures(max_size=3), structures(max_size=3))
def test_solve_game_matches_one_round_types(a, b):
    want = one_round_types(a) == one_round_types(b)
    assert (solve_game(a, b, 1) == "DUPLICATOR") == want


@settings(max_examples=30)
@given(structures(max_size=3), structures(max_size=2))
def test_solve_game_matches_naive_search(a, b):
    for k in (0, 1, 2):
        assert (solve_game(a, b, k) == "DUPLICATOR") == brute_game(a, b, k)


@settings(max_examples=20)
@given(structures(UNARY, max_size=3), structures(UNARY, max_size=3))
def test_solve_game_unary(a, b):
    assert (solve_game(a, b, 2) == "DUPLICATOR") == brute_game(a, b, 2)


def test_isomorphic_boards_duplicator_wins():
    s = RelStructure(GRAPH, 3, {"E": [(0, 1), (1, 2)]})
    t = RelStructure(GRAPH, 3, {"E": [(2, 1), (1, 0)]})
    assert solve_game(s, t, 3) == "DUPLICATOR"
