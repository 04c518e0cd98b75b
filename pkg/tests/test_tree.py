import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from extgames.errors import DomainError
from extgames.generators import (
    random_chess_like,
    random_game,
    random_generic,
    random_win_or_lose,
    random_zero_sum,
    ultimatum,
)
from extgames.strategies import enumerate_strategies, play
from extgames.tree import (
    ExtensiveGame,
    classify,
    from_tree,
    is_chess_like,
    is_generic,
    is_strictly_competitive,
    is_win_or_lose,
    is_zero_sum,
    leaf,
    move,
    subgame,
    to_nested,
    validate,
    without_relevant_ties,
)


def rules(game):
    return {v.rule for v in validate(game)}


def test_corpus_games_are_valid(corpus):
    for name in ("fig1-pd", "fig2-mp", "fig3-mp-mod", "fig4-centipede", "fig6-spe-elim", "fig7-unsolvable"):
        assert validate(corpus(name)) == []


def test_single_leaf_game():
    g = from_tree(1, leaf(0))
    assert validate(g) == []
    assert g.leaves == (0,) and g.nonleaves == ()


def test_second_root_is_reported():
    g = ExtensiveGame(1, ((1,), (), ()), (0, None, None), (None, (0,), (1,)))
    assert "multiple in-degree-0 nodes" in rules(g)


def test_node_with_two_parents():
    g = ExtensiveGame(1, ((1,), (2,), (1,)), (0, 0, 0), (None, None, None))
    assert "in-degree" in rules(g)


def test_detached_cycle_is_unreachable():
    g = ExtensiveGame(1, ((), (2,), (1,)), (None, 0, 0), ((0,), None, None))
    assert rules(g) == {"unreachable"}


def test_turn_and_arity_violations():
    g = ExtensiveGame(2, ((1, 2), (), ()), (5, None, None), (None, (1, 1), (1,)))
    found = rules(g)
    assert "turn" in found and "outcome arity" in found


def test_outcomes_must_be_exact():
    with pytest.raises(TypeError):
        from_tree(1, leaf(0.5))
    assert from_tree(1, leaf("1/3")).outcomes[0] == (Fraction(1, 3),)


def test_duplicate_action_labels():
    g = ExtensiveGame(1, ((1, 2), (), ()), (0, None, None), (None, (0,), (1,)), actions=(("a", "a"), (), ()))
    assert "action labels" in rules(g)


def test_fig2_structure(corpus):
    g = corpus("fig2-mp")
    assert g.names[:2] == ("u", "v")
    assert g.decision_nodes(1) == (1, 4)
    assert g.postorder == (2, 3, 1, 5, 6, 4, 0)
    assert g.path_to(6) == (0, 4, 6)
    assert g.is_preleaf(1) and not g.is_preleaf(0)


def test_subgame_keeps_players_and_maps_ids(corpus):
    g = corpus("fig4-centipede")
    sub = subgame(g, 4)  # node c
    assert sub.n_players == 2
    assert sub.names[0] == "c"
    assert sub.origin[0] == 4
    assert validate(sub) == []
    for k, v in enumerate(sub.origin):
        assert sub.outcomes[k] == g.outcomes[v]


def test_subgame_errors(corpus):
    g = corpus("fig2-mp")
    with pytest.raises(DomainError):
        subgame(g, 2)
    with pytest.raises(DomainError):
        subgame(g, 99)


def test_classification_examples(corpus):
    mp = corpus("fig2-mp")
    assert is_zero_sum(mp) and is_win_or_lose(mp) and is_chess_like(mp) and is_strictly_competitive(mp)
    assert not is_generic(mp)
    cent = corpus("fig4-centipede")
    assert is_generic(cent) and without_relevant_ties(cent)
    assert not is_strictly_competitive(cent)  # (1,0) vs (0,2) is not a reversal
    u = ultimatum(3)
    assert not without_relevant_ties(u)
    flags = classify(corpus("fig7-unsolvable"))
    assert flags.tdi is False and flags.outcome_count == 3  # (0,0) appears twice


def test_classify_skips_tdi_over_cap():
    assert classify(ultimatum(20), tdi_cap=100).tdi is None


def test_without_relevant_ties_allows_ties_of_non_movers():
    # player 2 never moves, so its ties are irrelevant
    g = from_tree(2, move(0, ("a", leaf(1, 0)), ("b", leaf(2, 0))))
    assert without_relevant_ties(g) and not is_generic(g)


@given(st.integers(0, 10**6))
def test_nested_round_trip(seed):
    g = random_game(random.Random(seed))
    assert from_tree(g.n_players, to_nested(g), g.title) == g


@given(st.integers(0, 10**6))
def test_postorder_puts_children_first(seed):
    g = random_game(random.Random(seed))
    pos = {v: k for k, v in enumerate(g.postorder)}
    assert sorted(g.postorder) == list(range(g.num_nodes))
    for v in g.nonleaves:
        assert all(pos[c] < pos[v] for c in g.children[v])


@given(st.integers(0, 10**6))
def test_subgames_are_valid_and_compose(seed):
    g = random_game(random.Random(seed), max_nodes=12)
    for u in g.nonleaves:
        gu = subgame(g, u)
        assert validate(gu) == [] and gu.n_players == g.n_players
        for v in g.subtree(u):
            if g.is_leaf(v):
                continue
            inner = subgame(gu, gu.origin.index(v))
            direct = subgame(g, v)
            assert inner == direct
            assert [gu.origin[k] for k in inner.origin] == list(direct.origin)


def _families(rng):
    return [random_game(rng, max_nodes=10), random_generic(rng, max_nodes=10), random_zero_sum(rng, max_nodes=10),
            random_win_or_lose(rng, max_nodes=10), random_chess_like(rng, max_nodes=10)]


@given(st.integers(0, 10**6))
def test_classification_implications(seed):
    for g in _families(random.Random(seed)):
        c = classify(g)
        assert not c.generic or c.without_relevant_ties
        assert not c.zero_sum or c.strictly_competitive
        assert not c.win_or_lose or c.chess_like
        assert not c.chess_like or c.zero_sum
        assert not c.strictly_competitive or c.tdi
        if g.n_players != 2:
            assert not (c.zero_sum or c.strictly_competitive or c.win_or_lose or c.chess_like)
        assert c.outcome_count == len({g.outcomes[z] for z in g.leaves})


@given(st.integers(0, 10**6))
def test_every_leaf_is_reachable(seed):
    g = random_game(random.Random(seed), max_nodes=12)
    assert len(g.leaves) + len(g.nonleaves) == g.num_nodes
    reached = {play(g, joint)[-1] for joint in itertools.product(
        *(enumerate_strategies(g, i) for i in range(g.n_players)))}
    assert reached == set(g.leaves)
