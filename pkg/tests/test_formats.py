import random
import re
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from extgames.backward import bi_run, unique_spe
from extgames.dot import export_dot
from extgames.epistemic import random_system
from extgames.errors import ValidationError
from extgames.formats import parse_game, parse_ks, print_game, print_ks
from extgames.generators import CORPUS, corpus_text, random_game, random_no_relevant_ties, ultimatum
from extgames.sexpr import ParseError, read
from extgames.strategies import find_joint
from extgames.tree import from_tree, leaf, move, validate

MP_ONE_LINE = ('(game "mp" players 2 (p1 (H (p2 (H (out 1 -1)) (T (out -1 1)))) '
               "(T (p2 (H (out -1 1)) (T (out 1 -1))))))")


def shape(g):
    return g.n_players, g.children, g.turn, g.outcomes, g.actions


def test_one_line_mp_is_the_corpus_game(corpus):
    g = parse_game(MP_ONE_LINE)
    assert g.title == "mp" and validate(g) == []
    assert shape(g) == shape(corpus("fig2-mp"))


def test_single_leaf_document():
    g = parse_game('(game "t" players 1 (out 0))')
    assert g.num_nodes == 1 and g.outcomes[0] == (Fraction(0),)


def test_rationals_names_and_spaced_player():
    g = parse_game('(game "r" players 2 (p 2 top (x (out 1/2 -3/4 @left)) (y (out 0 7))))')
    assert g.turn[0] == 1 and g.names[0] == "top" and g.names[1] == "left"
    assert g.outcomes[1] == (Fraction(1, 2), Fraction(-3, 4))


def _error(text):
    with pytest.raises(ParseError) as info:
        parse_game(text)
    return info.value


def _position(text, marker):
    """1-based line and column of the first occurrence of ``marker``."""
    k = text.index(marker)
    return text.count("\n", 0, k) + 1, k - text.rfind("\n", 0, k)


@pytest.mark.parametrize("text, marker, fragment", [
    ('(game "m" players 2\n  (p1 (a (out 1)) (b (out 0 0))))', "(out 1)", "2"),
    ('(game "m" players 2\n  (p3 (a (out 1 1))))', "(p3", "player"),
    ('(game "m" players 2 (p1 (a (out 1 1)) (a (out 0 0))))', "a (out 0", "repeats"),
    ('(game "m" players 2 (p1))', "(p1", "branch"),
    ('(game "m" players 2 (out 1 x))', "x", "rational"),
    ('(game "m" players 0 (out))', "0", "player"),
])
def test_semantic_errors_carry_locations(text, marker, fragment):
    err = _error(text)
    line, col = _position(text, marker)
    assert (err.line, err.col) == (line, col), str(err)
    assert fragment in err.message
    assert str(err).startswith(f"{line}:{col}: ")


@pytest.mark.parametrize("text, line", [
    ('(game "m" players 1 (out 0)', 1),
    ('(game "m" players 1 (out 0)))', 1),
    ('(game "m\n players 1 (out 0))', 1),
    ("", 1),
    ('(game "m" players 1\n (out 0))\n(game "n" players 1 (out 0))', 3),
])
def test_syntax_errors(text, line):
    assert _error(text).line == line


def test_comments_and_escapes():
    doc = read('; leading comment\n(a "b \\" c" ; trailing\n d)')
    assert [x.text for x in doc.items] == ["a", 'b " c', "d"]


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_round_trip(name):
    g = parse_game(corpus_text(name))
    text = print_game(g)
    assert parse_game(text) == g
    assert print_game(parse_game(text)) == text


def test_ultimatum_file_matches_generator(corpus):
    assert corpus("ultimatum-100") == ultimatum(100)


@given(st.integers(0, 10**6))
def test_random_round_trip(seed):
    rng = random.Random(seed)
    g = random_game(rng, max_nodes=14, max_players=3)
    g = g.replace_outcomes(lambda o: tuple(x / rng.choice([1, 2, 3]) for x in o))
    assert parse_game(print_game(g)) == g


def test_round_trip_keeps_odd_names():
    g = from_tree(2, move(0, ("go on", leaf(1, 2, name="end")), ("x", leaf(0, 0)), name="a b"), title='say "hi"')
    assert parse_game(print_game(g)) == g


def test_ks_round_trip(corpus):
    g = corpus("fig6-spe-elim")
    text = """(ks (states w0 w1 w2)
                  (assign (w0 BE D) (w1 AE D) (w2 BE C))
                  (partition 1 (w0 w2) (w1))
                  (partition 2 (w0 w1) (w2)))"""
    ks = parse_ks(text, g)
    assert ks.states == ("w0", "w1", "w2")
    assert ks.assignment["w1"][0].label(g) == "AE"
    assert parse_ks(print_ks(ks, g), g) == ks


@given(st.integers(0, 10**6))
def test_random_ks_round_trip(seed):
    rng = random.Random(seed)
    g = random_no_relevant_ties(rng, max_nodes=8)
    ks = random_system(g, rng.randint(1, 6), rng)
    assert parse_ks(print_ks(ks, g), g) == ks


def test_ks_errors(corpus):
    g = corpus("fig6-spe-elim")
    text = "(ks (states a) (assign (a ZZ D)) (partition 1 (a)) (partition 2 (a)))"
    with pytest.raises(ParseError) as info:
        parse_ks(text, g)
    assert (info.value.line, info.value.col) == _position(text, "ZZ")
    with pytest.raises(ParseError):
        parse_ks("(ks (states a) (assign (a BE D)) (partition 1 (a)))", g)
    with pytest.raises(ValidationError):
        parse_ks("(ks (states a b) (assign (a BE D) (b AE D)) (partition 1 (a b)) (partition 2 (a) (b)))", g)


def _bold_edges(dot):
    return {(int(a), int(b)) for a, b in re.findall(r"n(\d+) -> n(\d+) \[[^]]*style=bold", dot)}


def test_dot_bolds_the_joint_strategy(corpus):
    g = corpus("fig2-mp")
    u, v, w = (g.names.index(x) for x in "uvw")
    dot = export_dot(g, find_joint(g, ["H", "TH"]))
    v_t = g.children[v][g.actions[v].index("T")]
    w_h = g.children[w][g.actions[w].index("H")]
    assert _bold_edges(dot) == {(u, v), (v, v_t), (w, w_h)}
    assert dot.startswith('digraph "fig2-mp" {') and dot.rstrip().endswith("}")
    assert 'shape=box, label="(1,-1)"' in dot


def test_plain_dot_has_no_emphasis(corpus):
    dot = export_dot(corpus("fig1-pd"))
    assert "bold" not in dot
    assert dot.count("->") == 6


def test_dot_with_extended_outcomes():
    g = ultimatum(2)
    res = bi_run(g)
    dot = export_dot(g, res.strategy, res.extended_outcomes)
    assert '[label="1, u\\n(2,0)"]' in dot
    for v in g.nonleaves:
        assert f"n{v} [label=" in dot
    assert len(_bold_edges(dot)) == len(g.nonleaves)


def test_spe_of_corpus_game_draws_cleanly(corpus):
    g = corpus("fig6-spe-elim")
    assert len(_bold_edges(export_dot(g, unique_spe(g)))) == 3
