"""Seeded random games and parameterised families used by tests and the CLI."""

from __future__ import annotations

import random
from fractions import Fraction
from importlib import resources

from .tree import Decision, ExtensiveGame, Leaf, from_tree


def ultimatum(n: int = 100) -> ExtensiveGame:
    """Player 1 offers ``x`` in ``0..n``; player 2 accepts ``(x, n-x)`` or rejects ``(0, 0)``."""
    branches = tuple(
        (str(x), Decision(1, (("A", Leaf((x, n - x))), ("R", Leaf((0, 0)))), name=str(x)))
        for x in range(n + 1)
    )
    return from_tree(2, Decision(0, branches, name="u"), f"ultimatum-{n}")


def _shape(rng: random.Random, max_nodes: int, max_branch: int) -> list[list[int]]:
    """Random tree shape as child lists, node 0 the root.

    The size is drawn from 3..max_nodes (a lone leaf only when ``max_nodes``
    is below 3); ids are renumbered by :func:`from_tree` anyway.
    """
    target = rng.randint(min(3, max_nodes), max_nodes)
    children: list[list[int]] = [[]]
    frontier = [0]
    while frontier and len(children) < target:
        v = frontier.pop(rng.randrange(len(frontier)))
        room = target - len(children)
        if room < 2:
            break
        k = rng.randint(2, min(max_branch, room))
        for _ in range(k):
            children.append([])
            children[v].append(len(children) - 1)
            frontier.append(len(children) - 1)
    return children


def _build(children: list[list[int]], n_players: int, payoff, rng: random.Random, title: str) -> ExtensiveGame:
    def node(v: int):
        if not children[v]:
            return Leaf(payoff(rng))
        player = rng.randrange(n_players)
        acts = "abcdefgh"
        return Decision(player, tuple((acts[k], node(c)) for k, c in enumerate(children[v])))

    return from_tree(n_players, node(0), title)


def random_game(
    rng: random.Random,
    max_nodes: int = 14,
    max_players: int = 3,
    payoff_range: tuple[int, int] = (0, 3),
    max_branch: int = 3,
) -> ExtensiveGame:
    """Arbitrary small game with integer payoffs (ties likely)."""
    n = rng.randint(1, max_players)
    lo, hi = payoff_range
    return _build(
        _shape(rng, max_nodes, max_branch), n,
        lambda r: tuple(r.randint(lo, hi) for _ in range(n)), rng, "random",
    )


def random_generic(rng: random.Random, max_nodes: int = 14, max_players: int = 3, max_branch: int = 3) -> ExtensiveGame:
    """Every player's payoffs are injective over the leaves (so no relevant ties)."""
    n = rng.randint(1, max_players)
    shape = _shape(rng, max_nodes, max_branch)
    k = sum(1 for c in shape if not c)
    columns = [rng.sample(range(4 * k), k) for _ in range(n)]
    rows = iter(zip(*columns))  # leaves are built in a fixed order, each takes the next row
    return _build(shape, n, lambda r: next(rows), rng, "generic")


def random_no_relevant_ties(rng: random.Random, max_nodes: int = 14, max_players: int = 3) -> ExtensiveGame:
    """Random payoffs, resampled until no mover faces a tie in its own subgames."""
    from .tree import without_relevant_ties

    while True:
        g = random_game(rng, max_nodes, max_players, payoff_range=(0, 9))
        if without_relevant_ties(g):
            return g


def random_strictly_competitive(rng: random.Random, max_nodes: int = 12, max_branch: int = 3) -> ExtensiveGame:
    """Two players; player 2's payoff is a decreasing transform of player 1's."""
    shape = _shape(rng, max_nodes, max_branch)
    levels = sorted(rng.sample(range(-6, 7), rng.randint(1, 5)))
    # a strictly decreasing but not necessarily affine map keeps it non-zero-sum in general
    down = sorted(rng.sample(range(-20, 21), len(levels)), reverse=True)
    table = dict(zip(levels, down))

    def payoff(r):
        a = r.choice(levels)
        return (a, table[a])

    return _build(shape, 2, payoff, rng, "strictly-competitive")


def random_zero_sum(rng: random.Random, max_nodes: int = 12, max_branch: int = 3) -> ExtensiveGame:
    def payoff(r):
        a = r.randint(-3, 3)
        return (a, -a)

    return _build(_shape(rng, max_nodes, max_branch), 2, payoff, rng, "zero-sum")


def random_win_or_lose(rng: random.Random, max_nodes: int = 20, max_branch: int = 3) -> ExtensiveGame:
    return _build(
        _shape(rng, max_nodes, max_branch), 2,
        lambda r: r.choice([(1, -1), (-1, 1)]), rng, "win-or-lose",
    )


def random_chess_like(rng: random.Random, max_nodes: int = 20, max_branch: int = 3) -> ExtensiveGame:
    return _build(
        _shape(rng, max_nodes, max_branch), 2,
        lambda r: r.choice([(1, -1), (-1, 1), (0, 0)]), rng, "chess-like",
    )


def random_tdi(rng: random.Random, max_nodes: int = 12, max_players: int = 3) -> ExtensiveGame:
    """Payoffs are a function of a hidden outcome label, injective for every player.

    Any two profiles a player is indifferent between then share the label and
    hence every player's payoff, which is exactly transference of decisionmaker
    indifference.
    """
    n = rng.randint(1, max_players)
    shape = _shape(rng, max_nodes, 3)
    labels = rng.randint(1, 4)
    columns = [rng.sample(range(10), labels) for _ in range(n)]

    def payoff(r):
        k = r.randrange(labels)
        return tuple(col[k] for col in columns)

    return _build(shape, n, payoff, rng, "tdi")


def random_rational_game(rng: random.Random, max_nodes: int = 10, max_players: int = 3) -> ExtensiveGame:
    """Like :func:`random_game` but with fractional payoffs."""
    n = rng.randint(1, max_players)
    return _build(
        _shape(rng, max_nodes, 3), n,
        lambda r: tuple(Fraction(r.randint(-6, 6), r.randint(1, 4)) for _ in range(n)), rng, "rational",
    )


# -- corpus -------------------------------------------------------------------------

CORPUS = ("fig1-pd", "fig2-mp", "fig3-mp-mod", "fig4-centipede", "ultimatum-100", "fig6-spe-elim", "fig7-unsolvable")


def corpus_text(name: str) -> str:
    return resources.files("extgames").joinpath("corpus", f"{name}.egt").read_text()


def load(name: str) -> ExtensiveGame:
    """One of the bundled example games, by name (see ``CORPUS``)."""
    from .formats import parse_game

    if name not in CORPUS:
        raise KeyError(f"unknown corpus game {name!r}; choose from {', '.join(CORPUS)}")
    return parse_game(corpus_text(name))
