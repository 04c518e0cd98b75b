"""Strategies, reduced strategies, plays and realised outcomes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

from . import caps
from .errors import DomainError
from .tree import ExtensiveGame, Outcome


@dataclass(frozen=True)
class _Moves:
    player: int
    choices: tuple[tuple[int, int], ...]  # (node, chosen child), nodes in preorder

    @cached_property
    def moves(self) -> dict[int, int]:
        return dict(self.choices)

    def __getitem__(self, node: int) -> int:
        return self.moves[node]

    def __contains__(self, node: int) -> bool:
        return node in self.moves

    def label(self, game: ExtensiveGame, style: str = "actions") -> str:
        """Canonical encoding.

        ``actions`` concatenates the chosen action labels (``TH``); ``named``
        prefixes each with its node name (``aCcS``). Labels longer than one
        character are joined with ``.``; the empty strategy is ``-``.
        """
        if not self.choices:
            return "-"
        parts, compact = [], True
        for v, c in self.choices:
            a = game.action_of(v, c)
            compact = compact and len(a) == 1
            if style == "named":
                name = str(v) if game.names[v] is None else game.names[v]
                compact = compact and len(name) == 1
                a = name + a
            parts.append(a)
        return ("" if compact else ".").join(parts)


class Strategy(_Moves):
    """A total choice ``s_i : V_i -> V`` for one player."""


class ReducedStrategy(_Moves):
    """A maximal sub-assignment of a strategy closed under the player's own earlier moves."""


AnyStrategy = Union[Strategy, ReducedStrategy]
JointStrategy = tuple  # tuple[Strategy, ...], one entry per player


def strategy_counts(game: ExtensiveGame) -> list[int]:
    return [
        math.prod(len(game.children[v]) for v in game.decision_nodes(i))
        for i in range(game.n_players)
    ]


def enumerate_strategies(game: ExtensiveGame, player: int, cap: int | None = None) -> list[Strategy]:
    """All strategies of ``player``, lexicographic in (preorder node, child order)."""
    _check_player(game, player)
    nodes = game.decision_nodes(player)
    caps.check(f"strategies of player {player + 1}", strategy_counts(game)[player], cap)
    return [
        Strategy(player, tuple(zip(nodes, pick)))
        for pick in itertools.product(*(game.children[v] for v in nodes))
    ]


def _check_player(game: ExtensiveGame, player: int) -> None:
    if not 0 <= player < game.n_players:
        raise DomainError(f"no player {player + 1} in a {game.n_players}-player game")


def merge(joint: Iterable[_Moves]) -> dict[int, int]:
    """Node -> chosen child across all players."""
    out: dict[int, int] = {}
    for s in joint:
        out.update(s.moves)
    return out


def play_from(game: ExtensiveGame, moves: Mapping[int, int], start: int) -> tuple[int, ...]:
    path = [start]
    v = start
    while game.children[v]:
        try:
            v = moves[v]
        except KeyError:
            raise DomainError(f"joint strategy undefined at reached node {game.node_label(v)}") from None
        path.append(v)
    return tuple(path)


def play(game: ExtensiveGame, joint: Sequence[_Moves]) -> tuple[int, ...]:
    """``play(s)``: the root-to-leaf path the joint strategy induces."""
    return play_from(game, merge(joint), game.root)


def leaf_of(game: ExtensiveGame, joint: Sequence[_Moves]) -> int:
    return play(game, joint)[-1]


def outcome(game: ExtensiveGame, joint: Sequence[_Moves]) -> Outcome:
    return game.outcomes[leaf_of(game, joint)]


def joint_from_moves(game: ExtensiveGame, moves: Mapping[int, int]) -> JointStrategy:
    """Split a node -> child assignment over all non-leaves into per-player strategies."""
    return tuple(
        Strategy(i, tuple((v, moves[v]) for v in game.decision_nodes(i)))
        for i in range(game.n_players)
    )


def find_strategy(game: ExtensiveGame, player: int, label: str, reduced: bool = False) -> AnyStrategy:
    pool = enumerate_reduced(game, player) if reduced else enumerate_strategies(game, player)
    for s in pool:
        if label in (s.label(game), s.label(game, "named")):
            return s
    raise DomainError(f"player {player + 1} has no strategy labelled {label!r}")


def find_joint(game: ExtensiveGame, labels: Sequence[str], reduced: bool = False) -> JointStrategy:
    if len(labels) != game.n_players:
        raise DomainError(f"expected {game.n_players} strategy labels, got {len(labels)}")
    return tuple(find_strategy(game, i, lab, reduced) for i, lab in enumerate(labels))


# -- reduced strategies -----------------------------------------------------


def _reduced_count(game: ExtensiveGame, player: int, v: int) -> int:
    if not game.children[v]:
        return 1
    sub = [_reduced_count(game, player, c) for c in game.children[v]]
    return sum(sub) if game.turn[v] == player else math.prod(sub)


def reduced_count(game: ExtensiveGame, player: int) -> int:
    return _reduced_count(game, player, game.root)


def _reduced_from(game: ExtensiveGame, player: int, v: int) -> list[tuple[tuple[int, int], ...]]:
    # move sets for T^v, assuming the player's own play does not preclude v
    if not game.children[v]:
        return [()]
    if game.turn[v] == player:
        return [((v, c),) + rest for c in game.children[v] for rest in _reduced_from(game, player, c)]
    parts = [_reduced_from(game, player, c) for c in game.children[v]]
    return [tuple(itertools.chain.from_iterable(combo)) for combo in itertools.product(*parts)]


def _order_key(game: ExtensiveGame):
    pos = {v: k for k, v in enumerate(game.preorder)}

    def key(s: _Moves):
        return tuple((pos[v], game.children[v].index(c)) for v, c in s.choices)

    return key, pos


def enumerate_reduced(game: ExtensiveGame, player: int, cap: int | None = None) -> list[ReducedStrategy]:
    """All reduced strategies of ``player`` in canonical order.

    Built constructively: a move is fixed exactly at the player's nodes that
    the player's own earlier moves do not rule out.
    """
    _check_player(game, player)
    caps.check(f"reduced strategies of player {player + 1}", reduced_count(game, player), cap)
    key, pos = _order_key(game)
    out = []
    for mv in _reduced_from(game, player, game.root):
        out.append(ReducedStrategy(player, tuple(sorted(mv, key=lambda vc: pos[vc[0]]))))
    out.sort(key=key)
    return out


def reduce(game: ExtensiveGame, s: Strategy) -> ReducedStrategy:
    """The unique reduced strategy contained in ``s``."""
    keep = []
    for v, c in s.choices:
        if all(s.moves.get(u) == x for u, x in _own_ancestor_moves(game, s.player, v)):
            keep.append((v, c))
    return ReducedStrategy(s.player, tuple(keep))


def _own_ancestor_moves(game: ExtensiveGame, player: int, v: int):
    """``[v]_i``: the player's moves on the root path to ``v``."""
    path = game.path_to(v)
    return [(u, w) for u, w in zip(path, path[1:]) if game.turn[u] == player]


def expand_reduced(game: ExtensiveGame, r: Sequence[ReducedStrategy], cap: int | None = None) -> list[JointStrategy]:
    """``Str(r)``: every joint strategy whose i-th entry contains ``r_i``."""
    per_player = []
    total = 1
    for i, ri in enumerate(r):
        free = [v for v in game.decision_nodes(i) if v not in ri.moves]
        total *= math.prod(len(game.children[v]) for v in free)
        per_player.append(free)
    caps.check("Str(r) expansion", total, cap)
    options = []
    for i, ri in enumerate(r):
        nodes = game.decision_nodes(i)
        free = per_player[i]
        opts = []
        for pick in itertools.product(*(game.children[v] for v in free)):
            mv = dict(ri.moves)
            mv.update(zip(free, pick))
            opts.append(Strategy(i, tuple((v, mv[v]) for v in nodes)))
        options.append(opts)
    return [tuple(js) for js in itertools.product(*options)]
