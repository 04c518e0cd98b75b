"""Strictly competitive games and win-or-lose / chess-like classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from . import caps
from .errors import InternalConsistencyError, PreconditionError
from .strategic import (
    StrategicGame,
    is_strictly_competitive,
    max_round,
    to_strategic,
    with_choice,
)
from .strategies import Strategy, enumerate_strategies, merge, play_from, strategy_counts
from .tree import ExtensiveGame, is_chess_like, is_win_or_lose


@dataclass
class SCRun:
    """Max-policy elimination run of a strictly competitive game."""

    snapshots: list[StrategicGame]  # snapshots[k] is the game after k rounds
    trivial_at: int
    outcome_count: int  # m

    @property
    def final(self) -> StrategicGame:
        return self.snapshots[self.trivial_at]

    def at(self, k: int) -> StrategicGame:
        """``Γ^k``; rounds past triviality leave the game unchanged."""
        return self.snapshots[min(k, self.trivial_at)]


def _as_strategic(game) -> StrategicGame:
    return to_strategic(game) if isinstance(game, ExtensiveGame) else game


def sc_iterate(game: ExtensiveGame | StrategicGame) -> SCRun:
    H = _as_strategic(game)
    if not is_strictly_competitive(H):
        raise PreconditionError("game is not strictly competitive")
    m = len(H.outcomes())
    snaps = [H]
    while not snaps[-1].is_trivial():
        nxt = max_round(snaps[-1])
        if nxt.support == snaps[-1].support:
            raise InternalConsistencyError("elimination stalled on a non-trivial strictly competitive game")
        snaps.append(nxt)
    k = len(snaps) - 1
    if k > m - 1:
        raise InternalConsistencyError(f"trivial only after {k} rounds with {m} outcomes")
    return SCRun(snaps, k, m)


# -- win / lose sets -------------------------------------------------------------


@dataclass(frozen=True)
class PlayerSets:
    player: int
    p_max: Fraction
    win: tuple[int, ...]  # own strategies that always pay p_max
    lose_opponent: tuple[int, ...]  # opponent strategies against which p_max is attainable


@dataclass(frozen=True)
class CompetitiveSets:
    players: tuple[PlayerSets, PlayerSets]

    def __getitem__(self, i: int) -> PlayerSets:
        return self.players[i]

    def labels(self, H: StrategicGame) -> dict:
        return {
            f"player {p.player + 1}": {
                "p_max": p.p_max,
                "win": [H.label(p.player, k) for k in p.win],
                "lose_opponent": [H.label(1 - p.player, k) for k in p.lose_opponent],
            }
            for p in self.players
        }


def competitive_sets(H: StrategicGame) -> CompetitiveSets:
    if H.n_players != 2:
        raise PreconditionError("win and lose sets are defined for two players")
    out = []
    for i in (0, 1):
        j = 1 - i
        p_max = max(H.table[p][i] for p in H.profiles())
        win = tuple(
            k for k in H.support[i]
            if all(H.table[with_choice(o, i, k)][i] == p_max for o in H.opponent_profiles(i))
        )
        lose = tuple(
            k for k in H.support[j]
            if any(H.table[with_choice(o, j, k)][i] == p_max for o in H.opponent_profiles(j))
        )
        out.append(PlayerSets(i, p_max, win, lose))
    return CompetitiveSets(tuple(out))


def lose_removal_check(game: ExtensiveGame | StrategicGame) -> bool:
    """If ``win_i(Γ^k)`` is empty, ``lose_{-i}(Γ^k)`` is gone two rounds later, for every k."""
    run = sc_iterate(game)
    for k in range(run.trivial_at + 1):
        sets = competitive_sets(run.at(k))
        later = run.at(k + 2)
        for i in (0, 1):
            if not sets[i].win and set(sets[i].lose_opponent) & set(later.support[1 - i]):
                return False
    return True


# -- Zermelo -----------------------------------------------------------------------


class Verdict(enum.Enum):
    FIRST_WINS = "FirstWins"
    SECOND_WINS = "SecondWins"
    BOTH_DRAW = "BothDraw"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class GameVerdict:
    kind: Verdict
    # winning strategy of the winner, or a draw-guaranteeing strategy per player
    witnesses: tuple[Strategy | None, Strategy | None]

    @property
    def value(self) -> int:
        """Guaranteed payoff of player 1: 1, 0 or -1."""
        return {Verdict.FIRST_WINS: 1, Verdict.SECOND_WINS: -1, Verdict.BOTH_DRAW: 0}[self.kind]


def _winner_and_strategies(game: ExtensiveGame) -> tuple[int, list[Strategy]]:
    """Colour each node by the player who wins its subgame; linear in the tree size.

    Returns the root winner and, for both players, a strategy that wins
    every subgame that player's colour owns.
    """
    colour: dict[int, int] = {}
    choice: dict[int, int] = {}
    for v in game.postorder:
        if game.is_leaf(v):
            colour[v] = 0 if game.outcomes[v][0] == 1 else 1
            continue
        i = game.turn[v]
        good = [c for c in game.children[v] if colour[c] == i]
        if good:
            colour[v], choice[v] = i, good[0]
        else:
            colour[v], choice[v] = 1 - i, game.children[v][0]
    strategies = [
        Strategy(i, tuple((v, choice[v]) for v in game.decision_nodes(i))) for i in (0, 1)
    ]
    return colour[game.root], strategies


def zermelo(game: ExtensiveGame) -> GameVerdict:
    if is_win_or_lose(game):
        w, strats = _winner_and_strategies(game)
        witnesses = (strats[0], None) if w == 0 else (None, strats[1])
        return GameVerdict(Verdict.FIRST_WINS if w == 0 else Verdict.SECOND_WINS, witnesses)
    if not is_chess_like(game):
        raise PreconditionError("game is neither win-or-lose nor chess-like")
    zero = (Fraction(0), Fraction(0))
    # G1 counts a draw as a loss for player 1, G2 as a loss for player 2
    g1 = game.replace_outcomes(lambda o: (Fraction(-1), Fraction(1)) if o == zero else o)
    g2 = game.replace_outcomes(lambda o: (Fraction(1), Fraction(-1)) if o == zero else o)
    w1, s1 = _winner_and_strategies(g1)
    if w1 == 0:
        return GameVerdict(Verdict.FIRST_WINS, (s1[0], None))
    w2, s2 = _winner_and_strategies(g2)
    if w2 == 1:
        return GameVerdict(Verdict.SECOND_WINS, (None, s2[1]))
    return GameVerdict(Verdict.BOTH_DRAW, (s2[0], s1[1]))


def guarantees(game: ExtensiveGame, strategy: Strategy, level: Fraction | int, cap: int | None = None) -> bool:
    """Whether ``strategy`` secures at least ``level`` against every opponent strategy."""
    i = strategy.player
    j = 1 - i
    caps.check("opponent strategies for witness check", strategy_counts(game)[j], cap)
    for t in enumerate_strategies(game, j):
        moves = merge((strategy, t))
        if game.outcomes[play_from(game, moves, game.root)[-1]][i] < level:
            return False
    return True


def verify_verdict(game: ExtensiveGame, verdict: GameVerdict, cap: int | None = None) -> bool:
    """Re-check every witness against full opponent enumeration."""
    need = {
        Verdict.FIRST_WINS: (1, None),
        Verdict.SECOND_WINS: (None, 1),
        Verdict.BOTH_DRAW: (0, 0),
    }[verdict.kind]
    for i, level in enumerate(need):
        if level is None:
            continue
        s = verdict.witnesses[i]
        if s is None or s.player != i or not guarantees(game, s, level, cap):
            return False
    return True
