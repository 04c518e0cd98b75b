"""Finite strategic games: equilibria, dominance, IEWDS, TDI and maxmin.

A :class:`StrategicGame` keeps the full payoff table of the game it was
built from and a *support*, the surviving strategy indices per player.
Eliminating strategies only shrinks the support, so profile index tuples
stay meaningful across an entire elimination run.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from . import caps
from .errors import DomainError, InternalConsistencyError, ProtocolError
from .strategies import (
    AnyStrategy,
    enumerate_reduced,
    enumerate_strategies,
    merge,
    play_from,
    reduced_count,
    strategy_counts,
)
from .tree import ExtensiveGame, Outcome, as_outcome

Profile = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class StrategicGame:
    labels: tuple[tuple[str, ...], ...]
    table: Mapping[Profile, Outcome] = field(repr=False)
    support: tuple[tuple[int, ...], ...] | None = None
    # the extensive-form strategies behind each label, when built by to_strategic
    strategies: tuple[tuple[AnyStrategy, ...], ...] | None = field(default=None, repr=False)
    source: ExtensiveGame | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.support is None:
            object.__setattr__(self, "support", tuple(tuple(range(len(l))) for l in self.labels))

    @property
    def n_players(self) -> int:
        return len(self.labels)

    def payoff(self, profile: Profile) -> Outcome:
        return self.table[profile]

    def profiles(self) -> Iterator[Profile]:
        return itertools.product(*self.support)

    @property
    def num_profiles(self) -> int:
        return math.prod(len(s) for s in self.support)

    def opponent_profiles(self, player: int) -> Iterator[Profile]:
        """Profiles over the support with ``player``'s own entry set to -1."""
        parts = [(-1,) if j == player else s for j, s in enumerate(self.support)]
        return itertools.product(*parts)

    def outcomes(self) -> set[Outcome]:
        return {self.table[p] for p in self.profiles()}

    def is_trivial(self) -> bool:
        return len(self.outcomes()) == 1

    def restrict(self, support: Sequence[Iterable[int]]) -> StrategicGame:
        return StrategicGame(
            self.labels, self.table, tuple(tuple(sorted(s)) for s in support), self.strategies, self.source
        )

    def label(self, player: int, idx: int) -> str:
        return self.labels[player][idx]

    def profile_labels(self, profile: Profile) -> tuple[str, ...]:
        return tuple(self.labels[i][k] for i, k in enumerate(profile))

    def index_of(self, player: int, label: str) -> int:
        try:
            return self.labels[player].index(label)
        except ValueError:
            raise DomainError(f"player {player + 1} has no strategy {label!r}") from None

    def profile_of(self, labels: Sequence[str]) -> Profile:
        return tuple(self.index_of(i, lab) for i, lab in enumerate(labels))

    def surviving_labels(self) -> tuple[tuple[str, ...], ...]:
        return tuple(tuple(self.labels[i][k] for k in s) for i, s in enumerate(self.support))


def with_choice(profile: Profile, player: int, idx: int) -> Profile:
    return profile[:player] + (idx,) + profile[player + 1 :]


def strategic_game(labels: Sequence[Sequence[str]], payoffs) -> StrategicGame:
    """Build a game from labels and payoffs.

    ``payoffs`` is either a mapping from label tuples to payoff vectors, or,
    for two players, a list of rows of payoff pairs.
    """
    labels = tuple(tuple(str(x) for x in l) for l in labels)
    table: dict[Profile, Outcome] = {}
    if isinstance(payoffs, Mapping):
        for key, val in payoffs.items():
            prof = tuple(labels[i].index(k) for i, k in enumerate(key))
            table[prof] = as_outcome(val)
    else:
        if len(labels) != 2:
            raise DomainError("row-list payoffs need exactly two players")
        for r, row in enumerate(payoffs):
            for c, val in enumerate(row):
                table[(r, c)] = as_outcome(val)
    expected = math.prod(len(l) for l in labels)
    if len(table) != expected:
        raise DomainError(f"payoff table has {len(table)} entries, expected {expected}")
    return StrategicGame(labels, table)


def to_strategic(
    game: ExtensiveGame,
    reduced: bool = False,
    label_style: str = "actions",
    cap: int | None = None,
) -> StrategicGame:
    """``Γ(G)``: ``p_i(s) = o_i(leaf(s))``, optionally over reduced strategies."""
    counts = (
        [reduced_count(game, i) for i in range(game.n_players)] if reduced else strategy_counts(game)
    )
    caps.check("joint strategies of the strategic form", math.prod(counts), cap)
    enum = enumerate_reduced if reduced else enumerate_strategies
    strats = tuple(tuple(enum(game, i)) for i in range(game.n_players))
    labels = tuple(tuple(s.label(game, label_style) for s in ss) for ss in strats)
    for i, ls in enumerate(labels):
        if len(set(ls)) != len(ls):
            # fall back to a style that cannot collide
            labels = labels[:i] + (tuple(s.label(game, "named") for s in strats[i]),) + labels[i + 1 :]
    table = {}
    ranges = [range(len(ss)) for ss in strats]
    for prof in itertools.product(*ranges):
        moves = merge(strats[i][k] for i, k in enumerate(prof))
        table[prof] = game.outcomes[play_from(game, moves, game.root)[-1]]
    return StrategicGame(labels, table, None, strats, game)


# -- best responses and equilibria -----------------------------------------


def best_responses(H: StrategicGame, player: int, profile: Profile) -> list[int]:
    """Argmax of ``p_i(., s_{-i})`` over the player's support; never empty."""
    vals = {k: H.table[with_choice(profile, player, k)][player] for k in H.support[player]}
    best = max(vals.values())
    return [k for k in H.support[player] if vals[k] == best]


def is_nash(H: StrategicGame, profile: Profile) -> bool:
    for i in range(H.n_players):
        mine = H.table[profile][i]
        for k in H.support[i]:
            if H.table[with_choice(profile, i, k)][i] > mine:
                return False
    return True


def nash_equilibria(H: StrategicGame, cap: int | None = None) -> list[Profile]:
    """All pure Nash equilibria, by brute force, in profile order."""
    caps.check("profiles scanned for Nash equilibria", H.num_profiles, cap)
    return [p for p in H.profiles() if is_nash(H, p)]


# -- weak dominance ----------------------------------------------------------


def _payoff_vectors(H: StrategicGame, player: int) -> dict[int, list[Fraction]]:
    opp = list(H.opponent_profiles(player))
    return {
        k: [H.table[with_choice(o, player, k)][player] for o in opp] for k in H.support[player]
    }


def _dominates(a: list[Fraction], b: list[Fraction]) -> bool:
    strict = False
    for x, y in zip(a, b):
        if x < y:
            return False
        if x > y:
            strict = True
    return strict


def weakly_dominates(H: StrategicGame, player: int, a: int, b: int) -> bool:
    vecs = _payoff_vectors(H, player)
    return _dominates(vecs[a], vecs[b])


def weakly_dominated(H: StrategicGame, player: int) -> list[tuple[int, int]]:
    """``(dominated, witness)`` pairs; the witness is the least-index dominator."""
    vecs = _payoff_vectors(H, player)
    out = []
    for b in H.support[player]:
        for a in H.support[player]:
            if a != b and _dominates(vecs[a], vecs[b]):
                out.append((b, a))
                break
    return out


@dataclass(frozen=True)
class EliminationStep:
    round: int  # index of the snapshot this removal produced
    player: int
    removed: int
    witness: int | None  # least-index dominator in the pre-step game; None if not computed


@dataclass
class EliminationTrace:
    steps: list[EliminationStep] = field(default_factory=list)
    # snapshots[k] is the support after round k; snapshots[0] is the input support
    snapshots: list[tuple[tuple[int, ...], ...]] = field(default_factory=list)

    @property
    def rounds(self) -> int:
        return len(self.snapshots) - 1


@dataclass
class IEWDSResult:
    trace: EliminationTrace
    final: StrategicGame
    solved: bool


def _resolve_scripted(H: StrategicGame, item) -> tuple[int, int]:
    if isinstance(item, tuple):
        player, what = item
        return player, what if isinstance(what, int) else H.index_of(player, what)
    hits = [(i, H.labels[i].index(item)) for i in range(H.n_players) if item in H.labels[i]]
    if len(hits) != 1:
        raise ProtocolError(f"label {item!r} names {len(hits)} strategies; use (player, label)")
    return hits[0]


def iewds(H: StrategicGame, policy="max") -> IEWDSResult:
    """Iterated elimination of weakly dominated strategies.

    ``policy`` is ``"max"`` (drop every dominated strategy of every player each
    round), ``"greedy"`` (drop the least dominated strategy of the lowest
    player each round) or a sequence of removals, each a label or a
    ``(player, label_or_index)`` pair, checked for dominance at its step.
    """
    trace = EliminationTrace(snapshots=[H.support])
    cur = H
    if isinstance(policy, str):
        if policy not in ("max", "greedy"):
            raise DomainError(f"unknown policy {policy!r}")
        while True:
            found = [(i, d) for i in range(H.n_players) for d in weakly_dominated(cur, i)]
            if not found:
                break
            if policy == "greedy":
                found = found[:1]
            rnd = trace.rounds + 1
            support = [set(s) for s in cur.support]
            for i, (b, a) in found:
                trace.steps.append(EliminationStep(rnd, i, b, a))
                support[i].discard(b)
            for i, s in enumerate(support):
                if not s:
                    raise InternalConsistencyError(f"elimination emptied player {i + 1}'s strategies")
            cur = cur.restrict(support)
            trace.snapshots.append(cur.support)
    else:
        for step_no, item in enumerate(policy, 1):
            i, b = _resolve_scripted(cur, item)
            if b not in cur.support[i]:
                raise ProtocolError(f"step {step_no}: {H.labels[i][b]!r} was already removed")
            witness = dict(weakly_dominated(cur, i)).get(b)
            if witness is None:
                raise ProtocolError(
                    f"step {step_no}: {H.labels[i][b]!r} of player {i + 1} is not weakly dominated"
                )
            trace.steps.append(EliminationStep(step_no, i, b, witness))
            cur = cur.restrict([set(s) - {b} if j == i else s for j, s in enumerate(cur.support)])
            trace.snapshots.append(cur.support)
    return IEWDSResult(trace, cur, cur.is_trivial())


def max_round(H: StrategicGame) -> StrategicGame:
    """``H^1`` under the max policy."""
    support = [set(s) for s in H.support]
    for i in range(H.n_players):
        for b, _ in weakly_dominated(H, i):
            support[i].discard(b)
    return H.restrict(support)


def surviving_cover_check(H: StrategicGame, trace: EliminationTrace) -> bool:
    """Every original ``s_i`` is weakly matched by a survivor against surviving opponents.

    Checked at every snapshot of the run, not only the last.
    """
    for support in trace.snapshots[1:]:
        G = H.restrict(support)
        for i in range(H.n_players):
            opp = list(G.opponent_profiles(i))
            for s in H.support[i]:
                ok = any(
                    all(H.table[with_choice(o, i, t)][i] >= H.table[with_choice(o, i, s)][i] for o in opp)
                    for t in G.support[i]
                )
                if not ok:
                    return False
    return True


# -- TDI and maxmin ------------------------------------------------------------


@dataclass(frozen=True)
class TDIResult:
    holds: bool
    # (player, r_i, t_i, profile with r_i in the player's slot)
    counterexample: tuple[int, int, int, Profile] | None = None


def tdi_check(H: StrategicGame) -> TDIResult:
    for i in range(H.n_players):
        sup = H.support[i]
        for a, r in enumerate(sup):
            for t in sup[a + 1 :]:
                for o in H.opponent_profiles(i):
                    pr, pt = with_choice(o, i, r), with_choice(o, i, t)
                    if H.table[pr][i] == H.table[pt][i] and H.table[pr] != H.table[pt]:
                        return TDIResult(False, (i, r, t, pr))
    return TDIResult(True)


def security_levels(H: StrategicGame, player: int) -> dict[int, Fraction]:
    opp = list(H.opponent_profiles(player))
    return {k: min(H.table[with_choice(o, player, k)][player] for o in opp) for k in H.support[player]}


def maxmin(H: StrategicGame, player: int) -> Fraction:
    return max(security_levels(H, player).values())


def security_strategies(H: StrategicGame, player: int) -> list[int]:
    lv = security_levels(H, player)
    best = max(lv.values())
    return [k for k in H.support[player] if lv[k] == best]


def is_strictly_competitive(H: StrategicGame) -> bool:
    if H.n_players != 2:
        return False
    outs = sorted(H.outcomes())
    return all(
        (a[i] >= b[i]) == (a[1 - i] <= b[1 - i]) for a in outs for b in outs for i in (0, 1)
    )
