"""Knowledge systems, common knowledge of rationality, and the backward induction event.

Events are frozensets of state names; complements are taken relative to
the system's state set. Common knowledge is the greatest fixpoint of the
"everybody knows" operator: ``E``, ``K E``, ``K(K E)``, ... decreases and
stabilises within ``|Ω|`` steps.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from . import caps
from .backward import bi_enumerate
from .errors import PreconditionError, ValidationError
from .strategies import JointStrategy, Strategy, enumerate_strategies, merge, play_from, strategy_counts
from .tree import ExtensiveGame, without_relevant_ties

Event = frozenset


@dataclass(frozen=True)
class KnowledgeSystem:
    states: tuple[str, ...]
    assignment: Mapping[str, JointStrategy] = field(hash=False)
    partitions: tuple[tuple[frozenset, ...], ...] = ()  # one partition of the states per player

    def __post_init__(self):
        # blocks are kept in state order so that equal partitions compare equal
        rank = {w: k for k, w in enumerate(self.states)}

        def key(block):
            return sorted((rank.get(w, len(rank)), w) for w in block)

        object.__setattr__(
            self, "partitions", tuple(tuple(sorted(map(frozenset, p), key=key)) for p in self.partitions)
        )

    @property
    def omega(self) -> Event:
        return frozenset(self.states)

    def order(self, event) -> list[str]:
        """Members of ``event`` in state order."""
        return [w for w in self.states if w in event]

    def block_of(self, player: int, state: str) -> frozenset:
        for b in self.partitions[player]:
            if state in b:
                return b
        raise ValidationError(f"state {state!r} is in no block of player {player + 1}", [])

    def strategy_event(self, player: int, t: Strategy) -> Event:
        """``[s_i = t_i]``."""
        return frozenset(w for w in self.states if self.assignment[w][player] == t)


def ks_violations(ks: KnowledgeSystem, game: ExtensiveGame | None = None) -> list[str]:
    out = []
    if not ks.states:
        out.append("state set is empty")
    if len(set(ks.states)) != len(ks.states):
        out.append("state names repeat")
    omega = ks.omega
    for w in ks.states:
        if w not in ks.assignment:
            out.append(f"state {w!r} has no assignment")
    for w in ks.assignment:
        if w not in omega:
            out.append(f"assignment names unknown state {w!r}")
    n = game.n_players if game is not None else len(ks.partitions)
    if len(ks.partitions) != n:
        out.append(f"{len(ks.partitions)} partitions for {n} players")
    for i, blocks in enumerate(ks.partitions):
        seen: set[str] = set()
        for b in blocks:
            if not b:
                out.append(f"player {i + 1}: empty block")
            if b & seen:
                out.append(f"player {i + 1}: blocks overlap on {sorted(b & seen)}")
            if b - omega:
                out.append(f"player {i + 1}: block mentions unknown states {sorted(b - omega)}")
            seen |= b
        if omega - seen:
            out.append(f"player {i + 1}: states {ks.order(omega - seen)} are in no block")
    if out:
        return out
    for w in ks.states:
        joint = ks.assignment[w]
        if len(joint) != n:
            out.append(f"state {w!r}: {len(joint)} strategies for {n} players")
            continue
        if game is not None:
            for i, s in enumerate(joint):
                if s.player != i or tuple(v for v, _ in s.choices) != game.decision_nodes(i):
                    out.append(f"state {w!r}: entry {i + 1} is not a strategy of player {i + 1}")
    if out:
        return out
    for i, blocks in enumerate(ks.partitions):
        for b in blocks:
            if len({ks.assignment[w][i] for w in b}) > 1:
                out.append(f"player {i + 1}: strategy varies within block {ks.order(b)}")
    return out


def check_system(ks: KnowledgeSystem, game: ExtensiveGame | None = None) -> None:
    bad = ks_violations(ks, game)
    if bad:
        raise ValidationError("invalid knowledge system: " + "; ".join(bad), bad)


# -- knowledge operators --------------------------------------------------------------


def know(ks: KnowledgeSystem, player: int, event) -> Event:
    """``K_i E``: the union of the player's blocks inside ``E``."""
    out: set[str] = set()
    for b in ks.partitions[player]:
        if b <= event:
            out |= b
    return frozenset(out)


def everybody_knows(ks: KnowledgeSystem, event) -> Event:
    out = ks.omega
    for i in range(len(ks.partitions)):
        out &= know(ks, i, event)
    return out


def common_knowledge(ks: KnowledgeSystem, event) -> Event:
    cur = frozenset(event)
    for _ in range(len(ks.states) + 1):
        nxt = everybody_knows(ks, cur)
        if nxt == cur:
            return cur
        cur = nxt
    raise AssertionError("common knowledge iteration did not stabilise")


def complement(ks: KnowledgeSystem, event) -> Event:
    return ks.omega - event


# -- rationality and the backward induction event ----------------------------------------------


def _leaf_from(game: ExtensiveGame, moves, v: int) -> int:
    return play_from(game, moves, v)[-1]


def rationality_event(ks: KnowledgeSystem, game: ExtensiveGame, player: int, cap: int | None = None) -> Event:
    """``R_i``: at no own node does the player know of a strictly better strategy."""
    caps.check(f"strategies of player {player + 1}", strategy_counts(game)[player], cap)
    alternatives = enumerate_strategies(game, player)
    out = ks.omega
    for v in game.decision_nodes(player):
        for t in alternatives:
            better = set()
            for w in ks.states:
                joint = ks.assignment[w]
                moves = merge(joint)
                now = game.outcomes[_leaf_from(game, moves, v)][player]
                moves.update(t.moves)
                if game.outcomes[_leaf_from(game, moves, v)][player] > now:
                    better.add(w)
            out &= complement(ks, know(ks, player, frozenset(better)))
    return out


def rationality_all(ks: KnowledgeSystem, game: ExtensiveGame, cap: int | None = None) -> Event:
    out = ks.omega
    for i in range(game.n_players):
        out &= rationality_event(ks, game, i, cap)
    return out


def node_event(ks: KnowledgeSystem, v: int, child: int) -> Event:
    """``[s(v) = child]``."""
    return frozenset(w for w in ks.states if merge(ks.assignment[w])[v] == child)


def bi_event(ks: KnowledgeSystem, spe: JointStrategy) -> Event:
    """``I = [s = s*]``."""
    return frozenset(w for w in ks.states if tuple(ks.assignment[w]) == tuple(spe))


@dataclass(frozen=True)
class StateTrace:
    state: str
    # non-leaf node -> whether the state agrees with s* there (membership in I^v)
    nodes: tuple[tuple[int, bool], ...]

    @property
    def failing(self) -> list[int]:
        return [v for v, ok in self.nodes if not ok]


@dataclass(frozen=True)
class CKRResult:
    holds: bool
    rationality: Event
    ckr: Event
    bi: Event
    spe: JointStrategy
    violations: tuple[StateTrace, ...] = ()


def ckr_check(ks: KnowledgeSystem, game: ExtensiveGame, cap: int | None = None) -> CKRResult:
    """Check that common knowledge of rationality implies the backward induction outcome."""
    if not without_relevant_ties(game):
        raise PreconditionError("game has relevant ties; backward induction is not unique")
    check_system(ks, game)
    spe = bi_enumerate(game, expansion_cap=1)
    if spe.count != 1 or spe.explicit is None:
        raise PreconditionError(f"expected a unique subgame perfect equilibrium, found {spe.count}")
    star = spe.explicit[0]
    R = rationality_all(ks, game, cap)
    ckr = common_knowledge(ks, R)
    I = bi_event(ks, star)
    star_moves = merge(star)
    bad = []
    for w in ks.order(ckr - I):
        moves = merge(ks.assignment[w])
        bad.append(StateTrace(w, tuple((v, moves[v] == star_moves[v]) for v in game.nonleaves)))
    return CKRResult(not bad, R, ckr, I, star, tuple(bad))


# -- constructing systems ------------------------------------------------------------------


def singleton_system(game: ExtensiveGame, state: str = "w") -> KnowledgeSystem:
    """One state assigned the unique subgame perfect equilibrium."""
    spe = bi_enumerate(game, expansion_cap=1)
    if spe.count != 1 or spe.explicit is None:
        raise PreconditionError(f"expected a unique subgame perfect equilibrium, found {spe.count}")
    return KnowledgeSystem(
        (state,), {state: spe.explicit[0]}, tuple((frozenset({state}),) for _ in range(game.n_players))
    )


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """Every partition of ``items`` into non-empty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1 :]
        yield [[first]] + part


def random_system(game: ExtensiveGame, n_states: int, rng: random.Random) -> KnowledgeSystem:
    """A valid system: uniform partitions per player, one random strategy per block."""
    states = tuple(f"w{k}" for k in range(n_states))
    all_parts = list(set_partitions(list(states)))
    partitions = []
    per_state: dict[str, list] = {w: [None] * game.n_players for w in states}
    for i in range(game.n_players):
        part = rng.choice(all_parts)
        blocks = tuple(frozenset(b) for b in part)
        partitions.append(blocks)
        pool = enumerate_strategies(game, i)
        for b in blocks:
            s = rng.choice(pool)
            for w in b:
                per_state[w][i] = s
    assignment = {w: tuple(v) for w, v in per_state.items()}
    return KnowledgeSystem(states, assignment, tuple(partitions))
