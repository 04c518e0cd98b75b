"""Backward induction, subgame perfect equilibria and their link to weak dominance."""

from __future__ import annotations

import itertools
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import caps
from .errors import DomainError, InternalConsistencyError, PreconditionError, ProtocolError
from .strategic import EliminationStep, EliminationTrace, StrategicGame, nash_equilibria, to_strategic, weakly_dominated
from .strategies import JointStrategy, Strategy, joint_from_moves, merge, play_from
from .tree import ExtensiveGame, Outcome, subgame, without_relevant_ties


def continuation_leaves(game: ExtensiveGame, moves: Mapping[int, int]) -> dict[int, int]:
    """``leaf(s^x)`` for every node ``x``."""
    out: dict[int, int] = {}
    for v in game.postorder:
        out[v] = v if game.is_leaf(v) else out[moves[v]]
    return out


# -- SPE checks ------------------------------------------------------------------


def _subgame_data(game: ExtensiveGame, w: int):
    key = ("spe-def", w)
    if key not in game._cache:
        sub = subgame(game, w)
        H = to_strategic(sub)
        index = [{s: k for k, s in enumerate(ss)} for ss in H.strategies]
        to_sub = {v: k for k, v in enumerate(sub.origin)}
        game._cache[key] = (sub, to_sub, index, set(nash_equilibria(H)))
    return game._cache[key]


def _restrict(game: ExtensiveGame, moves: Mapping[int, int], w: int):
    sub, to_sub, index, ne = _subgame_data(game, w)
    prof = []
    for i in range(game.n_players):
        s = Strategy(i, tuple((k, to_sub[moves[sub.origin[k]]]) for k in sub.decision_nodes(i)))
        prof.append(index[i][s])
    return tuple(prof), ne


def is_spe(game: ExtensiveGame, s: JointStrategy, mode: str = "one_deviation") -> bool:
    """Subgame perfection of ``s``.

    ``definition`` checks that ``s^w`` is a Nash equilibrium of the strategic
    form of every subgame ``G^w`` by brute force. ``one_deviation`` checks that
    every mover picks a child maximising its payoff under ``s``'s own
    continuation.
    """
    moves = merge(s)
    if mode == "definition":
        total = math.prod(len(game.children[v]) for v in game.nonleaves)
        caps.check("joint strategies for definition-mode SPE check", total)
        for w in game.nonleaves:
            prof, ne = _restrict(game, moves, w)
            if prof not in ne:
                return False
        return True
    if mode != "one_deviation":
        raise DomainError(f"unknown mode {mode!r}")
    cont = continuation_leaves(game, moves)
    for u in game.nonleaves:
        i = game.turn[u]
        best = max(game.outcomes[cont[x]][i] for x in game.children[u])
        if game.outcomes[cont[moves[u]]][i] != best:
            return False
    return True


# -- single backward induction run ---------------------------------------------


@dataclass
class BIResult:
    strategy: JointStrategy
    extended_outcomes: dict[int, Outcome]
    order: list[int] = field(default_factory=list)  # nodes in the order they were processed

    @property
    def moves(self) -> dict[int, int]:
        return merge(self.strategy)

    @property
    def outcome(self) -> Outcome:
        return self.extended_outcomes[0]


def _scripted_child(game: ExtensiveGame, v: int, want) -> int:
    if isinstance(want, int):
        if want not in game.children[v]:
            raise ProtocolError(f"node {game.node_label(v)}: {want} is not a child")
        return want
    return game.child_by_action(v, str(want))


def bi_run(
    game: ExtensiveGame,
    tie_break="first",
    seed: int | None = None,
    order: str = "first",
) -> BIResult:
    """One execution of the backward induction algorithm.

    ``tie_break`` resolves argmax ties: ``"first"`` takes the lowest child,
    ``"random"`` draws with ``seed``, and a mapping ``node -> child id or
    action`` scripts the choice (unscripted nodes fall back to the first
    argmax). ``order`` picks the next preleaf: ``"first"`` (lowest id) or
    ``"random"``.
    """
    if isinstance(tie_break, Mapping):
        stray = [v for v in tie_break if not (isinstance(v, int) and 0 <= v < game.num_nodes and game.children[v])]
        if stray:
            raise DomainError(f"scripted tie-breaks name nodes that are not decision nodes: {stray}")
    rng = random.Random(seed)
    ext: dict[int, Outcome] = {z: game.outcomes[z] for z in game.leaves}
    moves: dict[int, int] = {}
    pending = set(game.nonleaves)
    processed: list[int] = []
    while pending:
        ready = sorted(v for v in pending if all(c in ext for c in game.children[v]))
        v = ready[0] if order == "first" else rng.choice(ready)
        i = game.turn[v]
        best = max(ext[c][i] for c in game.children[v])
        arg = [c for c in game.children[v] if ext[c][i] == best]
        if isinstance(tie_break, Mapping) and v in tie_break:
            w = _scripted_child(game, v, tie_break[v])
            if w not in arg:
                raise ProtocolError(
                    f"node {game.node_label(v)}: scripted child {game.action_of(v, w)!r} is not an argmax"
                )
        elif tie_break == "random":
            w = rng.choice(arg)
        else:
            w = arg[0]
        moves[v] = w
        ext[v] = ext[w]
        pending.discard(v)
        processed.append(v)
    return BIResult(joint_from_moves(game, moves), {v: ext[v] for v in range(game.num_nodes)}, processed)


# -- all executions ------------------------------------------------------------


@dataclass
class SpeSet:
    count: int
    # node -> {achievable outcome of G^v: number of SPE of G^v reaching it}
    node_counts: dict[int, dict[Outcome, int]]
    explicit: list[JointStrategy] | None
    truncated: bool

    def outcomes(self) -> set[Outcome]:
        return set(self.node_counts[0])


def spe_counts(game: ExtensiveGame) -> dict[int, dict[Outcome, int]]:
    """Per-node SPE counts keyed by outcome, children combined before parents."""
    counts: dict[int, dict[Outcome, int]] = {}
    for v in game.postorder:
        if game.is_leaf(v):
            counts[v] = {game.outcomes[v]: 1}
            continue
        i = game.turn[v]
        acc: dict[Outcome, int] = defaultdict(int)
        per_child = [list(counts[c].items()) for c in game.children[v]]
        for combo in itertools.product(*per_child):
            weight = math.prod(n for _, n in combo)
            best = max(o[i] for o, _ in combo)
            for o, _ in combo:
                if o[i] == best:
                    acc[o] += weight
        counts[v] = dict(acc)
    return counts


def _families(game: ExtensiveGame, v: int) -> list[tuple[tuple[tuple[int, int], ...], Outcome]]:
    # every SPE of G^v as (moves inside T^v, outcome)
    if game.is_leaf(v):
        return [((), game.outcomes[v])]
    i = game.turn[v]
    per_child = [_families(game, c) for c in game.children[v]]
    out = []
    for combo in itertools.product(*per_child):
        best = max(o[i] for _, o in combo)
        inner = tuple(itertools.chain.from_iterable(m for m, _ in combo))
        for c, (_, o) in zip(game.children[v], combo):
            if o[i] == best:
                out.append((((v, c),) + inner, o))
    return out


def bi_enumerate(game: ExtensiveGame, expansion_cap: int | None = None) -> SpeSet:
    """Every subgame perfect equilibrium, i.e. every execution of backward induction.

    The count is exact at any size; the explicit list is produced only when
    the count does not exceed ``expansion_cap``.
    """
    cap = caps.spe_expansion_cap() if expansion_cap is None else expansion_cap
    counts = spe_counts(game)
    total = sum(counts[game.root].values())
    if total > cap:
        return SpeSet(total, counts, None, True)
    explicit = [joint_from_moves(game, dict(m)) for m, _ in _families(game, game.root)]
    if len(explicit) != total:
        raise InternalConsistencyError(f"SPE count {total} but {len(explicit)} expanded")
    return SpeSet(total, counts, explicit, False)


def unique_spe(game: ExtensiveGame) -> JointStrategy:
    """``s*`` of a game without relevant ties."""
    spe = bi_enumerate(game, expansion_cap=1)
    if spe.count != 1:
        raise PreconditionError(f"game has {spe.count} subgame perfect equilibria, not one")
    return bi_run(game).strategy


# -- reachability and elimination-driven backward induction -----------------------


def reach_check(game: ExtensiveGame, strategy: Strategy, node: int) -> bool:
    """Whether some opponent completion routes the play through ``node``.

    Equivalent to: at every ancestor of ``node`` where this player moves, the
    strategy picks the child leading towards ``node``.
    """
    if game.is_leaf(node) or game.turn[node] != strategy.player:
        raise DomainError(f"node {game.node_label(node)} is not a decision node of player {strategy.player + 1}")
    path = game.path_to(node)
    return all(
        strategy.moves[u] == nxt for u, nxt in zip(path, path[1:]) if game.turn[u] == strategy.player
    )


@dataclass
class EBIResult:
    bi: BIResult
    trace: EliminationTrace
    final: StrategicGame
    spe_profile: tuple[int, ...]

    @property
    def trivial(self) -> bool:
        return self.final.is_trivial()

    @property
    def contains_spe(self) -> bool:
        return all(k in sup for k, sup in zip(self.spe_profile, self.final.support))


def ebi_run(game: ExtensiveGame, slow_check: bool = False, cap: int | None = None) -> EBIResult:
    """Backward induction that also prunes the strategic form as it goes.

    After fixing ``w`` at preleaf ``v``, every strategy of the mover that can
    reach ``v`` but picks another child there is removed. With
    ``slow_check`` each removal is certified weakly dominated in the game
    current at that step and the dominator is recorded as witness.
    """
    if not without_relevant_ties(game):
        raise PreconditionError("Algorithm needs a game without relevant ties")
    H = to_strategic(game, cap=cap)
    trace = EliminationTrace(snapshots=[H.support])
    cur = H
    ext: dict[int, Outcome] = {z: game.outcomes[z] for z in game.leaves}
    moves: dict[int, int] = {}
    pending = set(game.nonleaves)
    order: list[int] = []
    while pending:
        v = min(u for u in pending if all(c in ext for c in game.children[u]))
        i = game.turn[v]
        w = max(game.children[v], key=lambda c: ext[c][i])
        moves[v] = w
        ext[v] = ext[w]
        pending.discard(v)
        order.append(v)

        doomed = [
            k for k in cur.support[i]
            if H.strategies[i][k].moves[v] != w and reach_check(game, H.strategies[i][k], v)
        ]
        if not doomed:
            continue
        witnesses = dict(weakly_dominated(cur, i)) if slow_check else {}
        rnd = trace.rounds + 1
        for k in doomed:
            wit = witnesses.get(k)
            if slow_check and wit is None:
                raise InternalConsistencyError(
                    f"removed strategy {H.labels[i][k]!r} is not weakly dominated at node {game.node_label(v)}"
                )
            trace.steps.append(EliminationStep(rnd, i, k, wit))
        cur = cur.restrict([set(s) - set(doomed) if j == i else s for j, s in enumerate(cur.support)])
        if not cur.support[i]:
            raise InternalConsistencyError(f"player {i + 1} lost every strategy")
        trace.snapshots.append(cur.support)

    bi = BIResult(joint_from_moves(game, moves), {u: ext[u] for u in range(game.num_nodes)}, order)
    index = [{s: k for k, s in enumerate(ss)} for ss in H.strategies]
    spe_profile = tuple(index[i][s] for i, s in enumerate(bi.strategy))
    return EBIResult(bi, trace, cur, spe_profile)


def realised_leaf(game: ExtensiveGame, s: Sequence[Strategy]) -> int:
    return play_from(game, merge(s), game.root)[-1]
