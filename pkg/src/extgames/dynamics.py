"""Improvement paths, the finite improvement property, and a weak potential for extensive games."""

from __future__ import annotations

import enum
import graphlib
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import caps
from .errors import DomainError, InternalConsistencyError, PreconditionError, ProtocolError
from .strategic import Profile, StrategicGame, is_nash, to_strategic, with_choice
from .strategies import JointStrategy, Strategy, merge, play_from
from .tree import ExtensiveGame


@dataclass(frozen=True)
class ImprovementStep:
    source: Profile
    target: Profile
    deviator: int
    gain: Fraction


class PathStatus(enum.Enum):
    NASH_REACHED = "NashReached"
    CYCLE_DETECTED = "CycleDetected"
    TRUNCATED = "Truncated"

    def __str__(self) -> str:
        return self.value


@dataclass
class ImprovementPath:
    profiles: list[Profile]
    steps: list[ImprovementStep]
    status: PathStatus
    # potential after each profile, for the potential-guided scheduler
    potentials: list[tuple[int, ...]] = field(default_factory=list)


def profitable_deviations(H: StrategicGame, s: Profile) -> list[ImprovementStep]:
    """Every ``s -> s'``, in (player, strategy index) order."""
    out = []
    for i in range(H.n_players):
        mine = H.table[s][i]
        for k in H.support[i]:
            t = with_choice(s, i, k)
            gain = H.table[t][i] - mine
            if gain > 0:
                out.append(ImprovementStep(s, t, i, gain))
    return out


def _scripted_target(H: StrategicGame, s: Profile, item) -> Profile:
    player, what = item
    idx = what if isinstance(what, int) else H.index_of(player, what)
    return with_choice(s, player, idx)


def improvement_path(
    H: StrategicGame | ExtensiveGame,
    start: Profile | Sequence[str],
    scheduler: str = "first",
    max_steps: int = 10_000,
    seed: int | None = None,
    script: Sequence[tuple[int, int | str]] | None = None,
) -> ImprovementPath:
    """Follow profitable deviations from ``start`` until none is left.

    Schedulers: ``first`` (lowest player, lowest improving strategy),
    ``best-gain`` (largest gain, ties by that same order), ``random``
    (uniform with ``seed``), ``scripted`` (the ``(player, strategy)``
    deviations in ``script``, each of which must be profitable) and
    ``potential`` (the weak-potential step; extensive games only).
    """
    if isinstance(H, ExtensiveGame):
        H = to_strategic(H)
    if scheduler == "potential" and (H.source is None or H.strategies is None
                                     or not isinstance(H.strategies[0][0], Strategy)):
        raise PreconditionError("potential-guided scheduler needs the strategic form of an extensive game")
    if scheduler not in ("first", "best-gain", "random", "scripted", "potential"):
        raise DomainError(f"unknown scheduler {scheduler!r}")
    if scheduler == "scripted" and script is None:
        raise DomainError("scripted scheduler needs a script")
    s = tuple(start) if all(isinstance(x, int) for x in start) else H.profile_of(start)
    rng = random.Random(seed)
    index = None
    if scheduler == "potential":
        index = [{st: k for k, st in enumerate(ss)} for ss in H.strategies]

    def joint(p: Profile) -> JointStrategy:
        return tuple(H.strategies[i][k] for i, k in enumerate(p))

    path = ImprovementPath([s], [], PathStatus.TRUNCATED)
    if scheduler == "potential":
        path.potentials.append(weak_potential(H.source, joint(s)).bits)
    seen = {s}
    script_iter = iter(script or ())
    for _ in range(max_steps + 1):
        options = profitable_deviations(H, s)
        if not options:
            path.status = PathStatus.NASH_REACHED
            return path
        if len(path.steps) == max_steps:
            break
        if scheduler == "first":
            step = options[0]
        elif scheduler == "best-gain":
            step = max(options, key=lambda st: st.gain)
        elif scheduler == "random":
            step = rng.choice(options)
        elif scheduler == "scripted":
            item = next(script_iter, None)
            if item is None:
                break
            t = _scripted_target(H, s, item)
            step = next((st for st in options if st.target == t), None)
            if step is None:
                raise ProtocolError(f"scripted deviation {item!r} from {H.profile_labels(s)} is not profitable")
        else:
            g = guided_deviation(H.source, joint(s))
            t = tuple(index[i][st] for i, st in enumerate(g.target))
            step = ImprovementStep(s, t, g.deviator, g.gain)
        s = step.target
        path.steps.append(step)
        path.profiles.append(s)
        if scheduler == "potential":
            path.potentials.append(weak_potential(H.source, joint(s)).bits)
        if s in seen:
            path.status = PathStatus.CYCLE_DETECTED
            return path
        seen.add(s)
    path.status = PathStatus.TRUNCATED
    return path


# -- weak potential --------------------------------------------------------------


@dataclass(frozen=True)
class PotentialVector:
    bits: tuple[int, ...]
    node_list: tuple[int, ...]  # children always precede their parent

    def __lt__(self, other: PotentialVector) -> bool:
        return self.bits < other.bits


def _best_values(game: ExtensiveGame, moves: dict[int, int], player: int) -> dict[int, Fraction]:
    """Best payoff ``player`` can reach in each ``G^v`` with everyone else fixed by ``moves``."""
    val: dict[int, Fraction] = {}
    for v in game.postorder:
        if game.is_leaf(v):
            val[v] = game.outcomes[v][player]
        elif game.turn[v] == player:
            val[v] = max(val[c] for c in game.children[v])
        else:
            val[v] = val[moves[v]]
    return val


def _continuation(game: ExtensiveGame, moves: dict[int, int]) -> dict[int, int]:
    leaf: dict[int, int] = {}
    for v in game.postorder:
        leaf[v] = v if game.is_leaf(v) else leaf[moves[v]]
    return leaf


def weak_potential(game: ExtensiveGame, s: JointStrategy) -> PotentialVector:
    """``P(s)`` over the post-order node list; leaf bits are 1.

    ``R(s, v)`` is 1 when the mover's part of ``s^v`` is a best response in
    ``G^v``. The best reachable payoff is found by optimising over the
    mover's subtree choices with the other players' moves held fixed, which
    equals the maximum over all of the mover's subgame strategies.
    """
    moves = merge(s)
    cont = _continuation(game, moves)
    best = {i: _best_values(game, moves, i) for i in range(game.n_players)}
    bits = []
    for v in game.postorder:
        if game.is_leaf(v):
            bits.append(1)
            continue
        i = game.turn[v]
        bits.append(int(game.outcomes[cont[v]][i] == best[i][v]))
    return PotentialVector(tuple(bits), game.postorder)


def _joint_step(game: ExtensiveGame, s: JointStrategy, i: int, new_moves: dict[int, int]):
    strat = Strategy(i, tuple((v, new_moves[v]) for v in game.decision_nodes(i)))
    return s[:i] + (strat,) + s[i + 1 :]


@dataclass(frozen=True)
class GuidedStep:
    source: JointStrategy
    target: JointStrategy
    deviator: int
    gain: Fraction
    potential_before: PotentialVector
    potential_after: PotentialVector


def guided_deviation(game: ExtensiveGame, s: JointStrategy, preserve: bool = True) -> GuidedStep:
    """A profitable deviation that strictly raises the weak potential.

    The lowest player not best-responding switches to a best response
    ``t_i`` spliced onto ``s_i`` along ``play(t_i, s_{-i})``. With
    ``preserve`` (the default) ``t_i`` keeps ``s_i``'s choice wherever that
    choice already attains the best reachable payoff; an arbitrary best
    response can lower an earlier potential bit. The lexicographic increase
    is always re-checked.
    """
    moves = merge(s)
    leaf = play_from(game, moves, game.root)[-1]
    deviator = None
    for i in range(game.n_players):
        val = _best_values(game, moves, i)
        if val[game.root] > game.outcomes[leaf][i]:
            deviator = i
            break
    if deviator is None:
        raise PreconditionError("joint strategy is already a Nash equilibrium")
    i = deviator

    t = dict(moves)
    for v in game.decision_nodes(i):
        arg = [c for c in game.children[v] if val[c] == val[v]]
        t[v] = moves[v] if preserve and moves[v] in arg else arg[0]
    on_path = set(play_from(game, t, game.root))
    spliced = {v: (t[v] if v in on_path else moves[v]) for v in game.decision_nodes(i)}
    target = _joint_step(game, s, i, spliced)

    new_leaf = play_from(game, merge(target), game.root)[-1]
    gain = game.outcomes[new_leaf][i] - game.outcomes[leaf][i]
    before, after = weak_potential(game, s), weak_potential(game, target)
    if gain <= 0 or not before.bits < after.bits:
        raise InternalConsistencyError(
            f"guided step for player {i + 1} failed: gain {gain}, potential {before.bits} -> {after.bits}"
        )
    return GuidedStep(s, target, i, gain, before, after)


# -- FIP ----------------------------------------------------------------------------


@dataclass(frozen=True)
class FIPResult:
    has_fip: bool
    cycle: tuple[Profile, ...] | None = None  # shortest cycle, starting at its least profile


def improvement_graph(H: StrategicGame) -> dict[Profile, list[Profile]]:
    caps.check("profiles of the improvement graph", H.num_profiles)
    return {s: [st.target for st in profitable_deviations(H, s)] for s in H.profiles()}


def _shortest_cycle(graph: dict[Profile, list[Profile]]) -> tuple[Profile, ...]:
    best: tuple[Profile, ...] | None = None
    for root in sorted(graph):
        # BFS for the shortest path root -> ... -> root
        prev: dict[Profile, Profile] = {}
        queue = deque([root])
        found = False
        while queue and not found:
            u = queue.popleft()
            for w in graph[u]:
                if w == root:
                    prev[root] = u
                    found = True
                    break
                if w not in prev:
                    prev[w] = u
                    queue.append(w)
        if not found:
            continue
        cyc = [root]
        u = prev[root]
        while u != root:
            cyc.append(u)
            u = prev[u]
        cyc = tuple([root] + list(reversed(cyc[1:])))
        if best is None or (len(cyc), cyc) < (len(best), best):
            best = cyc
    if best is None:
        raise InternalConsistencyError("cycle reported but none found")
    return best


def fip_analysis(H: StrategicGame) -> FIPResult:
    graph = improvement_graph(H)
    try:
        tuple(graphlib.TopologicalSorter({u: set(vs) for u, vs in graph.items()}).static_order())
    except graphlib.CycleError:
        return FIPResult(False, _shortest_cycle(graph))
    return FIPResult(True)


def verify_path(H: StrategicGame, path: ImprovementPath) -> bool:
    """Each step is a profitable unilateral deviation; a Nash terminal has no deviations."""
    for a, b, st in zip(path.profiles, path.profiles[1:], path.steps):
        diff = [k for k in range(H.n_players) if a[k] != b[k]]
        if diff != [st.deviator] or H.table[b][st.deviator] - H.table[a][st.deviator] != st.gain or st.gain <= 0:
            return False
    if path.status is PathStatus.NASH_REACHED:
        return is_nash(H, path.profiles[-1])
    return True
