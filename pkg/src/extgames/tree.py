"""Finite game trees with perfect information.

Nodes are dense integers ``0..|V|-1`` with the root at 0. Games built with
:func:`from_tree` (and everything the parser returns) number nodes in
document order, i.e. depth-first preorder with children in declaration
order. Players are 0-based in the Python API; files and reports show them
1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Iterator, Sequence

from .errors import DomainError

Outcome = tuple[Fraction, ...]


def as_outcome(values: Iterable) -> Outcome:
    """Convert payoffs to an exact rational outcome. Floats are rejected."""
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (Rational, str)):
            raise TypeError(f"payoff {v!r} is not an exact rational")
        out.append(Fraction(v))
    return tuple(out)


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_outcome(o: Sequence[Fraction]) -> str:
    return "(" + ",".join(format_rational(x) for x in o) + ")"


# -- nested construction ----------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    payoffs: tuple
    name: str | None = None


@dataclass(frozen=True)
class Decision:
    player: int  # 0-based
    branches: tuple  # ((action, Leaf | Decision), ...)
    name: str | None = None


def leaf(*payoffs, name: str | None = None) -> Leaf:
    return Leaf(tuple(payoffs), name)


def move(player: int, *branches, name: str | None = None) -> Decision:
    """Decision node of 0-based ``player``; ``branches`` are ``(action, subtree)`` pairs."""
    return Decision(player, tuple(branches), name)


@dataclass(frozen=True)
class ExtensiveGame:
    """An extensive game ``(T, turn, o_1, ..., o_n)``.

    Construction does not validate; call :func:`validate` on untrusted input.
    Every solver assumes a valid game.
    """

    n_players: int
    children: tuple[tuple[int, ...], ...]
    turn: tuple[int | None, ...]
    outcomes: tuple[Outcome | None, ...]
    actions: tuple[tuple[str, ...], ...] = ()
    names: tuple[str | None, ...] = ()
    title: str = ""
    # sub id -> id in the game this one was cut from (see subgame)
    origin: tuple[int, ...] | None = field(default=None, compare=False, repr=False)
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.children)
        object.__setattr__(self, "children", tuple(tuple(c) for c in self.children))
        object.__setattr__(self, "turn", tuple(self.turn))
        object.__setattr__(
            self, "outcomes", tuple(None if o is None else as_outcome(o) for o in self.outcomes)
        )
        if not self.actions:
            acts = tuple(tuple(str(k) for k in range(len(c))) for c in self.children)
            object.__setattr__(self, "actions", acts)
        else:
            object.__setattr__(self, "actions", tuple(tuple(a) for a in self.actions))
        if not self.names:
            object.__setattr__(self, "names", (None,) * n)
        else:
            object.__setattr__(self, "names", tuple(self.names))

    # -- structure ----------------------------------------------------------

    @property
    def root(self) -> int:
        return 0

    @property
    def num_nodes(self) -> int:
        return len(self.children)

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.num_nodes) if not self.children[v])

    @cached_property
    def nonleaves(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.num_nodes) if self.children[v])

    @cached_property
    def parent(self) -> tuple[int | None, ...]:
        par: list[int | None] = [None] * self.num_nodes
        for v, cs in enumerate(self.children):
            for c in cs:
                par[c] = v
        return tuple(par)

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        order, stack = [], [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children[v]))
        return tuple(order)

    @cached_property
    def postorder(self) -> tuple[int, ...]:
        """Children before parents, siblings in declaration order."""
        # reverse of a preorder that visits children last-to-first
        order, stack = [], [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(self.children[v])
        return tuple(reversed(order))

    def decision_nodes(self, player: int) -> tuple[int, ...]:
        """``V_i`` in preorder."""
        key = ("V", player)
        if key not in self._cache:
            self._cache[key] = tuple(
                v for v in self.preorder if self.children[v] and self.turn[v] == player
            )
        return self._cache[key]

    def subtree(self, v: int) -> tuple[int, ...]:
        """Nodes of ``T^v`` in preorder."""
        key = ("T", v)
        if key not in self._cache:
            order, stack = [], [v]
            while stack:
                u = stack.pop()
                order.append(u)
                stack.extend(reversed(self.children[u]))
            self._cache[key] = tuple(order)
        return self._cache[key]

    def leaves_under(self, v: int) -> tuple[int, ...]:
        return tuple(u for u in self.subtree(v) if not self.children[u])

    def path_to(self, v: int) -> tuple[int, ...]:
        """Root-to-``v`` node sequence."""
        path = [v]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        return tuple(reversed(path))

    def is_preleaf(self, v: int) -> bool:
        return bool(self.children[v]) and all(not self.children[c] for c in self.children[v])

    def child_by_action(self, v: int, action: str) -> int:
        try:
            return self.children[v][self.actions[v].index(action)]
        except ValueError:
            raise DomainError(f"node {self.node_label(v)} has no action {action!r}") from None

    def action_of(self, v: int, child: int) -> str:
        return self.actions[v][self.children[v].index(child)]

    def node_label(self, v: int) -> str:
        name = self.names[v]
        return f"{v}" if name is None else f"{v}:{name}"

    def outcome_set(self) -> set[Outcome]:
        return {self.outcomes[z] for z in self.leaves}

    def outcome_count(self) -> int:
        return len(self.outcome_set())

    def replace_outcomes(self, fn) -> ExtensiveGame:
        """Same tree with every leaf outcome mapped through ``fn``."""
        return ExtensiveGame(
            self.n_players,
            self.children,
            self.turn,
            tuple(None if o is None else fn(o) for o in self.outcomes),
            self.actions,
            self.names,
            self.title,
        )

    def iter_edges(self) -> Iterator[tuple[int, int, str]]:
        for v in self.preorder:
            for c, a in zip(self.children[v], self.actions[v]):
                yield v, c, a


def from_tree(n_players: int, root: Leaf | Decision, title: str = "") -> ExtensiveGame:
    """Number a nested tree in document order and build the game."""
    children: list[list[int]] = []
    turn: list[int | None] = []
    outcomes: list[Outcome | None] = []
    actions: list[tuple[str, ...]] = []
    names: list[str | None] = []

    def add(node) -> int:
        v = len(children)
        children.append([])
        names.append(node.name)
        if isinstance(node, Leaf):
            turn.append(None)
            outcomes.append(as_outcome(node.payoffs))
            actions.append(())
            return v
        turn.append(node.player)
        outcomes.append(None)
        actions.append(tuple(str(a) for a, _ in node.branches))
        for _, sub in node.branches:
            children[v].append(add(sub))
        return v

    add(root)
    return ExtensiveGame(n_players, children, turn, outcomes, actions, names, title)


def to_nested(game: ExtensiveGame, v: int | None = None) -> Leaf | Decision:
    v = game.root if v is None else v
    if game.is_leaf(v):
        return Leaf(game.outcomes[v], game.names[v])
    branches = tuple(
        (a, to_nested(game, c)) for c, a in zip(game.children[v], game.actions[v])
    )
    return Decision(game.turn[v], branches, game.names[v])


# -- validation -------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    node: int | None
    rule: str
    message: str

    def __str__(self) -> str:
        where = "game" if self.node is None else f"node {self.node}"
        return f"{where}: {self.rule}: {self.message}"


def validate(game: ExtensiveGame) -> list[Violation]:
    """Return every structural violation; an empty list means the game is valid."""
    out: list[Violation] = []
    n = game.num_nodes
    if game.n_players < 1:
        out.append(Violation(None, "player count", f"n = {game.n_players} < 1"))
    if n == 0:
        out.append(Violation(None, "empty tree", "tree has no nodes"))
        return out
    for name, seq in (("turn", game.turn), ("outcomes", game.outcomes),
                      ("actions", game.actions), ("names", game.names)):
        if len(seq) != n:
            out.append(Violation(None, "table length", f"{name} has {len(seq)} entries for {n} nodes"))
    if out:
        return out

    indeg = [0] * n
    for v, cs in enumerate(game.children):
        if len(set(cs)) != len(cs):
            out.append(Violation(v, "duplicate child", f"child list {list(cs)} repeats a node"))
        for c in cs:
            if not (isinstance(c, int) and 0 <= c < n):
                out.append(Violation(v, "unknown child", f"child id {c!r} out of range"))
                continue
            indeg[c] += 1
        if len(game.actions[v]) != len(cs):
            out.append(Violation(v, "action labels", "one action label per child required"))
        elif len(set(game.actions[v])) != len(cs):
            out.append(Violation(v, "action labels", "action labels must be unique per node"))

    roots = [v for v in range(n) if indeg[v] == 0]
    if indeg[0] != 0:
        out.append(Violation(0, "root", "node 0 must have in-degree 0"))
    if len(roots) > 1:
        for v in roots:
            if v != 0:
                out.append(Violation(v, "multiple in-degree-0 nodes", "second root found"))
    for v in range(1, n):
        if indeg[v] > 1:
            out.append(Violation(v, "in-degree", f"in-degree {indeg[v]} > 1"))

    seen, stack = set(), [0]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(c for c in game.children[v] if isinstance(c, int) and 0 <= c < n)
    for v in range(n):
        if v not in seen and indeg[v] > 0:
            out.append(Violation(v, "unreachable", "node not reachable from the root (cycle)"))

    for v in range(n):
        if game.children[v]:
            t = game.turn[v]
            if not isinstance(t, int) or not 0 <= t < game.n_players:
                out.append(Violation(v, "turn", f"turn {t!r} not a player of 1..{game.n_players}"))
            if game.outcomes[v] is not None:
                out.append(Violation(v, "outcome", "non-leaf carries an outcome"))
        else:
            if game.turn[v] is not None:
                out.append(Violation(v, "turn", "leaf has a turn"))
            o = game.outcomes[v]
            if o is None:
                out.append(Violation(v, "outcome", "leaf has no outcome"))
            elif len(o) != game.n_players:
                out.append(Violation(v, "outcome arity", f"{len(o)} payoffs for {game.n_players} players"))
            elif not all(type(x) is Fraction for x in o):
                out.append(Violation(v, "outcome", "payoffs must be exact rationals"))
    return out


# -- subgames ---------------------------------------------------------------


def subgame(game: ExtensiveGame, w: int) -> ExtensiveGame:
    """``G^w``: the game on ``T^w`` keeping all ``n`` players.

    Ids are re-densified in preorder; ``result.origin[k]`` is the id in
    ``game`` of sub-node ``k``.
    """
    if not isinstance(w, int) or not 0 <= w < game.num_nodes:
        raise DomainError(f"unknown node {w!r}")
    if game.is_leaf(w):
        raise DomainError(f"node {game.node_label(w)} is a leaf")
    nodes = game.subtree(w)
    new_id = {v: k for k, v in enumerate(nodes)}
    sub = ExtensiveGame(
        game.n_players,
        tuple(tuple(new_id[c] for c in game.children[v]) for v in nodes),
        tuple(game.turn[v] for v in nodes),
        tuple(game.outcomes[v] for v in nodes),
        tuple(game.actions[v] for v in nodes),
        tuple(game.names[v] for v in nodes),
        game.title,
        origin=tuple(nodes),
    )
    return sub


# -- classification ---------------------------------------------------------


@dataclass(frozen=True)
class GameClassification:
    generic: bool
    without_relevant_ties: bool
    zero_sum: bool
    strictly_competitive: bool
    win_or_lose: bool
    chess_like: bool
    tdi: bool | None  # None: not evaluated (strategic form over the TDI cap)
    outcome_count: int

    def as_dict(self) -> dict:
        return {
            "generic": self.generic,
            "without_relevant_ties": self.without_relevant_ties,
            "zero_sum": self.zero_sum,
            "strictly_competitive": self.strictly_competitive,
            "win_or_lose": self.win_or_lose,
            "chess_like": self.chess_like,
            "tdi": "not evaluated" if self.tdi is None else self.tdi,
            "outcome_count": self.outcome_count,
        }


def _injective(values: list) -> bool:
    return len(set(values)) == len(values)


def is_generic(game: ExtensiveGame) -> bool:
    return all(
        _injective([game.outcomes[z][i] for z in game.leaves]) for i in range(game.n_players)
    )


def without_relevant_ties(game: ExtensiveGame) -> bool:
    for u in game.nonleaves:
        i = game.turn[u]
        if not _injective([game.outcomes[z][i] for z in game.leaves_under(u)]):
            return False
    return True


def is_strictly_competitive(game: ExtensiveGame) -> bool:
    """Two players, preferences reversed over every ordered pair of leaf outcomes.

    Every leaf is realised by some joint strategy, so quantifying over leaf
    outcomes is the same as quantifying over joint strategies.
    """
    if game.n_players != 2:
        return False
    outs = sorted(game.outcome_set())
    for a in outs:
        for b in outs:
            for i in (0, 1):
                if (a[i] >= b[i]) != (a[1 - i] <= b[1 - i]):
                    return False
    return True


def is_zero_sum(game: ExtensiveGame) -> bool:
    return game.n_players == 2 and all(sum(game.outcomes[z]) == 0 for z in game.leaves)


_WIN_LOSE = {(Fraction(1), Fraction(-1)), (Fraction(-1), Fraction(1))}
_CHESS = _WIN_LOSE | {(Fraction(0), Fraction(0))}


def is_win_or_lose(game: ExtensiveGame) -> bool:
    return game.n_players == 2 and game.outcome_set() <= _WIN_LOSE


def is_chess_like(game: ExtensiveGame) -> bool:
    return game.n_players == 2 and game.outcome_set() <= _CHESS


def classify(game: ExtensiveGame, tdi_cap: int | None = None) -> GameClassification:
    from . import caps
    from .strategic import tdi_check, to_strategic
    from .strategies import strategy_counts

    limit = caps.tdi_cap() if tdi_cap is None else tdi_cap
    total = 1
    for c in strategy_counts(game):
        total *= c
    tdi = None
    if total <= limit:
        tdi = tdi_check(to_strategic(game, cap=limit)).holds
    return GameClassification(
        generic=is_generic(game),
        without_relevant_ties=without_relevant_ties(game),
        zero_sum=is_zero_sum(game),
        strictly_competitive=is_strictly_competitive(game),
        win_or_lose=is_win_or_lose(game),
        chess_like=is_chess_like(game),
        tdi=tdi,
        outcome_count=game.outcome_count(),
    )
