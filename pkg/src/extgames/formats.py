"""Text formats for games (``.egt``) and knowledge systems (``.eks``).

Game documents::

    (game "mp" players 2
      (p1 u
        (H (p2 v (H (out 1 -1)) (T (out -1 1))))
        (T (p2 w (H (out -1 1)) (T (out 1 -1))))))

A decision node is ``(pN [name] (ACTION node)+)`` (``(p N ...)`` is also
accepted); a leaf is ``(out q1 ... qn [@name])`` with integer or ``a/b``
payoffs. ``;`` starts a comment.

Knowledge systems::

    (ks (states a b)
        (assign (a H TH) (b T TH))
        (partition 1 (a) (b))
        (partition 2 (a b)))

Strategies in ``assign`` use the canonical labels of the strategic form.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .epistemic import KnowledgeSystem, ks_violations
from .errors import DomainError, ValidationError
from .sexpr import Atom, ParseError, SList, quote, read
from .strategies import find_strategy
from .tree import Decision, ExtensiveGame, Leaf, format_rational, from_tree, validate

_RATIONAL = re.compile(r"^[+-]?\d+(/[+-]?\d+)?$")
_PLAYER = re.compile(r"^p(\d+)$")


def _expect_atom(x, what: str) -> Atom:
    if not isinstance(x, Atom):
        raise ParseError(f"expected {what}, found a list", x.line, x.col)
    return x


def _expect_int(x, what: str) -> int:
    a = _expect_atom(x, what)
    if a.quoted or not re.fullmatch(r"[+-]?\d+", a.text):
        raise ParseError(f"expected {what} (an integer), found {a.text!r}", a.line, a.col)
    return int(a.text)


def _rational(a: Atom) -> Fraction:
    if a.quoted or not _RATIONAL.match(a.text):
        raise ParseError(f"expected a rational payoff, found {a.text!r}", a.line, a.col)
    try:
        return Fraction(a.text)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {a.text!r}", a.line, a.col) from None


def _node(x, n_players: int):
    if not isinstance(x, SList):
        raise ParseError("expected a node '(p...' or '(out ...)'", x.line, x.col)
    head = x.head()
    if head is None:
        raise ParseError("node must start with 'out' or a player tag", x.line, x.col)
    items = x.items[1:]
    if head == "out":
        name = None
        if items and isinstance(items[-1], Atom) and items[-1].text.startswith("@"):
            name = items[-1].text[1:]
            items = items[:-1]
        pays = [_rational(_expect_atom(a, "payoff")) for a in items]
        if len(pays) != n_players:
            raise ParseError(f"outcome has {len(pays)} payoffs for {n_players} players", x.line, x.col)
        return Leaf(tuple(pays), name)

    m = _PLAYER.match(head)
    if m:
        player = int(m.group(1))
    elif head == "p":
        if not items:
            raise ParseError("missing player number after 'p'", x.line, x.col)
        player = _expect_int(items[0], "player number")
        items = items[1:]
    else:
        raise ParseError(f"unknown node tag {head!r}", x.line, x.col)
    if not 1 <= player <= n_players:
        raise ParseError(f"player {player} out of range 1..{n_players}", x.line, x.col)
    name = None
    if items and isinstance(items[0], Atom):
        name = items[0].text
        if name.startswith("@"):
            name = name[1:]
        items = items[1:]
    if not items:
        raise ParseError("decision node needs at least one branch", x.line, x.col)
    branches = []
    seen: set[str] = set()
    for b in items:
        if not isinstance(b, SList) or len(b.items) != 2 or not isinstance(b.items[0], Atom):
            raise ParseError("branch must be '(ACTION node)'", b.line, b.col)
        act = b.items[0].text
        if act in seen:
            raise ParseError(f"action {act!r} repeats at this node", b.items[0].line, b.items[0].col)
        seen.add(act)
        branches.append((act, _node(b.items[1], n_players)))
    return Decision(player - 1, tuple(branches), name)


def parse_game(text: str) -> ExtensiveGame:
    doc = read(text)
    if not isinstance(doc, SList) or doc.head() != "game":
        raise ParseError("document must start with '(game'", doc.line, doc.col)
    items = doc.items
    if len(items) != 5:
        raise ParseError('expected (game "name" players N node)', doc.line, doc.col)
    title = _expect_atom(items[1], "game name").text
    kw = _expect_atom(items[2], "'players'")
    if kw.text != "players":
        raise ParseError(f"expected 'players', found {kw.text!r}", kw.line, kw.col)
    n = _expect_int(items[3], "player count")
    if n < 1:
        raise ParseError("player count must be at least 1", items[3].line, items[3].col)
    game = from_tree(n, _node(items[4], n), title)
    bad = validate(game)
    if bad:
        raise ValidationError("invalid game: " + "; ".join(map(str, bad)), bad)
    return game


def _print_node(game: ExtensiveGame, v: int, indent: int) -> str:
    if game.is_leaf(v):
        parts = ["out"] + [format_rational(x) for x in game.outcomes[v]]
        if game.names[v] is not None:
            parts.append("@" + game.names[v])
        return "(" + " ".join(quote(p) for p in parts) + ")"
    head = f"(p{game.turn[v] + 1}"
    if game.names[v] is not None:
        name = game.names[v]
        # a name that looks like a tag would be read back differently
        head += " " + (quote(name) if not name.startswith("@") else quote("@" + name))
    pad = "  " * (indent + 1)
    lines = [head]
    for c, a in zip(game.children[v], game.actions[v]):
        lines.append(f"{pad}({quote(a)} {_print_node(game, c, indent + 1)})")
    return "\n".join(lines) + ")"


def print_game(game: ExtensiveGame) -> str:
    return (
        f"(game {quote(game.title, always=True)} players {game.n_players}\n  "
        + _print_node(game, game.root, 1)
        + ")\n"
    )


# -- knowledge systems -----------------------------------------------------------------


def parse_ks(text: str, game: ExtensiveGame) -> KnowledgeSystem:
    doc = read(text)
    if not isinstance(doc, SList) or doc.head() != "ks":
        raise ParseError("document must start with '(ks'", doc.line, doc.col)
    states: list[str] = []
    assignment = {}
    partitions: dict[int, tuple[frozenset, ...]] = {}
    for sec in doc.items[1:]:
        if not isinstance(sec, SList) or sec.head() is None:
            raise ParseError("expected a section '(states ...)', '(assign ...)' or '(partition ...)'",
                             sec.line, sec.col)
        kind = sec.head()
        if kind == "states":
            states.extend(_expect_atom(a, "state name").text for a in sec.items[1:])
        elif kind == "assign":
            for row in sec.items[1:]:
                if not isinstance(row, SList) or len(row.items) != game.n_players + 1:
                    raise ParseError(f"assignment row needs a state and {game.n_players} strategies",
                                     row.line, row.col)
                w = _expect_atom(row.items[0], "state name").text
                joint = []
                for i, a in enumerate(row.items[1:]):
                    a = _expect_atom(a, "strategy label")
                    try:
                        joint.append(find_strategy(game, i, a.text))
                    except DomainError as exc:
                        raise ParseError(str(exc), a.line, a.col) from None
                assignment[w] = tuple(joint)
        elif kind == "partition":
            if len(sec.items) < 2:
                raise ParseError("partition needs a player number", sec.line, sec.col)
            p = _expect_int(sec.items[1], "player number")
            if not 1 <= p <= game.n_players:
                raise ParseError(f"player {p} out of range 1..{game.n_players}", sec.items[1].line, sec.items[1].col)
            if p - 1 in partitions:
                raise ParseError(f"second partition for player {p}", sec.line, sec.col)
            blocks = []
            for b in sec.items[2:]:
                if not isinstance(b, SList):
                    raise ParseError("block must be a list of states", b.line, b.col)
                blocks.append(frozenset(_expect_atom(a, "state name").text for a in b.items))
            partitions[p - 1] = tuple(blocks)
        else:
            raise ParseError(f"unknown section {kind!r}", sec.line, sec.col)
    missing = [i + 1 for i in range(game.n_players) if i not in partitions]
    if missing:
        raise ParseError(f"no partition for players {missing}", doc.line, doc.col)
    ks = KnowledgeSystem(tuple(states), assignment, tuple(partitions[i] for i in range(game.n_players)))
    bad = ks_violations(ks, game)
    if bad:
        raise ValidationError("invalid knowledge system: " + "; ".join(bad), bad)
    return ks


def print_ks(ks: KnowledgeSystem, game: ExtensiveGame) -> str:
    lines = ["(ks (states " + " ".join(quote(w) for w in ks.states) + ")"]
    rows = " ".join(
        "(" + " ".join([quote(w)] + [quote(s.label(game)) for s in ks.assignment[w]]) + ")" for w in ks.states
    )
    lines.append(f"    (assign {rows})")
    for i, blocks in enumerate(ks.partitions):
        ordered = sorted(blocks, key=lambda b: min(ks.states.index(w) for w in b))
        body = " ".join("(" + " ".join(quote(w) for w in ks.order(b)) + ")" for b in ordered)
        lines.append(f"    (partition {i + 1} {body})")
    return "\n".join(lines) + ")\n"
