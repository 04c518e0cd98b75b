"""Graphviz DOT export of game trees."""

from __future__ import annotations

from typing import Mapping, Sequence

from .strategies import merge
from .tree import ExtensiveGame, Outcome, format_outcome


def _esc(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(
    game: ExtensiveGame,
    strategy: Sequence | None = None,
    extended: Mapping[int, Outcome] | None = None,
) -> str:
    """DOT digraph of ``game``.

    Edges chosen by the joint ``strategy`` are drawn bold; with
    ``extended`` (e.g. from a backward induction run) every decision node is
    also labelled with its outcome.
    """
    chosen = merge(strategy) if strategy is not None else {}
    lines = [f'digraph "{_esc(game.title or "game")}" {{', "  node [shape=ellipse];"]
    for v in game.preorder:
        if game.is_leaf(v):
            label = format_outcome(game.outcomes[v])
            lines.append(f'  n{v} [shape=box, label="{_esc(label)}"];')
            continue
        label = f"{game.turn[v] + 1}"
        if game.names[v] is not None:
            label += f", {game.names[v]}"
        label = _esc(label)
        if extended is not None:
            label += "\\n" + format_outcome(extended[v])  # DOT line break
        lines.append(f'  n{v} [label="{label}"];')
    for v, c, a in game.iter_edges():
        attrs = [f'label="{_esc(a)}"']
        if chosen.get(v) == c:
            attrs += ["style=bold", "penwidth=3"]
        lines.append(f"  n{v} -> n{c} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
