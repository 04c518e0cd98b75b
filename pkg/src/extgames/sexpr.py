"""A small S-expression reader that keeps source positions for diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError


class ParseError(DomainError):
    """Syntax or semantic error at a source location (1-based line and column)."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass
class Atom:
    text: str
    line: int
    col: int
    quoted: bool = False


@dataclass
class SList:
    items: list = field(default_factory=list)
    line: int = 0
    col: int = 0

    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Atom) and not self.items[0].quoted:
            return self.items[0].text
        return None


_DELIMS = set('()";')


def tokenize(text: str):
    """Yield ``(kind, value, line, col)`` with kind in ``( ) atom string``."""
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
        elif ch.isspace():
            i, col = i + 1, col + 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, ch, line, col
            i, col = i + 1, col + 1
        elif ch == '"':
            start_line, start_col = line, col
            i, col = i + 1, col + 1
            buf = []
            while True:
                if i >= n:
                    raise ParseError("unterminated string", start_line, start_col)
                ch = text[i]
                if ch == '"':
                    i, col = i + 1, col + 1
                    break
                if ch == "\\" and i + 1 < n:
                    buf.append(text[i + 1])
                    i, col = i + 2, col + 2
                    continue
                if ch == "\n":
                    line, col = line + 1, 0
                buf.append(ch)
                i, col = i + 1, col + 1
            yield "string", "".join(buf), start_line, start_col
        else:
            start = i
            start_col = col
            while i < n and not text[i].isspace() and text[i] not in _DELIMS:
                i += 1
            col += i - start
            yield "atom", text[start:i], line, start_col


def read(text: str) -> SList | Atom:
    """Parse exactly one expression."""
    stack: list[SList] = []
    result = None
    last = (1, 1)
    for kind, val, line, col in tokenize(text):
        last = (line, col)
        if result is not None:
            raise ParseError("unexpected text after the expression", line, col)
        if kind == "(":
            stack.append(SList([], line, col))
            continue
        if kind == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
        else:
            done = Atom(val, line, col, quoted=(kind == "string"))
        if stack:
            stack[-1].items.append(done)
        else:
            result = done
    if stack:
        raise ParseError("missing ')' for list opened here", stack[-1].line, stack[-1].col)
    if result is None:
        raise ParseError("empty input", *last)
    return result


def quote(text: str, always: bool = False) -> str:
    """Render ``text`` as an atom, quoting when it would not read back as one."""
    if not always and text and not any(c.isspace() or c in _DELIMS or c == "\\" for c in text):
        return text
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'
