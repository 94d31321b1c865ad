"""Arrow notation for falling patterns, e.g. ``B->A->D<-C``."""
from __future__ import annotations

import re

from .geometry import FACES
from .tipping import FallingPattern

_TOKEN = re.compile(r"\s*(?:(?P<face>[A-Za-z])|(?P<arrow>->|<-|→|←))")


class PatternParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def parse_pattern(s: str) -> FallingPattern:
    """Parse a chain ``face (arrow face){3}``; ``X->Y`` means X tips onto Y."""
    pos = 0
    faces: list[tuple[str, int]] = []
    arrows: list[tuple[str, int]] = []
    expect_face = True
    while pos < len(s):
        if s[pos:].strip() == "":
            break
        m = _TOKEN.match(s, pos)
        if m is None:
            raise PatternParseError(f"unexpected character {s[pos]!r}", pos)
        where = m.start(m.lastgroup)
        if m.group("face"):
            if not expect_face:
                raise PatternParseError("expected an arrow", where)
            f = m.group("face")
            if f not in FACES:
                raise PatternParseError(f"bad face label {f!r}", where)
            if any(f == g for g, _ in faces):
                msg = "cycle" if len(faces) > 1 else "repeated face"
                raise PatternParseError(f"{msg}: face {f} appears twice", where)
            faces.append((f, where))
        else:
            if expect_face:
                raise PatternParseError("expected a face label", where)
            a = m.group("arrow")
            arrows.append(("->" if a in ("->", "→") else "<-", where))
        expect_face = not expect_face
        pos = m.end()
    if expect_face:
        raise PatternParseError("pattern must end with a face", len(s))
    if len(faces) != 4:
        raise PatternParseError(f"expected 4 faces, got {len(faces)}", len(s))
    succ: dict[str, str | None] = {f: None for f in FACES}
    for k, (a, where) in enumerate(arrows):
        src, dst = (faces[k][0], faces[k + 1][0]) if a == "->" else (faces[k + 1][0], faces[k][0])
        if succ[src] is not None:
            raise PatternParseError(f"face {src} has two outgoing arrows", where)
        succ[src] = dst
    return FallingPattern(succ)


def _chain_order(p: FallingPattern) -> list[str] | None:
    adj = {f: set() for f in FACES}
    for f, g in p.successor.items():
        if g is not None:
            adj[f].add(g)
            adj[g].add(f)
    if sum(len(v) for v in adj.values()) != 6 or any(len(v) > 2 for v in adj.values()):
        return None
    ends = [f for f in FACES if len(adj[f]) == 1]
    if len(ends) != 2:
        return None
    orders = []
    for e in ends:
        order, prev = [e], None
        while len(order) < 4:
            nxt = [g for g in adj[order[-1]] if g != prev]
            prev = order[-1]
            order.append(nxt[0])
        orders.append(order)

    def leading_run(order):
        k = 0
        while k < 3 and p[order[k]] == order[k + 1]:
            k += 1
        return k

    orders.sort(key=lambda o: (-leading_run(o), o))
    return orders[0]


def format_pattern(p: FallingPattern) -> str:
    """Arrow string; chain patterns as in ``B->A->D<-C``, others as a list."""
    order = _chain_order(p)
    if order is not None and not p.ambiguous:
        out = order[0]
        for x, y in zip(order, order[1:]):
            out += ("->" if p[x] == y else "<-") + y
        return out
    parts = []
    for f in FACES:
        if f in p.ambiguous:
            parts.append(f"{f}:?")
        elif p[f] is None:
            parts.append(f"{f}:stable")
        else:
            parts.append(f"{f}->{p[f]}")
    return ", ".join(parts)
