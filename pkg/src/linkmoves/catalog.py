"""Embedded diagrams for the small links the tests and demos rely on.

Entries are constructed deterministically (mostly as braid closures) and
carry golden expected values that every build re-checks against the
invariant engines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import Diagram, DiagramError


def braid_closure(width: int, word: list[tuple[int, int]]) -> Diagram:
    """Close the braid given as a list of (column, sign) letters.

    Columns are 1-based; ``(i, +1)`` crosses the strand at column i over the
    strand at column i+1, all strands ascending.  The closure joins the top
    of each column to its own bottom.
    """
    if width < 1:
        raise DiagramError("braid width must be >= 1")
    start = list(range(1, width + 1))
    cur = start[:]                     # arc currently dangling at each column
    strand_at = list(range(width))     # strand id occupying each column
    pieces = [[a] for a in start]      # per strand, arcs in strand order
    nxt = width + 1
    crossings = []
    for col, sgn in word:
        if not (1 <= col < width):
            raise DiagramError(f"braid letter column {col} out of range")
        li, ri = col - 1, col
        p_bl, p_br = cur[li], cur[ri]
        p_al, p_ar = nxt, nxt + 1
        nxt += 2
        if sgn > 0:
            crossings.append((p_br, p_ar, p_al, p_bl))
        else:
            crossings.append((p_bl, p_br, p_ar, p_al))
        sl, sr = strand_at[li], strand_at[ri]
        pieces[sl].append(p_ar)        # left strand rises to the right column
        pieces[sr].append(p_al)
        cur[li], cur[ri] = p_al, p_ar
        strand_at[li], strand_at[ri] = sr, sl

    # Closure: the strand ending at column j continues into the strand that
    # started there, so the top arc of column j *is* that strand's bottom arc.
    relabel = {}
    for j in range(width):
        top, bottom = cur[j], start[j]
        if top != bottom:
            relabel[top] = bottom
    crossings = [tuple(relabel.get(a, a) for a in c) for c in crossings]

    starts_at = {j: sid for j, sid in enumerate(range(width))}
    ends_at = {strand_at[j]: j for j in range(width)}
    comps = []
    done = set()
    for sid0 in range(width):
        if sid0 in done:
            continue
        cyc = []
        sid = sid0
        while True:
            done.add(sid)
            cyc.extend(pieces[sid][:-1] if len(pieces[sid]) > 1 else [])
            if len(pieces[sid]) == 1:
                # strand with no crossings: a crossing-free circle on its own
                break
            sid = starts_at[ends_at[sid]]
            if sid == sid0:
                break
        comps.append(tuple(cyc))
    d = Diagram(crossings, comps)
    d.validate()
    return d


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    diagram: Diagram
    expected: dict = field(default_factory=dict)


def _entries() -> dict:
    e = {}

    def add(name, diagram, **expected):
        diagram.validate()
        e[name] = CatalogEntry(name, diagram, expected)

    add("unknot", Diagram([], [()]),
        conway=[1], arf=0)
    add("hopf_plus", braid_closure(2, [(1, +1)] * 2),
        lk=[[0, 1], [1, 0]], conway=[0, 1], proper_full=False)
    add("hopf_minus", braid_closure(2, [(1, -1)] * 2),
        lk=[[0, -1], [-1, 0]], conway=[0, -1], proper_full=False)
    add("trefoil", braid_closure(2, [(1, +1)] * 3),
        conway=[1, 0, 1], arf=1)
    add("figure8", braid_closure(3, [(1, +1), (2, -1)] * 2),
        conway=[1, 0, -1], arf=1)
    add("torus_2_4", braid_closure(2, [(1, +1)] * 4),
        lk=[[0, 2], [2, 0]], conway=[0, 2, 0, 1], proper_full=True, arf=1, reduced_arf=1)
    add("whitehead", braid_closure(3, [(1, +1), (2, -1), (1, +1), (2, -1), (1, +1)]),
        lk=[[0, 0], [0, 0]], conway=[0, 0, 0, -1], proper_full=True, arf=1, reduced_arf=1)
    add("borromean", braid_closure(3, [(1, +1), (2, -1)] * 3),
        lk=[[0, 0, 0], [0, 0, 0], [0, 0, 0]], conway=[0, 0, 0, 0, 1],
        proper_full=True, arf=1, reduced_arf=1, mu123=(1, 0))
    add("chain_3", braid_closure(3, [(1, +1), (1, +1), (2, +1), (2, +1)]),
        lk=[[0, 1, 0], [1, 0, 1], [0, 1, 0]], conway=[0, 0, 1], proper_full=True)
    return e


_CATALOG = None


def names() -> list[str]:
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _entries()
    return sorted(_CATALOG) + ["unlink_n(k)"]


def get(name: str) -> CatalogEntry:
    """Fetch a catalog entry; ``unlink_n(k)`` / ``unlink_k`` give k circles."""
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _entries()
    if name in _CATALOG:
        return _CATALOG[name]
    for pat in ("unlink_n(", "unlink_"):
        if name.startswith(pat):
            tail = name[len(pat):].rstrip(")")
            try:
                k = int(tail)
            except ValueError:
                break
            if k < 1:
                break
            d = Diagram([], [()] * k)
            lk = [[0] * k for _ in range(k)]
            return CatalogEntry(name, d, {"lk": lk, "conway": [1] if k == 1 else [],
                                          "proper_full": True, "arf": 0, "reduced_arf": 0})
    raise KeyError(f"unknown catalog entry {name!r} (have: {', '.join(names())})")
