"""Local-move rewriting: Reidemeister moves, crossing changes, triangle moves,
pass/sharp/gamma band moves, band sums and fusions, and a seeded move generator.

Moves are exact splices against fixed tangle fragments.  Orientation variants
are resolved by trying the handful of direction assignments and keeping the
first splice that passes the planarity validation, which makes every rewrite
self-checking.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .diagram import (
    Diagram,
    DiagramError,
    fresh_arcs,
    _rewire,
    _switch_crossing,
)

MOVE_KINDS = ("crossing_change", "delta", "pass", "sharp", "gamma", "r1", "r2", "r3")


class MoveError(ValueError):
    """A move site does not match the diagram or the rewrite is obstructed."""


@dataclass(frozen=True)
class MoveSite:
    """A located instance of a named local move.

    ``strands`` designates the local arcs: 4 for pass/sharp (the four strand
    pieces of a matched band grid, or four arcs on a common face to splice a
    new band clasp into), 3 for delta/gamma/r3, 1-2 for r1/r2/crossing_change.
    ``variant`` disambiguates kink flavors for forward R1.
    """

    kind: str
    strands: tuple[int, ...]
    direction: str = "fwd"   # fwd = insert/apply, bwd = remove matched pattern
    variant: int = 0

    def __post_init__(self):
        if self.kind not in MOVE_KINDS:
            raise MoveError(f"unknown move kind {self.kind!r}")
        if self.direction not in ("fwd", "bwd"):
            raise MoveError(f"bad direction {self.direction!r}")
        object.__setattr__(self, "strands", tuple(int(a) for a in self.strands))


@dataclass(frozen=True)
class BandSpec:
    """One fusion band: endpoints, full twists, and the arcs it crosses over."""

    from_: tuple          # (component index 1-based, arc id, side)
    to: tuple
    twists: int = 0
    route: tuple = ()

    def to_json_dict(self) -> dict:
        return {"from": list(self.from_), "to": list(self.to),
                "twists": self.twists, "route": list(self.route)}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "BandSpec":
        return cls(tuple(doc["from"]), tuple(doc["to"]),
                   int(doc.get("twists", 0)), tuple(doc.get("route", ())))


# ---------------------------------------------------------------------------
# low-level splicing scratchpad
# ---------------------------------------------------------------------------


class _Weaver:
    """Mutable scratch copy of a diagram used while splicing a tangle in."""

    def __init__(self, d: Diagram):
        self.crossings = [list(c.slots) for c in d.crossings]
        self.cycles = [list(c) for c in d.components]
        self.used = set(d.arcs)
        res = d.resolution
        self.head_slot = dict(res.head)

    def fresh(self) -> int:
        a = 1
        while a in self.used:
            a += 1
        self.used.add(a)
        return a

    def _cycle_pos(self, arc):
        for i, cyc in enumerate(self.cycles):
            for j, a in enumerate(cyc):
                if a == arc:
                    return i, j
        raise MoveError(f"arc {arc} not found in any component")

    def insert_after(self, anchor, arc):
        i, j = self._cycle_pos(anchor)
        self.cycles[i].insert(j + 1, arc)

    def insert_before(self, anchor, arc):
        i, j = self._cycle_pos(anchor)
        self.cycles[i].insert(j, arc)

    def sever(self, arc):
        """Cut ``arc`` in two: the tail piece keeps the label and dangles its
        head; the fresh head piece takes over the old head occurrence."""
        h = self.fresh()
        ci, k = self.head_slot.pop(arc)
        self.crossings[ci][k] = h
        self.head_slot[h] = (ci, k)
        self.insert_after(arc, h)
        return arc, h

    def add_crossing(self, a, b, c, d) -> int:
        self.crossings.append([a, b, c, d])
        return len(self.crossings) - 1

    def freeze(self) -> Diagram:
        return Diagram(self.crossings, self.cycles)


def _splice_braid(d: Diagram, arcs, revs, word) -> Diagram:
    """Cut each arc once and weave the given braid word across the bundle.

    Column i starts on ``arcs[i]``; ``revs[i]`` runs that strand downward
    through the bundle.  Letters are (column, sign) with the column's strand
    passing over on +1.  The caller validates the result.
    """
    k = len(arcs)
    if len(set(arcs)) != k:
        raise MoveError("bundle arcs must be distinct")
    # simulate column traffic to know each strand's last letter
    pos = list(range(k))
    involvement = [0] * k
    letters = []
    for col, sgn in word:
        li, ri = col - 1, col
        sl, sr = pos[li], pos[ri]
        involvement[sl] += 1
        involvement[sr] += 1
        letters.append((li, ri, sl, sr, sgn))
        pos[li], pos[ri] = sr, sl
    if any(n == 0 for n in involvement):
        raise MoveError("braid word leaves a bundled strand uncrossed")
    if pos != list(range(k)):
        raise MoveError("braid word is not pure (endpoints would move)")

    w = _Weaver(d)
    cur = []
    final = []
    cursor = []          # cycle-insertion anchor per strand
    for arc, rev in zip(arcs, revs):
        t, h = w.sever(arc)
        if not rev:
            cur.append(t)
            final.append(h)
        else:
            cur.append(h)
            final.append(t)
        cursor.append(cur[-1])
    seen = [0] * k
    for li, ri, sl, sr, sgn in letters:
        p_bl, p_br = cur[sl], cur[sr]
        pieces = {}
        for s in (sl, sr):
            seen[s] += 1
            if seen[s] == involvement[s]:
                pieces[s] = final[s]
            else:
                pieces[s] = w.fresh()
                if not revs[s]:
                    w.insert_after(cursor[s], pieces[s])
                else:
                    w.insert_before(cursor[s], pieces[s])
                cursor[s] = pieces[s]
        p_ar, p_al = pieces[sl], pieces[sr]
        under = sr if sgn > 0 else sl
        if sgn > 0:
            tup = (p_br, p_ar, p_al, p_bl) if not revs[under] else (p_al, p_bl, p_br, p_ar)
        else:
            tup = (p_bl, p_br, p_ar, p_al) if not revs[under] else (p_ar, p_al, p_bl, p_br)
        w.add_crossing(*tup)
        cur[sl], cur[sr] = p_ar, p_al
    return w.freeze()


def _try_braid_variants(d, arcs, word, rev_combos) -> Diagram:
    last = None
    for revs in rev_combos:
        try:
            out = _splice_braid(d, arcs, revs, word)
            out.validate()
            return out
        except (DiagramError, MoveError) as e:
            last = e
    raise MoveError(f"no orientation variant fits at arcs {arcs}: {last}")


# ---------------------------------------------------------------------------
# Reidemeister moves and crossing changes
# ---------------------------------------------------------------------------

# kink flavors: (slots as functions of tail x, loop m, head h) and the sign
_R1_PATTERNS = (
    lambda x, m, h: (x, h, m, m),   # +1
    lambda x, m, h: (x, m, m, h),   # -1
    lambda x, m, h: (m, m, h, x),   # +1, loop on the other side
    lambda x, m, h: (m, x, h, m),   # -1
)


def r1_insert(d: Diagram, arc: int, variant: int = 0) -> Diagram:
    w = _Weaver(d)
    x, h = w.sever(arc)
    m = w.fresh()
    w.insert_after(x, m)
    w.add_crossing(*_R1_PATTERNS[variant % 4](x, m, h))
    out = w.freeze()
    out.validate()
    return out


def r1_remove(d: Diagram, loop_arc: int) -> Diagram:
    occ = d.occurrences.get(loop_arc)
    if not occ or occ[0][0] != occ[1][0]:
        raise MoveError(f"arc {loop_arc} is not a kink loop")
    ci = occ[0][0]
    res = d.resolution
    a, c = d.under_in(ci), d.under_out(ci)
    oi, oo = res.over_in[ci], res.over_out[ci]
    if c == oi == loop_arc:
        joins = [(a, oo)]
    elif oo == a == loop_arc:
        joins = [(oi, c)]
    else:
        raise MoveError(f"arc {loop_arc} is not the loop of crossing {ci}")
    out = _rewire(d, {ci}, joins, drop_components=set())
    out.validate()
    return out


# x passes its two crossings in order (xt,xm),(xm,xh); the four flavors vary
# y's traversal order against x's and the handedness of the push
_R2_FRAGMENTS = (
    lambda xt, xm, xh, yt, ym, yh: ((ym, xt, yh, xm), (yt, xh, ym, xm)),
    lambda xt, xm, xh, yt, ym, yh: ((yt, xm, ym, xt), (ym, xm, yh, xh)),
    lambda xt, xm, xh, yt, ym, yh: ((yt, xt, ym, xm), (ym, xh, yh, xm)),
    lambda xt, xm, xh, yt, ym, yh: ((ym, xm, yh, xt), (yt, xm, ym, xh)),
)


def _r2_push(d: Diagram, x: int, y: int) -> tuple[Diagram, int]:
    """Push a finger of ``x`` over ``y``; returns (diagram, tip arc of x)."""
    if x == y:
        raise MoveError("cannot push an arc over itself")
    last = None
    for frag in _R2_FRAGMENTS:
        w = _Weaver(d)
        xt, xh = w.sever(x)
        xm = w.fresh()
        w.insert_after(xt, xm)
        yt, yh = w.sever(y)
        ym = w.fresh()
        w.insert_after(yt, ym)
        c1, c2 = frag(xt, xm, xh, yt, ym, yh)
        w.add_crossing(*c1)
        w.add_crossing(*c2)
        out = w.freeze()
        try:
            out.validate()
            return out, xm
        except DiagramError as e:
            last = e
    raise MoveError(f"arcs {x} and {y} do not bound a common region: {last}")


def r2_insert(d: Diagram, over_arc: int, under_arc: int) -> Diagram:
    return _r2_push(d, over_arc, under_arc)[0]


def _removable_bigons(d: Diagram):
    out = []
    for face in d.faces:
        if len(face) != 2:
            continue
        (c1, k1), (c2, k2) = face
        if c1 == c2:
            continue
        a1 = d.crossings[c1][k1]
        a2 = d.crossings[c2][k2]
        s1 = {k for _c, k in d.occurrences[a1]}
        s2 = {k for _c, k in d.occurrences[a2]}
        over1 = all(k % 2 == 1 for k in s1)
        over2 = all(k % 2 == 1 for k in s2)
        under1 = all(k % 2 == 0 for k in s1)
        under2 = all(k % 2 == 0 for k in s2)
        if (over1 and under2) or (over2 and under1):
            out.append((tuple(sorted((a1, a2))), (c1, c2)))
    return out


def r2_remove(d: Diagram, arc_pair) -> Diagram:
    want = tuple(sorted(arc_pair))
    for arcs, (c1, c2) in _removable_bigons(d):
        if arcs == want:
            res = d.resolution
            joins = []
            for ci in (c1, c2):
                joins.append((d.under_in(ci), d.under_out(ci)))
                joins.append((res.over_in[ci], res.over_out[ci]))
            out = _rewire(d, {c1, c2}, joins, drop_components=set())
            out.validate()
            return out
    raise MoveError(f"arcs {want} do not bound a removable bigon")


def crossing_change(d: Diagram, under_in_arc: int) -> Diagram:
    for ci in range(d.n_crossings):
        if d.under_in(ci) == under_in_arc:
            out = _switch_crossing(d, ci)
            out.validate()
            return out
    raise MoveError(f"no crossing has incoming under-arc {under_in_arc}")


# ---------------------------------------------------------------------------
# triangle moves: R3 on transparent triangles, Delta on cyclic ones
# ---------------------------------------------------------------------------


def _triangle_faces(d: Diagram):
    """Triangle faces with usable structure.

    Yields (face_arcs, pattern, corner data) with pattern "staircase" (one
    strand over both others: the R3 configuration) or "cyclic" (each strand
    over exactly once: the Delta configuration).
    """
    res = d.resolution
    out = []
    for face in d.faces:
        if len(face) != 3:
            continue
        corners = [ci for ci, _k in face]
        if len(set(corners)) != 3:
            continue
        mids = [d.crossings[ci][k] for ci, k in face]
        if len(set(mids)) != 3:
            continue
        strands = []
        ok = True
        for m in mids:
            (ca, ka), (cb, kb) = d.occurrences[m]
            if res.role[(ca, ka)] == 1:      # OUT: emitted at ca
                first, second = (ca, ka), (cb, kb)
            else:
                first, second = (cb, kb), (ca, ka)
            if first[0] not in corners or second[0] not in corners:
                ok = False
                break
            role_first = "over" if first[1] % 2 else "under"
            role_second = "over" if second[1] % 2 else "under"
            strands.append({"mid": m, "first": first[0], "second": second[0],
                            "roles": (role_first, role_second)})
        if not ok:
            continue
        covered = sorted(c for s in strands for c in (s["first"], s["second"]))
        if covered != sorted(corners + corners):
            continue
        over_counts = sorted(s["roles"].count("over") for s in strands)
        if over_counts == [0, 1, 2]:
            pattern = "staircase"
        elif over_counts == [1, 1, 1]:
            pattern = "cyclic"
        else:
            continue
        out.append((tuple(sorted(mids)), pattern, strands))
    return out


def _triangle_slide(d: Diagram, strands) -> Diagram:
    """Slide the triangle through itself: same three crossings (pairs and
    signs preserved), strand connections flipped to the complementary side."""
    res = d.resolution
    pieces = {}
    for s in strands:
        m = s["mid"]
        prev_arc = None
        nxt_arc = None
        for comp in d.components:
            if m in comp:
                i = comp.index(m)
                prev_arc = comp[i - 1]
                nxt_arc = comp[(i + 1) % len(comp)]
        pieces[m] = (prev_arc, m, nxt_arc)

    new_cross = {}
    for s in strands:
        m = s["mid"]
        s0, s1, s2 = pieces[m]
        # strand order reverses: old (first, second) -> new (second, first)
        for corner, inout in ((s["second"], (s0, s1)), (s["first"], (s1, s2))):
            role = s["roles"][0] if corner == s["first"] else s["roles"][1]
            entry = new_cross.setdefault(corner, {})
            entry[role] = inout
    out_cross = [list(c.slots) for c in d.crossings]
    for corner, entry in new_cross.items():
        (u_in, u_out) = entry["under"]
        (o_in, o_out) = entry["over"]
        if d.sign(corner) > 0:
            out_cross[corner] = (u_in, o_out, u_out, o_in)
        else:
            out_cross[corner] = (u_in, o_in, u_out, o_out)
    _ = res
    out = Diagram(out_cross, d.components)
    out.validate()
    return out


def r3(d: Diagram, face_arcs) -> Diagram:
    want = tuple(sorted(face_arcs))
    for mids, pattern, strands in _triangle_faces(d):
        if mids == want and pattern == "staircase":
            return _triangle_slide(d, strands)
    raise MoveError(f"no transparent triangle with boundary arcs {want}")


def delta_slide(d: Diagram, face_arcs) -> Diagram:
    want = tuple(sorted(face_arcs))
    for mids, pattern, strands in _triangle_faces(d):
        if mids == want and pattern == "cyclic":
            return _triangle_slide(d, strands)
    raise MoveError(f"no cyclic triangle with boundary arcs {want}")


_DELTA_WORD = [(1, +1), (2, -1)] * 3          # pure braid: the triangle insertion


def delta_insert(d: Diagram, arcs) -> Diagram:
    """Apply a triangle move across three arcs bordering a common region."""
    combos = list(itertools.product((False, True), repeat=3))
    return _try_braid_variants(d, tuple(arcs), _DELTA_WORD, combos)


# ---------------------------------------------------------------------------
# pass / sharp / gamma: band-crossing grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Grid:
    mids: tuple            # (m1, m2, w1, w2) sorted site id
    crossings: tuple       # the four crossing indices
    rows: tuple            # ((A,B),(C,D)) crossing pairs along the over band
    cols: tuple
    kind: str              # "pass" | "sharp" | "mixed"
    fold_over: bool        # over band is a single folded strand
    fold_under: bool
    strand_arcs: tuple     # one representative arc per local strand


def _band_grids(d: Diagram):
    res = d.resolution
    over_pairs = {}
    under_pairs = {}
    for a, occ in d.occurrences.items():
        ks = [k for _c, k in occ]
        cs = [c for c, _k in occ]
        if cs[0] == cs[1]:
            continue
        if all(k % 2 == 1 for k in ks):
            tail = occ[0] if res.role[occ[0]] == 1 else occ[1]
            head = occ[1] if tail == occ[0] else occ[0]
            over_pairs[a] = (tail[0], head[0])
        elif all(k % 2 == 0 for k in ks):
            tail = occ[0] if res.role[occ[0]] == 1 else occ[1]
            head = occ[1] if tail == occ[0] else occ[0]
            under_pairs[a] = (tail[0], head[0])

    square_faces = set()
    for face in d.faces:
        if len(face) == 4:
            fa = frozenset(d.crossings[ci][k] for ci, k in face)
            if len(fa) == 4:
                square_faces.add(fa)

    grids = []
    overs = sorted(over_pairs)
    for i, m1 in enumerate(overs):
        for m2 in overs[i + 1:]:
            row1, row2 = over_pairs[m1], over_pairs[m2]
            s = set(row1) | set(row2)
            if len(s) != 4:
                continue
            unders = [w for w in sorted(under_pairs)
                      if set(under_pairs[w]) <= s
                      and len(set(under_pairs[w]) & set(row1)) == 1]
            if len(unders) != 2:
                continue
            w1, w2 = unders
            if set(under_pairs[w1]) | set(under_pairs[w2]) != s:
                continue
            # a genuine band-over-band tangle has its central square face
            if frozenset((m1, m2, w1, w2)) not in square_faces:
                continue
            sgn = {ci: d.sign(ci) for ci in s}
            rowp = sgn[row1[0]] * sgn[row1[1]]
            rowq = sgn[row2[0]] * sgn[row2[1]]
            colp = sgn[under_pairs[w1][0]] * sgn[under_pairs[w1][1]]
            colq = sgn[under_pairs[w2][0]] * sgn[under_pairs[w2][1]]
            if rowp == rowq == colp == colq == -1:
                kind = "pass"
            elif rowp == rowq == colp == colq == 1:
                kind = "sharp"
            else:
                kind = "mixed"

            def outer(ci, over):
                return res.over_in[ci] if over else d.under_in(ci)

            def outer_out(ci, over):
                return res.over_out[ci] if over else d.under_out(ci)

            fo = (outer_out(row1[1], True) == outer(row2[0], True)
                  or outer_out(row2[1], True) == outer(row1[0], True))
            fu = (outer_out(under_pairs[w1][1], False) == outer(under_pairs[w2][0], False)
                  or outer_out(under_pairs[w2][1], False) == outer(under_pairs[w1][0], False))
            strand_arcs = (m1, m2, w1, w2)
            grids.append(_Grid(tuple(sorted(strand_arcs)), tuple(sorted(s)),
                               (row1, row2), (under_pairs[w1], under_pairs[w2]),
                               kind, fo, fu, strand_arcs))
    return grids


def _flip_grid(d: Diagram, grid: _Grid) -> Diagram:
    out = d
    for ci in grid.crossings:
        out = _switch_crossing(out, ci)
    out.validate()
    return out


def _insert_sharp(d: Diagram, x: int, y: int):
    """Create a parallel-band grid by kinking arcs x and y into a doubled
    cable kink, then flip it: the net effect of one sharp move.

    The pre-flip diagram is an isotopy of the input (kinks and one finger
    push); the flip is the move itself.
    """
    for v1 in range(4):
        try:
            d1 = r1_insert(d, x, v1)
        except (MoveError, DiagramError):
            continue
        for v2 in range(4):
            try:
                d2 = r1_insert(d1, y, v2)
            except (MoveError, DiagramError):
                continue
            pieces = sorted((set(d2.arcs) - set(d.arcs)) | {x, y})
            for p, q in itertools.permutations(pieces, 2):
                try:
                    d3 = r2_insert(d2, p, q)
                except (MoveError, DiagramError):
                    continue
                for g in _band_grids(d3):
                    if g.kind == "sharp":
                        return _flip_grid(d3, g), g.mids
    raise MoveError(f"no sharp site could be raised on arcs {x},{y}")


def _insert_delta_via_isotopy(d: Diagram, x: int, y: int, want_classes):
    """Create a cyclic triangle with kink/push isotopies near arcs x, y and
    slide it: the net effect of one triangle move."""
    preps = [d]
    try:
        preps.append(r2_insert(d, x, y))
    except (MoveError, DiagramError):
        pass
    for v1 in range(4):
        try:
            preps.append(r1_insert(d, x, v1))
        except (MoveError, DiagramError):
            pass
    out = []
    for base in preps:
        pieces = sorted(base.arcs)
        for p, q in itertools.permutations(pieces, 2):
            try:
                d2 = r2_insert(base, p, q)
            except (MoveError, DiagramError):
                continue
            for mids, pattern, strands in _triangle_faces(d2):
                if pattern != "cyclic":
                    continue
                comps = {d2.component_of(m) for m in mids}
                cls = ("self" if len(comps) == 1
                       else "quasi-self" if len(comps) < 3 else "mixed")
                if cls not in want_classes:
                    continue
                return _triangle_slide(d2, strands), mids
        out = None
    _ = out
    raise MoveError(f"no cyclic triangle could be raised near arcs {x},{y}")


_BAND_CLASP_WORD = [(2, +1), (3, +1), (1, +1), (2, +1),
                    (2, +1), (1, +1), (3, +1), (2, +1)]


def _insert_band_clasp(d: Diagram, arcs, kind: str) -> Diagram:
    """Splice a full band clasp across four arcs: the net effect of one pass
    (antiparallel pairs) or sharp (parallel pairs) move at a fresh site."""
    if kind == "pass":
        combos = [r for r in itertools.product((False, True), repeat=4)
                  if r[0] != r[1] and r[2] != r[3]]
    else:
        combos = [r for r in itertools.product((False, True), repeat=4)
                  if r[0] == r[1] and r[2] == r[3]]
    return _try_braid_variants(d, tuple(arcs), _BAND_CLASP_WORD, combos)


def _insert_gamma(d: Diagram, fold_arc: int, y: int, z: int) -> Diagram:
    """Poke a finger of ``fold_arc`` over arcs y and z, then pass it through:
    the net effect of one gamma move (a pass move with a folded band).

    Requires z to be reachable once the finger has crossed y (z borders the
    region on y's far side)."""
    d1, tip = _r2_push(d, fold_arc, y)
    d2, _tip2 = _r2_push(d1, tip, z)
    crossings_new = set(range(d.n_crossings, d2.n_crossings))
    for grid in _band_grids(d2):
        if (grid.kind == "pass" and grid.fold_over
                and set(grid.crossings) == crossings_new):
            return _flip_grid(d2, grid), grid.mids
    # fell short of a pass-pattern grid (e.g. y, z run parallel): the caller
    # treats this as an unmatchable site
    raise MoveError(f"finger over {y},{z} does not form a pass grid")


def _gamma_candidates(d: Diagram, self_only: bool):
    """(fold, y, z) triples where the finger path x -> over y -> over z is
    geometrically available: x,y share a face and z borders y's other face."""
    res = d.resolution
    face_of_dart = {}
    for fi, face in enumerate(d.faces):
        for dart in face:
            face_of_dart[dart] = fi
    arcs_of_face = {}
    for fi, face in enumerate(d.faces):
        arcs_of_face[fi] = sorted({d.crossings[ci][k] for ci, k in face})
    out = []
    for fi, arcs in arcs_of_face.items():
        for x in arcs:
            for y in arcs:
                if x == y:
                    continue
                sides = {face_of_dart[o] for o in d.occurrences[y]}
                far = sides - {fi}
                zs = set()
                for f2 in far:
                    zs.update(a for a in arcs_of_face[f2] if a not in (x, y))
                for z in sorted(zs):
                    if self_only and len({res.comp_of[x], res.comp_of[y],
                                          res.comp_of[z]}) != 1:
                        continue
                    out.append(MoveSite("gamma", (x, y, z)))
    return out


# ---------------------------------------------------------------------------
# public move application
# ---------------------------------------------------------------------------


def apply_move(d: Diagram, site: MoveSite) -> Diagram:
    """Rewrite the diagram at the given move site.

    Forward direction inserts/applies the move's tangle, backward removes a
    matched pattern (required only for the Reidemeister kinds).  Component
    count and order are preserved by every kind.
    """
    k, s = site.kind, site.strands
    before = d.n_components
    if k == "crossing_change":
        out = crossing_change(d, s[0])
    elif k == "r1":
        out = r1_insert(d, s[0], site.variant) if site.direction == "fwd" else r1_remove(d, s[0])
    elif k == "r2":
        out = r2_insert(d, s[0], s[1]) if site.direction == "fwd" else r2_remove(d, s)
    elif k == "r3":
        out = r3(d, s)
    elif k == "delta":
        want = tuple(sorted(s))
        hit = [g for g in (_triangle_faces(d)) if g[0] == want and g[1] == "cyclic"]
        if hit:
            out = _triangle_slide(d, hit[0][2])
        else:
            out = delta_insert(d, s)
    elif k in ("pass", "sharp"):
        want = tuple(sorted(s))
        hit = [g for g in _band_grids(d) if g.mids == want and g.kind == k]
        if hit:
            out = _flip_grid(d, hit[0])
        else:
            out = _insert_band_clasp(d, s, k)
    elif k == "gamma":
        want = tuple(sorted(s))
        hit = [g for g in _band_grids(d)
               if g.mids == want and g.kind == "pass" and (g.fold_over or g.fold_under)]
        if hit:
            out = _flip_grid(d, hit[0])
        else:
            out, _mids = _insert_gamma(d, s[0], s[1], s[2])
    else:
        raise MoveError(f"unhandled kind {k}")
    if out.n_components != before:
        raise MoveError(f"{k} move changed the component count")
    return out


def is_self_move(d: Diagram, site: MoveSite):
    """Self classification of a site.

    Pass/sharp/gamma and the Reidemeister kinds report True when every
    designated strand lies on one component.  Delta reports the finer
    "self" / "quasi-self" / "mixed" classification.
    """
    if site.kind == "crossing_change":
        for ci in range(d.n_crossings):
            if d.under_in(ci) == site.strands[0]:
                return (d.component_of(d.under_in(ci))
                        == d.component_of(d.over_in(ci)))
        raise MoveError(f"no crossing has incoming under-arc {site.strands[0]}")
    comps = [d.component_of(a) for a in site.strands]
    if site.kind == "delta":
        distinct = len(set(comps))
        if distinct == 1:
            return "self"
        if distinct < len(comps):
            return "quasi-self"
        return "mixed"
    return len(set(comps)) == 1


# ---------------------------------------------------------------------------
# bands, fusion, twists
# ---------------------------------------------------------------------------


def _materialize_free_circles(d: Diagram) -> Diagram:
    """Give every crossing-free circle a one-kink presentation so bands can
    attach to an actual arc."""
    if all(comp for comp in d.components):
        return d
    crossings = [c.slots for c in d.crossings]
    comps = []
    used = set(d.arcs)
    for comp in d.components:
        if comp:
            comps.append(comp)
            continue
        n1, n2 = fresh_arcs(used, 2)
        used.update((n1, n2))
        crossings.append((n1, n1, n2, n2))
        comps.append((n1, n2))
    out = Diagram(crossings, comps)
    out.validate()
    return out


def _head_swap(d: Diagram, u: int, v: int) -> Diagram:
    """Crossingless coherent fusion: exchange the head occurrences of two arcs
    on different components (the planar band).  Raises if not planar here."""
    res = d.resolution
    cu, cv = res.comp_of[u], res.comp_of[v]
    if cu == cv:
        raise MoveError("band endpoints lie on the same component")
    (ci_u, k_u) = res.head[u]
    (ci_v, k_v) = res.head[v]
    cross = [list(c.slots) for c in d.crossings]
    cross[ci_u][k_u] = v
    cross[ci_v][k_v] = u
    comp_u = list(d.components[cu])
    comp_v = list(d.components[cv])
    iu = comp_u.index(u)
    iv = comp_v.index(v)
    merged = (comp_u[: iu + 1]
              + comp_v[iv + 1:] + comp_v[: iv + 1]
              + comp_u[iu + 1:])
    comps = []
    for i, comp in enumerate(d.components):
        if i == min(cu, cv):
            comps.append(tuple(merged))
        elif i in (cu, cv):
            continue
        else:
            comps.append(comp)
    out = Diagram(cross, comps)
    out.validate()
    return out


# per-twist junction fragments: (X1, X2) as functions of the strand pieces.
# Both crossings of a full twist carry the same sign; the two layouts per
# hand are the mirror arrangements of the junction.
_TWIST_FRAGMENTS = {
    +1: (
        lambda b_prev, a, c, e_next: (lambda e, b: ((c, a, e, b_prev), (a, c, b, e_next))),
        lambda b_prev, a, c, e_next: (lambda e, b: ((b_prev, e, a, c), (e_next, b, c, a))),
    ),
    -1: (
        lambda b_prev, a, c, e_next: (lambda e, b: ((c, b_prev, e, a), (a, e_next, b, c))),
        lambda b_prev, a, c, e_next: (lambda e, b: ((b_prev, c, a, e), (e_next, a, c, b))),
    ),
}


def _fuse_with_twists(d: Diagram, u: int, v: int, twists: int) -> Diagram:
    """Coherent fusion of the components of arcs u and v with |twists| full
    twists built into the band junction.

    The twist crossings are anchored at the swapped head slots, so their
    placement is forced; the handedness follows the sign of ``twists`` when
    the local geometry admits it and mirrors otherwise.
    """
    if twists == 0:
        return _head_swap(d, u, v)
    res = d.resolution
    cu, cv = res.comp_of[u], res.comp_of[v]
    if cu == cv:
        raise MoveError("band endpoints lie on the same component")
    t = abs(twists)
    hands = (+1, -1) if twists > 0 else (-1, +1)
    last = None
    for hand in hands:
        for layout in range(2):
            w = _Weaver(d)
            slot_u = w.head_slot[u]
            slot_v = w.head_slot[v]
            a = [w.fresh() for _ in range(t)]
            b = [w.fresh() for _ in range(t)]
            c = [w.fresh() for _ in range(t)]
            e = [w.fresh() for _ in range(t)]
            bb = [u] + b              # A-side pieces entering each twist
            ee = e + [v]              # B-side piece entering twist i is ee[i+1]
            for i in range(t):
                frag = _TWIST_FRAGMENTS[hand][layout](bb[i], a[i], c[i], ee[i + 1])
                x1, x2 = frag(e[i], b[i])
                w.add_crossing(*x1)
                w.add_crossing(*x2)
            w.crossings[slot_v[0]][slot_v[1]] = b[t - 1]
            w.head_slot[b[t - 1]] = slot_v
            w.crossings[slot_u[0]][slot_u[1]] = e[0]
            w.head_slot[e[0]] = slot_u
            comp_a = list(d.components[cu])
            comp_b = list(d.components[cv])
            iu, iv = comp_a.index(u), comp_b.index(v)
            mid_a = [x for pair in zip(a, b) for x in pair]
            mid_b = [x for i in reversed(range(t)) for x in (c[i], e[i])]
            merged = (comp_a[: iu + 1] + mid_a
                      + comp_b[iv + 1:] + comp_b[: iv + 1] + mid_b
                      + comp_a[iu + 1:])
            comps = []
            for i, comp in enumerate(d.components):
                if i == min(cu, cv):
                    comps.append(tuple(merged))
                elif i in (cu, cv):
                    continue
                else:
                    comps.append(comp)
            cand = Diagram(w.crossings, comps)
            try:
                cand.validate()
                return cand
            except DiagramError as err:
                last = err
    raise MoveError(f"no twisted band fits between arcs {u} and {v}: {last}")


def _apply_band_ex(d: Diagram, u: int, v: int, twists: int = 0, route=()):
    """Fuse the components of arcs u and v with a band from u to v crossing
    over the ``route`` arcs in order, then the requested full twists at the
    junction.  Returns (diagram, band side arcs)."""
    cur = d
    tip = v
    for r in reversed(tuple(route)):
        cur, tip = _r2_push(cur, tip, r)
    cur = _fuse_with_twists(cur, u, tip, twists)
    return cur, u, tip


def _apply_band(d: Diagram, u: int, v: int, twists: int = 0, route=()) -> Diagram:
    return _apply_band_ex(d, u, v, twists, route)[0]


def _face_arc_map(d: Diagram):
    m = {}
    for fi, face in enumerate(d.faces):
        for ci, k in face:
            m.setdefault(d.crossings[ci][k], set()).add(fi)
    return m


def _find_band(d: Diagram, comp_i: int, comp_j: int, rng=None, twists: int = 0):
    """Deterministic search for a valid band between two components (0-based).
    Returns (diagram_after_fusion, band side arcs, route)."""
    arcs_i = sorted(d.components[comp_i])
    arcs_j = sorted(d.components[comp_j])
    if rng is not None:
        arcs_i = rng.sample(arcs_i, len(arcs_i))
        arcs_j = rng.sample(arcs_j, len(arcs_j))
    for u in arcs_i:
        for v in arcs_j:
            try:
                return _fuse_with_twists(d, u, v, twists), u, v, ()
            except (DiagramError, MoveError):
                continue
    # routed fallback: breadth-first over face adjacency from comp_j's faces
    fam = _face_arc_map(d)
    face_of = {}
    for a, fs in fam.items():
        for f in fs:
            face_of.setdefault(f, set()).add(a)
    targets = {f for a in arcs_i for f in fam.get(a, ())}
    starts = [(v, f) for v in arcs_j for f in sorted(fam.get(v, ()))]
    seen = set()
    queue = [(v, f, ()) for v, f in starts]
    while queue:
        v, f, route = queue.pop(0)
        if (v, f) in seen:
            continue
        seen.add((v, f))
        if f in targets and len(route) > 0:
            # the BFS walked from v, so the u-to-v route is the reverse
            u_route = tuple(reversed(route))
            for u in arcs_i:
                if f in fam.get(u, ()):
                    try:
                        out, bu, btip = _apply_band_ex(d, u, v, twists, u_route)
                        return out, bu, btip, u_route
                    except (DiagramError, MoveError):
                        continue
        if len(route) >= 4:
            continue
        for a in sorted(face_of.get(f, ())):
            for f2 in fam.get(a, ()):
                if f2 != f:
                    queue.append((v, f2, route + (a,)))
    raise MoveError(f"no band found between components {comp_i + 1} and {comp_j + 1}")


def band_sum(d1: Diagram, d2: Diagram, bands=None, twists=None) -> Diagram:
    """Componentwise fusion (k_i # k'_i) of two equal-length links.

    ``bands`` is one BandSpec per component (from-arcs use d1's labels,
    to-arcs d2's labels, route arcs post-union labels: d2 arcs are offset by
    d1's largest arc id) or None for automatically chosen planar bands, in
    which case ``twists`` may still give per-band full-twist counts.  Each
    band crossing over a routed arc contributes two new crossings; twists
    contribute 2*|twists| crossings between the band's own strands.
    """
    n = d1.n_components
    if d2.n_components != n:
        raise MoveError("band_sum needs equal component counts")
    from .diagram import disjoint_union
    offset = max(d1.arcs, default=0)
    d = _materialize_free_circles(disjoint_union(d1, d2))
    for i in range(n):
        if bands is None:
            t = twists[i] if twists else 0
            d, _u, _v, _route = _find_band(d, i, n, twists=t)
        else:
            spec = bands[i]
            d = _apply_band(d, spec.from_[1], spec.to[1] + offset,
                            spec.twists, spec.route)
    return d


def fuse_to_knot(d: Diagram, plan=None) -> Diagram:
    """Join all components into one knot with n-1 bands.

    The default plan fuses along the spanning path 1-2-...-n, preferring a
    crossingless band in a shared region and routing over intervening arcs
    otherwise.  An explicit plan is a list of BandSpecs applied in order.
    """
    d = _materialize_free_circles(d)
    if plan is not None:
        for spec in plan:
            d = _materialize_free_circles(d)
            d = _apply_band(d, spec.from_[1], spec.to[1], spec.twists, spec.route)
        if d.n_components != 1:
            raise MoveError("band plan does not connect all components")
        return d
    while d.n_components > 1:
        d, *_rest = _find_band(d, 0, 1)
    return d


def enumerate_fusion_plans(d: Diagram, limit: int = 3):
    """Distinct spanning band plans (as fused knots), for well-definedness tests."""
    d0 = _materialize_free_circles(d)
    outs = []
    seen = set()
    variant = 0
    while len(outs) < limit and variant < 8 * limit:
        cur = d0
        ok = True
        rng = random.Random(variant)
        try:
            while cur.n_components > 1:
                cur, *_rest = _find_band(cur, 0, 1, rng=rng)
        except MoveError:
            ok = False
        if ok:
            key = cur.canonical_key()
            if key not in seen:
                seen.add(key)
                outs.append(cur)
        variant += 1
    return outs


# ---------------------------------------------------------------------------
# seeded move generator
# ---------------------------------------------------------------------------


def _insert_candidates(d: Diagram, kind: str, self_only: bool, quasi_self_ok: bool):
    """Face-bundle insertion sites (embed only in favorable geometry; the
    generator treats failures as unmatchable and moves on)."""
    res = d.resolution
    out = []
    for face in d.faces:
        arcs = sorted({d.crossings[ci][k] for ci, k in face})
        if kind == "delta" and len(arcs) >= 3:
            for trio in itertools.combinations(arcs, 3):
                comps = {res.comp_of[a] for a in trio}
                if self_only:
                    if len(comps) == 3:
                        continue
                    if not quasi_self_ok and len(comps) != 1:
                        continue
                out.append(MoveSite("delta", trio))
        elif kind in ("pass", "sharp") and len(arcs) >= 4:
            for quad in itertools.combinations(arcs, 4):
                comps = {res.comp_of[a] for a in quad}
                if self_only and len(comps) != 1:
                    continue
                out.append(MoveSite(kind, quad))
    return out


def _matched_candidates(d: Diagram, kind: str, self_only: bool, quasi_self_ok: bool):
    out = []
    if kind in ("pass", "sharp", "gamma"):
        for g in _band_grids(d):
            gk = "gamma" if (kind == "gamma" and g.kind == "pass"
                             and (g.fold_over or g.fold_under)) else g.kind
            if gk != kind:
                continue
            site = MoveSite(kind, g.mids)
            if self_only and is_self_move(d, site) is not True:
                continue
            out.append(site)
    elif kind in ("delta", "r3"):
        want = "cyclic" if kind == "delta" else "staircase"
        for mids, pattern, strands in _triangle_faces(d):
            if pattern != want:
                continue
            site = MoveSite(kind, mids)
            if kind == "delta" and self_only:
                cls = is_self_move(d, site)
                if cls == "mixed" or (cls == "quasi-self" and not quasi_self_ok):
                    continue
            if kind == "r3" and self_only and is_self_move(d, site) is not True:
                continue
            out.append(site)
    elif kind == "r1":
        for a in d.arcs:
            for v in range(4):
                out.append(MoveSite("r1", (a,), "fwd", v))
        for a, occ in sorted(d.occurrences.items()):
            if occ[0][0] == occ[1][0]:
                out.append(MoveSite("r1", (a,), "bwd"))
    elif kind == "r2":
        fam = _face_arc_map(d)
        pairs = set()
        for _fi, face in enumerate(d.faces):
            arcs = sorted({d.crossings[ci][k] for ci, k in face})
            for x, y in itertools.permutations(arcs, 2):
                pairs.add((x, y))
        for x, y in sorted(pairs):
            out.append(MoveSite("r2", (x, y), "fwd"))
        for arcs, _cs in _removable_bigons(d):
            out.append(MoveSite("r2", arcs, "bwd"))
        _ = fam
    elif kind == "crossing_change":
        for ci in range(d.n_crossings):
            site = MoveSite("crossing_change", (d.under_in(ci),))
            if self_only and is_self_move(d, site) is not True:
                continue
            out.append(site)
    return out


_INSERT_COST = {"delta": 6, "pass": 8, "sharp": 8, "gamma": 4, "r1": 1, "r2": 2}


def random_move_sequence(d: Diagram, kinds, self_only: bool, count: int, seed: int,
                         quasi_self_ok: bool = True,
                         max_crossings: int = 16):
    """Apply ``count`` random moves of the given kinds; deterministic in seed.

    Every emitted site satisfies the self restriction when ``self_only`` is
    set (quasi-self acceptance for delta is a flag), and every emitted diagram
    is validated.  When no site of the requested kinds exists the generator
    interleaves invisible isotopies (kinks, finger pushes) to create one, and
    it greedily simplifies oversized diagrams; genuinely unmatchable sites
    are skipped.
    """
    rng = random.Random(seed)
    kinds = sorted(set(kinds))
    for k in kinds:
        if k not in MOVE_KINDS:
            raise MoveError(f"unknown move kind {k!r}")
    from .invariants import reduce_diagram
    out = []
    cur = d
    for _step in range(count):
        if cur.n_crossings > max_crossings - 2:
            cur = reduce_diagram(cur)
        preps = 0
        while True:
            actions = _step_actions(cur, kinds, self_only, quasi_self_ok, max_crossings)
            applied = None
            if actions:
                rng.shuffle(actions)
                for _key, thunk in actions[:25]:
                    try:
                        applied = thunk()
                        break
                    except (MoveError, DiagramError):
                        continue
            if applied is not None:
                break
            # no usable site: grow the diagram with an invisible isotopy
            preps += 1
            if preps > 8 or cur.n_crossings + 2 > max_crossings:
                return out
            cur = _prep(cur, rng)
        site, cur = applied
        out.append((site, cur))
    return out


def _step_actions(cur: Diagram, kinds, self_only, quasi_self_ok, max_crossings):
    """Deterministically ordered candidate actions for one generator step."""
    actions = []

    def add(key, thunk):
        actions.append((key, thunk))

    def apply_site(site):
        return lambda: (site, apply_move(cur, site))

    for k in kinds:
        for site in _matched_candidates(cur, k, self_only, quasi_self_ok):
            add((0, site.kind, site.strands, site.direction, site.variant), apply_site(site))
        cost = _INSERT_COST.get(k, 0)
        if not cost or cur.n_crossings + cost > max_crossings:
            continue
        if k in ("pass", "gamma"):
            for gsite in _gamma_candidates(cur, self_only):
                x, y, z = gsite.strands

                def run(x=x, y=y, z=z, kind=k):
                    d2, mids = _insert_gamma(cur, x, y, z)
                    site = (MoveSite("gamma", (x, y, z)) if kind == "gamma"
                            else MoveSite("pass", mids))
                    return site, d2

                add((1, k, gsite.strands, "fwd", 0), run)
        if k == "sharp":
            for x, y in _same_face_pairs(cur, self_only):

                def run_sharp(x=x, y=y):
                    d2, mids = _insert_sharp(cur, x, y)
                    return MoveSite("sharp", mids), d2

                add((1, k, (x, y), "fwd", 0), run_sharp)
        if k == "delta":
            classes = {"self"} if self_only and not quasi_self_ok else (
                {"self", "quasi-self"} if self_only else {"self", "quasi-self", "mixed"})
            for x, y in _same_face_pairs(cur, False):
                if self_only and cur.component_of(x) != cur.component_of(y) \
                        and not quasi_self_ok:
                    continue

                def run_delta(x=x, y=y, classes=classes):
                    d2, mids = _insert_delta_via_isotopy(cur, x, y, classes)
                    return MoveSite("delta", mids), d2

                add((2, k, (x, y), "fwd", 0), run_delta)
        if k in ("delta", "sharp", "pass"):
            for site in _insert_candidates(cur, k, self_only, quasi_self_ok):
                add((3, site.kind, site.strands, site.direction, site.variant),
                    apply_site(site))
    actions.sort(key=lambda kv: kv[0])
    return actions


def _same_face_pairs(d: Diagram, same_component: bool):
    pairs = set()
    for face in d.faces:
        fa = sorted({d.crossings[ci][k] for ci, k in face})
        for x, y in itertools.permutations(fa, 2):
            if same_component and d.component_of(x) != d.component_of(y):
                continue
            pairs.add((x, y))
    return sorted(pairs)


def _prep(d: Diagram, rng) -> Diagram:
    """Invisible isotopy prep: materialize circles, kink, or push a finger."""
    if any(not c for c in d.components):
        return _materialize_free_circles(d)
    arcs = sorted(d.arcs)
    fam = _face_arc_map(d)
    face_pairs = []
    for face in d.faces:
        fa = sorted({d.crossings[ci][k] for ci, k in face})
        face_pairs.extend((x, y) for x, y in itertools.permutations(fa, 2))
    _ = fam
    if face_pairs:
        for x, y in rng.sample(sorted(set(face_pairs)), min(8, len(set(face_pairs)))):
            try:
                return r2_insert(d, x, y)
            except (MoveError, DiagramError):
                continue
    return r1_insert(d, rng.choice(arcs), rng.randrange(4))
