"""Planar diagram codes for ordered, oriented links.

A diagram is a list of crossings over positive integer arc labels plus an
ordered list of component cycles.  Crossing slots are listed counterclockwise
starting at the incoming under-arc, so for slots ``(a, b, c, d)`` the under
strand runs ``a -> c`` and the over strand occupies ``b`` and ``d``.  The
crossing sign is ``+1`` exactly when the over strand runs ``d -> b``; it is
derived from the component cycles, never stored.

Components are cyclic arc sequences in traversal order.  A crossing-free
circle is stored as an empty cycle (written ``O`` in the text format, ``[]``
in JSON).  Diagrams are immutable; every operation returns a new diagram.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

ArcId = int

IN, OUT = 0, 1  # occurrence roles: arc head (absorbed) / arc tail (emitted)


class DiagramError(ValueError):
    """A diagram code failed parsing or validation."""


@dataclass(frozen=True)
class Crossing:
    """A single crossing; ``slots`` run counterclockwise from the incoming under-arc."""

    slots: tuple[ArcId, ArcId, ArcId, ArcId]

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(int(s) for s in self.slots))
        if len(self.slots) != 4:
            raise DiagramError(f"crossing needs 4 slots, got {self.slots}")
        if any(s <= 0 for s in self.slots):
            raise DiagramError(f"arc ids must be positive: {self.slots}")

    def __getitem__(self, i: int) -> ArcId:
        return self.slots[i]


@dataclass(frozen=True)
class SublinkSelector:
    """Strictly increasing, nonempty list of 1-based component indices."""

    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if not self.indices:
            raise DiagramError("empty sublink selector")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise DiagramError(f"selector indices must strictly increase: {self.indices}")
        if self.indices[0] < 1:
            raise DiagramError(f"selector indices are 1-based: {self.indices}")

    def check(self, n: int) -> None:
        if self.indices[-1] > n:
            raise DiagramError(f"selector {self.indices} out of range for {n} components")

    def key(self) -> str:
        return ",".join(str(i) for i in self.indices)


def normalize_selector(s) -> SublinkSelector:
    if isinstance(s, SublinkSelector):
        return s
    return SublinkSelector(tuple(s))


@dataclass(frozen=True)
class _Resolution:
    """Derived orientation data: occurrence roles, passage directions, signs."""

    role: dict          # (ci, slot) -> IN | OUT
    signs: tuple        # per crossing: +1 | -1
    over_in: tuple      # per crossing: arc absorbed by the over passage
    over_out: tuple
    comp_of: dict       # arc -> component index
    head: dict          # arc -> (ci, slot) where absorbed
    tail: dict          # arc -> (ci, slot) where emitted


class Diagram:
    """Immutable ordered oriented link diagram."""

    __slots__ = ("crossings", "components", "__dict__")

    def __init__(self, crossings: Iterable, components: Iterable):
        xs = []
        for c in crossings:
            xs.append(c if isinstance(c, Crossing) else Crossing(tuple(c)))
        object.__setattr__(self, "crossings", tuple(xs))
        comps = tuple(tuple(int(a) for a in comp) for comp in components)
        object.__setattr__(self, "components", comps)

    def __setattr__(self, name, value):  # immutability: cached_property still works
        if name in ("crossings", "components"):
            raise AttributeError("Diagram is immutable")
        object.__setattr__(self, name, value)

    def __eq__(self, other):
        return (
            isinstance(other, Diagram)
            and self.crossings == other.crossings
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.crossings, self.components))

    def __repr__(self):
        return f"Diagram({len(self.crossings)} crossings, {self.n_components} components)"

    # ----- basic structure -------------------------------------------------

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @cached_property
    def arcs(self) -> tuple[ArcId, ...]:
        out = []
        for comp in self.components:
            out.extend(comp)
        return tuple(sorted(out))

    @cached_property
    def occurrences(self) -> dict:
        """arc -> tuple of (crossing index, slot)."""
        occ: dict = {}
        for ci, cr in enumerate(self.crossings):
            for k, a in enumerate(cr.slots):
                occ.setdefault(a, []).append((ci, k))
        return {a: tuple(v) for a, v in occ.items()}

    @cached_property
    def succ(self) -> dict:
        """arc -> next arc along its component."""
        nxt = {}
        for comp in self.components:
            for i, a in enumerate(comp):
                nxt[a] = comp[(i + 1) % len(comp)]
        return nxt

    # ----- orientation resolution ------------------------------------------

    @cached_property
    def resolution(self) -> _Resolution:
        comp_of: dict = {}
        for i, comp in enumerate(self.components):
            for a in comp:
                if a in comp_of:
                    raise DiagramError(f"arc {a} appears twice in the component lists")
                if a <= 0:
                    raise DiagramError(f"arc ids must be positive: {a}")
                comp_of[a] = i

        occ = self.occurrences
        for a in occ:
            if a not in comp_of:
                raise DiagramError(f"arc {a} used in a crossing but missing from components")
        for a, c in comp_of.items():
            n = len(occ.get(a, ()))
            if n != 2:
                raise DiagramError(f"arc {a} appears {n} times among crossing slots (expected 2)")

        # Match each consecutive component pair (x, s) to the unique crossing
        # passage where x is absorbed and s emitted.  Under passages are forced
        # (slot 0 absorbs, slot 2 emits); over passages are matched afterwards.
        pair_left: dict = {}
        for comp in self.components:
            for i, a in enumerate(comp):
                pair_left[(a, comp[(i + 1) % len(comp)])] = None

        role: dict = {}
        over_dir: dict = {}
        for ci, cr in enumerate(self.crossings):
            a, _, c, _ = cr.slots
            if (a, c) not in pair_left:
                raise DiagramError(
                    f"crossing {ci}: under strand {a}->{c} does not follow any component cycle"
                )
            if pair_left[(a, c)] is not None:
                raise DiagramError(f"component pair {a}->{c} realized by two crossings")
            pair_left[(a, c)] = ("under", ci)
            role[(ci, 0)] = IN
            role[(ci, 2)] = OUT

        remaining = [p for p, v in pair_left.items() if v is None]
        over_free = set(range(len(self.crossings)))
        over_free -= set()
        candidates: dict = {}
        for x, s in remaining:
            cands = []
            for ci, cr in enumerate(self.crossings):
                b, d = cr.slots[1], cr.slots[3]
                if (x == d and s == b) or (x == b and s == d):
                    cands.append(ci)
            candidates[(x, s)] = cands

        unmatched = sorted(remaining)
        taken: set = set()
        while unmatched:
            progress = False
            for p in list(unmatched):
                free = [ci for ci in candidates[p] if ci not in taken]
                if not free:
                    raise DiagramError(
                        f"no crossing realizes component pair {p[0]}->{p[1]} as an over passage"
                    )
                if len(free) == 1:
                    over_dir[free[0]] = p
                    taken.add(free[0])
                    unmatched.remove(p)
                    progress = True
            if unmatched and not progress:
                p = unmatched.pop(0)  # ambiguous 2-arc over component: fixed tie-break
                ci = min(ci for ci in candidates[p] if ci not in taken)
                over_dir[ci] = p
                taken.add(ci)

        signs = []
        over_in = []
        over_out = []
        for ci, cr in enumerate(self.crossings):
            if ci not in over_dir:
                raise DiagramError(f"crossing {ci}: over passage not traversed by any component")
            x, s = over_dir[ci]
            b, d = cr.slots[1], cr.slots[3]
            if x == d and s == b:
                signs.append(+1)
                role[(ci, 3)] = IN
                role[(ci, 1)] = OUT
            else:
                signs.append(-1)
                role[(ci, 1)] = IN
                role[(ci, 3)] = OUT
            over_in.append(x)
            over_out.append(s)

        head: dict = {}
        tail: dict = {}
        for a, places in occ.items():
            for ci, k in places:
                if role[(ci, k)] == IN:
                    if a in head:
                        raise DiagramError(f"arc {a} is absorbed at two crossings")
                    head[a] = (ci, k)
                else:
                    if a in tail:
                        raise DiagramError(f"arc {a} is emitted at two crossings")
                    tail[a] = (ci, k)
        for a in occ:
            if a not in head or a not in tail:
                raise DiagramError(f"arc {a} lacks a consistent in/out occurrence pair")

        return _Resolution(role, tuple(signs), tuple(over_in), tuple(over_out),
                           comp_of, head, tail)

    @property
    def signs(self) -> tuple[int, ...]:
        return self.resolution.signs

    def sign(self, ci: int) -> int:
        return self.resolution.signs[ci]

    def component_of(self, arc: ArcId) -> int:
        return self.resolution.comp_of[arc]

    def under_in(self, ci: int) -> ArcId:
        return self.crossings[ci][0]

    def under_out(self, ci: int) -> ArcId:
        return self.crossings[ci][2]

    def over_in(self, ci: int) -> ArcId:
        return self.resolution.over_in[ci]

    def over_out(self, ci: int) -> ArcId:
        return self.resolution.over_out[ci]

    # ----- faces and planarity ---------------------------------------------

    @cached_property
    def faces(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Face orbits of the combinatorial map, as tuples of darts (ci, slot)."""
        res = self.resolution
        occ = self.occurrences
        alpha = {}
        for places in occ.values():
            (c1, k1), (c2, k2) = places
            alpha[(c1, k1)] = (c2, k2)
            alpha[(c2, k2)] = (c1, k1)
        faces = []
        seen = set()
        for ci in range(len(self.crossings)):
            for k in range(4):
                d0 = (ci, k)
                if d0 in seen:
                    continue
                orbit = []
                d = d0
                while True:
                    orbit.append(d)
                    seen.add(d)
                    c2, k2 = alpha[d]
                    d = (c2, (k2 + 1) % 4)
                    if d == d0:
                        break
                    if d in seen:
                        raise DiagramError("face walk failed to close (corrupt code)")
                faces.append(tuple(orbit))
        _ = res  # resolution forced first so errors surface before face talk
        return tuple(faces)

    @cached_property
    def pieces(self) -> list[set[int]]:
        """Crossing indices grouped into connected pieces of the diagram."""
        n = len(self.crossings)
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for places in self.occurrences.values():
            (c1, _), (c2, _) = places
            r1, r2 = find(c1), find(c2)
            if r1 != r2:
                parent[r1] = r2
        groups: dict = {}
        for i in range(n):
            groups.setdefault(find(i), set()).add(i)
        return sorted(groups.values(), key=min)

    def validate(self) -> None:
        """Raise DiagramError unless all structural invariants hold.

        Beyond arc-degree and orientation consistency this runs the left-turn
        face walk and requires V - E + F = 2 on every connected piece, which
        is exactly sphere-planarity of the code.
        """
        res = self.resolution
        faces = self.faces
        piece_of: dict = {}
        for pi, grp in enumerate(self.pieces):
            for ci in grp:
                piece_of[ci] = pi
        for pi, grp in enumerate(self.pieces):
            v = len(grp)
            e = sum(1 for a, (ci, _k) in res.head.items() if ci in grp)
            f = sum(1 for face in faces if face and piece_of[face[0][0]] == pi)
            if v - e + f != 2:
                raise DiagramError(
                    f"piece containing crossing {min(grp)} has V-E+F = {v}-{e}+{f}"
                    f" = {v - e + f}, not 2 (code is not planar)"
                )

    # ----- canonical form ---------------------------------------------------

    @cached_property
    def canonical(self) -> "Diagram":
        """Relabeled copy: each cycle rotated to its least arc, arcs renumbered
        by first traversal, crossings sorted lexicographically."""
        rot = []
        for comp in self.components:
            if comp:
                i = comp.index(min(comp))
                rot.append(comp[i:] + comp[:i])
            else:
                rot.append(comp)
        relabel = {}
        nxt = 1
        for comp in rot:
            for a in comp:
                relabel[a] = nxt
                nxt += 1
        new_comps = tuple(tuple(relabel[a] for a in comp) for comp in rot)
        new_cross = sorted(tuple(relabel[a] for a in c.slots) for c in self.crossings)
        return Diagram(new_cross, new_comps)

    def canonical_key(self) -> str:
        d = self.canonical
        comps = ";".join(",".join(map(str, c)) if c else "O" for c in d.components)
        cross = ";".join(",".join(map(str, c.slots)) for c in d.crossings)
        return comps + "|" + cross

    def same_code(self, other: "Diagram") -> bool:
        return self.canonical_key() == other.canonical_key()

    # ----- serialisation ----------------------------------------------------

    def to_text(self) -> str:
        d = self.canonical
        comps = ",".join("[" + ",".join(map(str, c)) + "]" if c else "O"
                         for c in d.components)
        lines = [f"components: [{comps}]"]
        lines += [f"X({c[0]},{c[1]},{c[2]},{c[3]})" for c in d.crossings]
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        d = self.canonical
        return {
            "components": [list(c) for c in d.components],
            "crossings": [list(c.slots) for c in d.crossings],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


# ----- parsing ---------------------------------------------------------------

_CROSSING_RE = re.compile(r"^X\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)$")


def _parse_component_list(text: str, lineno: int):
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise DiagramError(f"line {lineno}: component list must be bracketed: {text!r}")
    body = text[1:-1].strip()
    comps = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch in ", \t":
            i += 1
            continue
        if ch in "Oo":
            comps.append(())
            i += 1
            continue
        if ch == "[":
            j = body.find("]", i)
            if j < 0:
                raise DiagramError(f"line {lineno}: unclosed '[' in component list")
            inner = body[i + 1:j].strip()
            if inner:
                try:
                    comps.append(tuple(int(t) for t in inner.split(",")))
                except ValueError:
                    raise DiagramError(f"line {lineno}: bad arc id in {inner!r}") from None
            else:
                comps.append(())
            i = j + 1
            continue
        raise DiagramError(f"line {lineno}: unexpected character {ch!r} in component list")
    return comps


def parse(text: str) -> Diagram:
    """Parse the diagram text format or its JSON mirror; validates the result."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise DiagramError(f"bad JSON diagram: {e}") from None
        comps = [tuple(c) if not isinstance(c, str) else () for c in doc.get("components", [])]
        comps = [() if c == () or c == ("O",) else c for c in comps]
        cross = [tuple(x) for x in doc.get("crossings", [])]
        d = Diagram(cross, comps)
        d.validate()
        return d

    comps = None
    cross = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("components:"):
            if comps is not None:
                raise DiagramError(f"line {lineno}: duplicate components header")
            comps = _parse_component_list(line[len("components:"):], lineno)
            continue
        m = _CROSSING_RE.match(line)
        if not m:
            raise DiagramError(f"line {lineno}: expected 'X(a,b,c,d)', got {line!r}")
        if comps is None:
            raise DiagramError(f"line {lineno}: crossing before components header")
        cross.append(tuple(int(g) for g in m.groups()))
    if comps is None:
        raise DiagramError("missing 'components:' header")
    d = Diagram(cross, comps)
    d.validate()
    return d


def validate(d: Diagram) -> None:
    d.validate()


# ----- whole-diagram operations ------------------------------------------------


def mirror_reverse(d: Diagram) -> Diagram:
    """Mirror image with all orientations reversed.

    Flips every crossing sign and reverses every component; pairwise linking
    numbers are negated.  Applying it twice returns the original diagram.
    """
    new_cross = []
    for ci, cr in enumerate(d.crossings):
        s = d.crossings and d.sign(ci)
        a, b, c, e = cr.slots
        if s > 0:
            new_cross.append((b, c, e, a))
        else:
            new_cross.append((e, a, b, c))
    new_comps = tuple(tuple(reversed(comp)) for comp in d.components)
    return Diagram(new_cross, new_comps)


def disjoint_union(d1: Diagram, d2: Diagram) -> Diagram:
    """Side-by-side union; components of d2 follow those of d1."""
    offset = max(d1.arcs, default=0)
    cross = [c.slots for c in d1.crossings]
    cross += [tuple(a + offset for a in c.slots) for c in d2.crossings]
    comps = list(d1.components) + [tuple(a + offset for a in comp) for comp in d2.components]
    return Diagram(cross, comps)


def sublink(d: Diagram, selector) -> Diagram:
    """Delete unselected components; crossings with a kept strand are smoothed
    to the kept strand's path.  Kept components keep their induced order."""
    sel = normalize_selector(selector)
    sel.check(d.n_components)
    keep = set(i - 1 for i in sel.indices)
    res = d.resolution
    drop_arcs = set()
    for i, comp in enumerate(d.components):
        if i not in keep:
            drop_arcs.update(comp)
    remove = set()
    joins = []
    for ci, cr in enumerate(d.crossings):
        under_dropped = cr[0] in drop_arcs
        over_dropped = res.over_in[ci] in drop_arcs
        if not (under_dropped or over_dropped):
            continue
        remove.add(ci)
        if not under_dropped:
            joins.append((cr[0], cr[2]))
        if not over_dropped:
            joins.append((res.over_in[ci], res.over_out[ci]))
    out = _rewire(d, remove, joins, drop_components=set(range(d.n_components)) - keep)
    return out


# ----- surgery helpers (shared with the move engine and the skein recursion) ---


def _switch_crossing(d: Diagram, ci: int) -> Diagram:
    """Exchange over/under at one crossing (sign flips, components unchanged)."""
    s = d.sign(ci)
    a, b, c, e = d.crossings[ci].slots
    new = (e, a, b, c) if s > 0 else (b, c, e, a)
    cross = [cr.slots for cr in d.crossings]
    cross[ci] = new
    return Diagram(cross, d.components)


def _smooth_crossing(d: Diagram, ci: int) -> Diagram:
    """Oriented smoothing: remove the crossing, rejoin respecting orientation."""
    a, b, c, e = d.crossings[ci].slots
    if d.sign(ci) > 0:
        joins = [(a, b), (e, c)]
    else:
        joins = [(a, e), (b, c)]
    return _rewire(d, {ci}, joins, drop_components=set())


def _rewire(d: Diagram, remove: set, joins: list, drop_components: set) -> Diagram:
    """Remove crossings, splice arcs along ``joins`` (head of first continues
    into tail of second), drop whole components, rebuild cycles.

    Chains of joined arcs merge into one arc keeping the chain-start label;
    a chain that closes on itself becomes a crossing-free circle.  New
    component order: by least original component index involved, then least
    arc id; this preserves the order whenever no components merge or split.
    """
    res = d.resolution
    drop_arcs = set()
    for i in drop_components:
        drop_arcs.update(d.components[i])

    succ_join = {}
    pred_join = {}
    for u, v in joins:
        if u in succ_join or v in pred_join:
            raise DiagramError("inconsistent splice: arc joined twice")
        succ_join[u] = v
        pred_join[v] = u

    # Chains and closed loops among the joined arcs.
    label_of = {}
    loops = []  # (orig component index, min arc id)
    seen = set()
    for u in sorted(succ_join):
        if u in seen:
            continue
        # walk back to the chain start
        start = u
        walked = {u}
        while start in pred_join and pred_join[start] not in walked:
            start = pred_join[start]
            walked.add(start)
        if start in pred_join:  # closed loop
            loop = [start]
            x = succ_join[start]
            while x != start:
                loop.append(x)
                x = succ_join[x]
            seen.update(loop)
            if not set(loop) & drop_arcs:
                loops.append((min(res.comp_of[a] for a in loop), min(loop)))
            continue
        chain = [start]
        x = start
        while x in succ_join:
            x = succ_join[x]
            chain.append(x)
        seen.update(chain)
        for a in chain:
            label_of[a] = chain[0]

    def lab(a):
        return label_of.get(a, a)

    surv = []
    surv_idx = []
    for ci, cr in enumerate(d.crossings):
        if ci in remove:
            continue
        if any(a in drop_arcs for a in cr.slots):
            raise DiagramError("dropped arc still present at a surviving crossing")
        surv.append(tuple(lab(a) for a in cr.slots))
        surv_idx.append(ci)

    # successor relation on merged arcs, read off the surviving crossings
    succ = {}
    for new_ci, ci in enumerate(surv_idx):
        cr = d.crossings[ci]
        succ[lab(cr[0])] = lab(cr[2])
        succ[lab(res.over_in[ci])] = lab(res.over_out[ci])

    cycles = []
    visited = set()
    for a in sorted(succ):
        if a in visited:
            continue
        cyc = [a]
        visited.add(a)
        x = succ[a]
        while x != a:
            cyc.append(x)
            visited.add(x)
            x = succ[x]
        i = cyc.index(min(cyc))
        cyc = cyc[i:] + cyc[:i]
        comp_key = min(res.comp_of[b] for b in cyc)
        cycles.append(((comp_key, cyc[0]), tuple(cyc)))

    for comp_key, arc_key in loops:
        cycles.append(((comp_key, arc_key), ()))
    for i, comp in enumerate(d.components):
        if not comp and i not in drop_components:
            cycles.append(((i, -1), ()))

    cycles.sort(key=lambda kv: kv[0])
    return Diagram(surv, [c for _k, c in cycles])


def fresh_arcs(d_or_used, k: int) -> list[ArcId]:
    """The k smallest positive arc ids not already used."""
    used = set(d_or_used.arcs) if isinstance(d_or_used, Diagram) else set(d_or_used)
    out = []
    a = 1
    while len(out) < k:
        if a not in used:
            out.append(a)
            used.add(a)
        a += 1
    return out
