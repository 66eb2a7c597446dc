"""Milnor link-homotopy invariants from a Wirtinger presentation.

Longitudes are expanded in the reduced truncated Magnus ring (monomials of
distinct component indices, degree <= 3): a meridian maps to 1 + X_i and its
inverse to 1 - X_i, which is exact here since X_i^2 = 0.  Degree-1 longitude
coefficients are linking numbers; the degree-2 coefficient of X_i X_j in the
k-th longitude is the triple invariant, well defined modulo the gcd of the
pairwise linking numbers.  Sign convention: at a crossing of sign s the
outgoing under-generator is over^s * in * over^(-s), and the triple value is
reported for sorted indices i<j<k as the X_i X_j coefficient of longitude k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .diagram import Diagram, DiagramError


# ----- truncated reduced Magnus ring -------------------------------------------


def _mul(a: dict, b: dict, deg: int = 3) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            if len(m1) + len(m2) > deg:
                continue
            if set(m1) & set(m2):
                continue  # repeated index: dies in the reduced ring
            m = m1 + m2
            out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def _mul_many(*terms) -> dict:
    out = {(): 1}
    for t in terms:
        out = _mul(out, t)
    return out


def _meridian_series(i: int) -> dict:
    return {(): 1, (i,): 1}


def _power(series: dict, e: int) -> dict:
    """series**e for e = +-1.  Inversion is the Neumann sum
    (1 + t)^-1 = 1 - t + t^2 - t^3, exact in the truncation."""
    if e == 1:
        return dict(series)
    if series.get((), 0) != 1:
        raise DiagramError("can only invert series with constant term 1")
    t = {m: c for m, c in series.items() if m != ()}
    inv = {(): 1}
    term = dict(t)
    sign = -1
    for _ in range(3):
        if not term:
            break
        for m, c in term.items():
            inv[m] = inv.get(m, 0) + sign * c
        term = _mul(term, t)
        sign = -sign
    return {m: c for m, c in inv.items() if c}


# ----- Wirtinger data ------------------------------------------------------------


@dataclass(frozen=True)
class WirtingerData:
    """Arc-class generators, one conjugation relation per crossing, a chosen
    meridian per component, and framing-corrected longitude words."""

    generators: tuple               # class representative arcs
    relations: tuple                # (out_class, over_class, in_class, sign)
    meridians: tuple                # one class per component (None: free circle)
    longitudes: tuple               # per component: tuple of (class, sign)
    corrections: tuple              # per component: exponent stripped from its meridian


def _arc_classes(d: Diagram) -> dict:
    """Merge PD arcs through over-passages: Wirtinger generators."""
    res = d.resolution
    parent = {a: a for a in d.arcs}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for ci in range(d.n_crossings):
        r1, r2 = find(res.over_in[ci]), find(res.over_out[ci])
        if r1 != r2:
            parent[max(r1, r2)] = min(r1, r2)
    return {a: find(a) for a in d.arcs}


def wirtinger(d: Diagram) -> WirtingerData:
    """Wirtinger presentation read off the diagram."""
    res = d.resolution
    cls = _arc_classes(d)
    gens = tuple(sorted(set(cls.values())))
    relations = []
    for ci in range(d.n_crossings):
        relations.append((cls[d.under_out(ci)], cls[res.over_in[ci]],
                          cls[d.under_in(ci)], d.sign(ci)))
    meridians = []
    longitudes = []
    corrections = []
    for idx, comp in enumerate(d.components):
        if not comp:
            meridians.append(None)
            longitudes.append(())
            corrections.append(0)
            continue
        meridians.append(cls[comp[0]])
        word = []
        e = 0
        for arc in comp:
            ci, k = res.head[arc]
            if k == 0:  # under passage
                over = cls[res.over_in[ci]]
                s = d.sign(ci)
                word.append((over, s))
                if res.comp_of[res.over_in[ci]] == idx:
                    e += s
        longitudes.append(tuple(word))
        corrections.append(e)
    return WirtingerData(gens, tuple(relations), tuple(meridians),
                         tuple(longitudes), tuple(corrections))


# ----- mu-bar ---------------------------------------------------------------------


@dataclass(frozen=True)
class MuBar:
    """Pairwise linking numbers plus length-3 invariants with distinct indices.

    ``triples`` maps sorted 1-based (i, j, k) to (value, modulus), the value
    reduced modulo gcd(lk_ij, lk_jk, lk_ik) when that gcd is nonzero.
    """

    lk: tuple                        # tuple of tuple of int
    triples: dict = field(default_factory=dict)

    def pair(self, i: int, j: int) -> int:
        return self.lk[i - 1][j - 1]

    def to_json_dict(self) -> dict:
        return {
            "lk": [list(r) for r in self.lk],
            "mu123": {f"({i},{j},{k})": {"value": v, "modulus": m}
                      for (i, j, k), (v, m) in sorted(self.triples.items())},
        }


def _longitude_series(d: Diagram, wd: WirtingerData, rounds: Optional[int] = None):
    res = d.resolution
    comp_of_class = {}
    for a in d.arcs:
        comp_of_class.setdefault(a, res.comp_of[a])
    series = {g: _meridian_series(res.comp_of[g]) for g in wd.generators}
    anchored = set(m for m in wd.meridians if m is not None)
    rounds = (d.n_crossings + 3) if rounds is None else rounds
    for _ in range(rounds):
        for out, over, inn, s in wd.relations:
            if out in anchored:
                continue
            g = series[over]
            series[out] = _mul_many(_power(g, s), series[inn], _power(g, -s))
    longs = []
    for idx in range(d.n_components):
        lam = {(): 1}
        for over, s in wd.longitudes[idx]:
            lam = _mul(lam, _power(series[over], s))
        e = wd.corrections[idx]
        m = wd.meridians[idx]
        if e and m is not None:
            mer = _meridian_series(res.comp_of[m])
            step = _power(mer, 1 if e > 0 else -1)
            for _ in range(abs(e)):
                lam = _mul(lam, step)
        longs.append(lam)
    return longs


def mu_bar(d: Diagram) -> MuBar:
    """Linking numbers and triple link-homotopy invariants of the diagram."""
    from .invariants import linking_matrix
    lk = linking_matrix(d)
    n = d.n_components
    wd = wirtinger(d)
    longs = _longitude_series(d, wd)
    triples = {}
    for k in range(n):
        lam = longs[k]
        for i in range(n):
            for j in range(n):
                if len({i, j, k}) != 3 or not (i < j):
                    continue
                if (i, j, k) != tuple(sorted((i, j, k))):
                    continue
                val = lam.get((i, j), 0)
                mod = math.gcd(math.gcd(abs(int(lk[i, j])), abs(int(lk[j, k]))),
                               abs(int(lk[i, k])))
                if mod:
                    val %= mod
                triples[(i + 1, j + 1, k + 1)] = (val, mod)
    return MuBar(tuple(tuple(int(x) for x in row) for row in lk.tolist()), triples)


# ----- the link-homotopy decider ---------------------------------------------------


@dataclass(frozen=True)
class HomotopyVerdict:
    outcome: str                     # "homotopic" | "distinct" | "inconclusive"
    witness: Optional[tuple] = None  # (invariant, indices, left, right)

    def to_json_dict(self) -> dict:
        out = {"outcome": self.outcome}
        if self.witness:
            inv, idx, a, b = self.witness
            out["witness"] = {"invariant": inv,
                              "indices": ",".join(str(i) for i in idx),
                              "left": a, "right": b}
        return out


def _triples_agree(t1, t2) -> bool:
    v1, m1 = t1
    v2, m2 = t2
    if m1 != m2:
        return False
    if m1 == 0:
        return v1 == v2 or v1 == -v2
    return (v1 - v2) % m1 == 0 or (v1 + v2) % m1 == 0


def link_homotopy_verdict(d1: Diagram, d2: Diagram) -> HomotopyVerdict:
    """Decide link-homotopy: exact for up to 3 components.

    Knots are always homotopic; two-component links iff linking numbers
    agree; three-component links iff in addition the triple invariants agree
    (up to the sign symmetry of the convention).  With four or more
    components a disagreement is still conclusive, agreement is not.
    """
    n = d1.n_components
    if d2.n_components != n:
        raise DiagramError("link_homotopy_verdict needs equal component counts")
    if n == 1:
        return HomotopyVerdict("homotopic")
    m1, m2 = mu_bar(d1), mu_bar(d2)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if m1.pair(i, j) != m2.pair(i, j):
                return HomotopyVerdict(
                    "distinct", ("lk", (i, j), m1.pair(i, j), m2.pair(i, j)))
    if n == 2:
        return HomotopyVerdict("homotopic")
    for key in sorted(m1.triples):
        if not _triples_agree(m1.triples[key], m2.triples[key]):
            return HomotopyVerdict(
                "distinct", ("mu123", key, m1.triples[key][0], m2.triples[key][0]))
    if n == 3:
        return HomotopyVerdict("homotopic")
    return HomotopyVerdict("inconclusive")
