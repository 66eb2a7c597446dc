"""Linking data, the Conway polynomial, Arf invariants, properness predicates.

The Conway polynomial is computed by the skein relation
``conway(L+) - conway(L-) = z * conway(L0)`` with ``conway(unknot) = 1`` and
``conway(split link) = 0``, recursing toward descending diagrams.  Diagrams
are greedily simplified (kink and bigon removal) and results are memoized on
the canonical serialization, so repeated work across a test run is shared.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .diagram import (
    Diagram,
    DiagramError,
    SublinkSelector,
    normalize_selector,
    sublink,
    _rewire,
    _smooth_crossing,
    _switch_crossing,
)

DEFAULT_CROSSING_CAP = 16


class CapExceeded(Exception):
    """A skein computation was asked to start above the crossing cap."""

    def __init__(self, count: int, cap: int, what: str = "diagram"):
        self.count, self.cap, self.what = count, cap, what
        super().__init__(f"{what} has {count} crossings, cap is {cap}")


@dataclass(frozen=True)
class ConwayPoly:
    """Integer polynomial in z; ``coeffs[i]`` is the z**i coefficient."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        while c and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return ConwayPoly(tuple(self.coeff(i) + other.coeff(i) for i in range(n)))

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return ConwayPoly(tuple(self.coeff(i) - other.coeff(i) for i in range(n)))

    def shift(self) -> "ConwayPoly":
        """Multiply by z."""
        return ConwayPoly((0,) + self.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            if i == 0:
                terms.append(str(a))
            else:
                za = "z" if i == 1 else f"z^{i}"
                if a == 1:
                    terms.append(za)
                elif a == -1:
                    terms.append(f"-{za}")
                else:
                    terms.append(f"{a}{za}")
        return " + ".join(terms).replace("+ -", "- ")


_ZERO = ConwayPoly()
_ONE = ConwayPoly((1,))

_MEMO: dict = {}


def clear_cache() -> None:
    _MEMO.clear()


# ----- linking data ------------------------------------------------------------


def linking_matrix(d: Diagram) -> np.ndarray:
    """Symmetric integer matrix of pairwise linking numbers, zero diagonal."""
    n = d.n_components
    raw = np.zeros((n, n), dtype=int)
    res = d.resolution
    for ci in range(d.n_crossings):
        cu = res.comp_of[d.under_in(ci)]
        co = res.comp_of[res.over_in[ci]]
        if cu != co:
            s = d.sign(ci)
            raw[cu, co] += s
            raw[co, cu] += s
    if np.any(raw % 2):
        raise DiagramError("odd signed crossing count between two components")
    return raw // 2


def is_proper(d: Diagram, selector) -> bool:
    """True iff inside the selected sublink every component has even total
    linking with the others.  Singletons are always proper."""
    sel = normalize_selector(selector)
    sel.check(d.n_components)
    lk = linking_matrix(d)
    idx = [i - 1 for i in sel.indices]
    for i in idx:
        if sum(int(lk[i, j]) for j in idx if j != i) % 2:
            return False
    return True


def is_z2_split(d: Diagram) -> bool:
    """True iff all pairwise linking numbers are even."""
    lk = linking_matrix(d)
    n = d.n_components
    return all(int(lk[i, j]) % 2 == 0 for i in range(n) for j in range(i + 1, n))


# ----- greedy diagram reduction (kinks and bigons) ------------------------------


def _find_r1(d: Diagram):
    for face in d.faces:
        if len(face) == 1:
            return face[0][0]
    return None


def _remove_r1(d: Diagram, ci: int) -> Diagram:
    res = d.resolution
    a, c = d.under_in(ci), d.under_out(ci)
    oi, oo = res.over_in[ci], res.over_out[ci]
    if c == oi:          # loop leaves under, returns over
        joins = [(a, oo)]
    elif oo == a:        # loop leaves over, returns under
        joins = [(oi, c)]
    else:
        raise DiagramError(f"crossing {ci} is not a kink")
    return _rewire(d, {ci}, joins, drop_components=set())


def _find_r2(d: Diagram):
    res = d.resolution
    for face in d.faces:
        if len(face) != 2:
            continue
        (c1, k1), (c2, k2) = face
        if c1 == c2:
            continue
        a1 = d.crossings[c1][k1]
        a2 = d.crossings[c2][k2]
        occ1 = [k for _ci, k in d.occurrences[a1]]
        occ2 = [k for _ci, k in d.occurrences[a2]]
        over1 = all(k % 2 == 1 for k in occ1)
        over2 = all(k % 2 == 1 for k in occ2)
        under1 = all(k % 2 == 0 for k in occ1)
        under2 = all(k % 2 == 0 for k in occ2)
        if (over1 and under2) or (over2 and under1):
            return (c1, c2)
    _ = res
    return None


def _remove_r2(d: Diagram, c1: int, c2: int) -> Diagram:
    res = d.resolution
    joins = []
    for ci in (c1, c2):
        joins.append((d.under_in(ci), d.under_out(ci)))
        joins.append((res.over_in[ci], res.over_out[ci]))
    return _rewire(d, {c1, c2}, joins, drop_components=set())


def reduce_diagram(d: Diagram) -> Diagram:
    """Greedy R1/R2 simplification; sound for every invariant computed here."""
    while True:
        ci = _find_r1(d)
        if ci is not None:
            d = _remove_r1(d, ci)
            continue
        pair = _find_r2(d)
        if pair is not None:
            d = _remove_r2(d, *pair)
            continue
        return d


# ----- the skein engine ---------------------------------------------------------


def _is_split(d: Diagram) -> bool:
    free = sum(1 for comp in d.components if not comp)
    return len(d.pieces) + free >= 2


def _first_bad_crossing(d: Diagram):
    """First crossing, along the basepoint traversal, met on its under passage."""
    res = d.resolution
    seen = set()
    for comp in d.components:
        for arc in comp:
            ci, k = res.head[arc]
            if ci in seen:
                continue
            seen.add(ci)
            if k == 0:
                return ci
    return None


def _conway_rec(d: Diagram) -> ConwayPoly:
    d = reduce_diagram(d)
    if d.n_crossings == 0:
        return _ONE if d.n_components == 1 else _ZERO
    if _is_split(d):
        return _ZERO
    key = d.canonical_key()
    hit = _MEMO.get(key)
    if hit is not None:
        return hit
    pivot = _first_bad_crossing(d)
    if pivot is None:
        out = _ONE if d.n_components == 1 else _ZERO
    else:
        switched = _conway_rec(_switch_crossing(d, pivot))
        smoothed = _conway_rec(_smooth_crossing(d, pivot))
        if d.sign(pivot) > 0:
            out = switched + smoothed.shift()
        else:
            out = switched - smoothed.shift()
    _MEMO[key] = out
    return out


def conway(d: Diagram, cap: Optional[int] = None) -> ConwayPoly:
    """Conway polynomial of the diagram's link."""
    cap = DEFAULT_CROSSING_CAP if cap is None else cap
    if d.n_crossings > cap:
        raise CapExceeded(d.n_crossings, cap)
    if d.n_components == 0:
        raise DiagramError("empty link has no Conway polynomial")
    return _conway_rec(d)


# ----- Arf invariants ------------------------------------------------------------


def arf_knot(d: Diagram, cap: Optional[int] = None) -> int:
    """Arf invariant of a knot, as the mod-2 reduction of the z^2 coefficient."""
    if d.n_components != 1:
        raise DiagramError(f"arf_knot needs one component, got {d.n_components}")
    return conway(d, cap).coeff(2) % 2


def arf_link(d: Diagram, selector=None, cap: Optional[int] = None,
             plan=None) -> Optional[int]:
    """Arf invariant of a proper sublink, or None when the sublink is not proper.

    Computed by fusing the sublink's components into a knot with bands and
    taking the knot Arf; on proper links the result does not depend on the
    chosen spanning plan.
    """
    if selector is None:
        selector = SublinkSelector(tuple(range(1, d.n_components + 1)))
    sel = normalize_selector(selector)
    sel.check(d.n_components)
    if not is_proper(d, sel):
        return None
    sub = sublink(d, sel) if len(sel.indices) < d.n_components else d
    if sub.n_components == 1:
        return arf_knot(sub, cap)
    from .moves import fuse_to_knot  # moves depends only on diagram
    knot = fuse_to_knot(sub, plan)
    return arf_knot(knot, cap)


def reduced_arf(d: Diagram, selector=None, cap: Optional[int] = None) -> Optional[int]:
    """Arf of the sublink minus the sum of its component Arfs, mod 2.

    None when the sublink is not proper; identically 0 on single components.
    """
    if selector is None:
        selector = SublinkSelector(tuple(range(1, d.n_components + 1)))
    sel = normalize_selector(selector)
    total = arf_link(d, sel, cap)
    if total is None:
        return None
    for i in sel.indices:
        total += arf_link(d, [i], cap)
    return total % 2


def hosokawa_a2_check(d: Diagram, cap: Optional[int] = None) -> bool:
    """For a 3-component link: does a2 equal lk12*lk23 + lk23*lk31 + lk31*lk12?"""
    if d.n_components != 3:
        raise DiagramError(f"hosokawa_a2_check needs 3 components, got {d.n_components}")
    lk = linking_matrix(d)
    expect = int(lk[0, 1] * lk[1, 2] + lk[1, 2] * lk[2, 0] + lk[2, 0] * lk[0, 1])
    return conway(d, cap).coeff(2) == expect


# ----- aggregate profile ----------------------------------------------------------


@dataclass(frozen=True)
class InvariantProfile:
    """Everything the equivalence deciders quantify over."""

    lk: np.ndarray
    proper: dict = field(default_factory=dict)        # selector key -> bool
    arf: dict = field(default_factory=dict)           # selector key -> 0|1|None
    reduced: dict = field(default_factory=dict)
    conway: ConwayPoly = _ZERO
    mu: Optional[object] = None

    def to_json_dict(self) -> dict:
        out = {
            "lk": self.lk.tolist(),
            "proper": dict(self.proper),
            "arf": dict(self.arf),
            "reduced_arf": dict(self.reduced),
            "conway": list(self.conway.coeffs),
        }
        if self.mu is not None:
            out["mu123"] = self.mu.to_json_dict()["mu123"]
        return out


def all_selectors(n: int):
    for p in range(1, n + 1):
        for idx in itertools.combinations(range(1, n + 1), p):
            yield SublinkSelector(idx)


def invariant_profile(d: Diagram, cap: Optional[int] = None,
                      with_mu: bool = True) -> InvariantProfile:
    """Linking matrix, properness flags, Arf tables and mu-bar data."""
    lk = linking_matrix(d)
    proper: dict = {}
    arf: dict = {}
    red: dict = {}
    for sel in all_selectors(d.n_components):
        key = sel.key()
        proper[key] = is_proper(d, sel)
        try:
            arf[key] = arf_link(d, sel, cap)
            red[key] = reduced_arf(d, sel, cap)
        except CapExceeded as e:
            raise CapExceeded(e.count, e.cap, f"sublink {key}") from None
    mu = None
    if with_mu:
        from .milnor import mu_bar
        mu = mu_bar(d)
    return InvariantProfile(lk, proper, arf, red, conway(d, cap), mu)
