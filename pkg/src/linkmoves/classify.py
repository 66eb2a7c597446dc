"""Deciders for self pass-equivalence and self sharp-equivalence.

Two ordered links are self pass-equivalent exactly when they are
link-homotopic and every pair of same-index proper sublinks has equal Arf;
for self sharp-equivalence, equal reduced Arf.  Both deciders report a
witness for every Distinct verdict and record how link-homotopy was
established.  ``theorem12_check`` verifies the mod-2 congruence that the sum
of reduced Arf invariants (full link plus all two-component sublinks)
satisfies across a link-homotopy of Z2-algebraically split links.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .diagram import Diagram, DiagramError, SublinkSelector
from .invariants import all_selectors, arf_link, is_proper, is_z2_split, reduced_arf
from .milnor import link_homotopy_verdict


@dataclass(frozen=True)
class Witness:
    invariant: str            # "arf" | "reduced_arf" | "lk" | "mu123"
    sublink: str              # comma-joined 1-based indices
    left: object
    right: object

    def to_json_dict(self) -> dict:
        return {"invariant": self.invariant, "sublink": self.sublink,
                "left": self.left, "right": self.right}


@dataclass(frozen=True)
class Verdict:
    outcome: str                       # "equivalent" | "distinct" | "inconclusive"
    witness: Optional[Witness] = None  # always present on "distinct"
    link_homotopy: str = "decided"     # "decided" | "assumed" | "inconclusive"
    reason: Optional[str] = None

    def to_json_dict(self) -> dict:
        out = {"outcome": self.outcome, "link_homotopy": self.link_homotopy}
        if self.witness is not None:
            out["witness"] = self.witness.to_json_dict()
        if self.reason:
            out["reason"] = self.reason
        return out

    @property
    def exit_code(self) -> int:
        return {"equivalent": 0, "distinct": 1, "inconclusive": 2}[self.outcome]


def _homotopy_evidence(d1, d2, assume_homotopic):
    """(state, optional witness): state "decided" means homotopic."""
    if assume_homotopic:
        return "assumed", None
    v = link_homotopy_verdict(d1, d2)
    if v.outcome == "homotopic":
        return "decided", None
    if v.outcome == "distinct":
        inv, idx, a, b = v.witness
        return "distinct", Witness(inv, ",".join(str(i) for i in idx), a, b)
    return "inconclusive", None


def _lk_parity_witness(d1, d2):
    from .invariants import linking_matrix
    l1, l2 = linking_matrix(d1), linking_matrix(d2)
    n = d1.n_components
    for i in range(n):
        for j in range(i + 1, n):
            if int(l1[i, j]) % 2 != int(l2[i, j]) % 2:
                return Witness("lk", f"{i + 1},{j + 1}", int(l1[i, j]), int(l2[i, j]))
    raise DiagramError("properness patterns differ but all lk parities agree")


def _table_verdict(d1, d2, assume_homotopic, value, invariant_name, cap,
                   skip_singletons):
    if d1.n_components != d2.n_components:
        raise DiagramError("links must have equal component counts")
    if d1.canonical_key() == d2.canonical_key():
        return Verdict("equivalent", link_homotopy="decided")
    lh, lh_witness = _homotopy_evidence(d1, d2, assume_homotopic)
    if lh == "distinct":
        return Verdict("distinct", lh_witness, "decided")
    for sel in all_selectors(d1.n_components):
        if skip_singletons and len(sel.indices) == 1:
            continue
        p1, p2 = is_proper(d1, sel), is_proper(d2, sel)
        if p1 != p2:
            return Verdict("distinct", _lk_parity_witness(d1, d2), lh)
        if not p1:
            continue
        v1 = value(d1, sel, cap)
        v2 = value(d2, sel, cap)
        if v1 != v2:
            return Verdict("distinct", Witness(invariant_name, sel.key(), v1, v2), lh)
    if lh in ("decided", "assumed"):
        return Verdict("equivalent", link_homotopy=lh)
    return Verdict("inconclusive", link_homotopy=lh,
                   reason="link-homotopy undecided for four or more components")


def self_pass_verdict(d1: Diagram, d2: Diagram, assume_homotopic: bool = False,
                      cap: Optional[int] = None) -> Verdict:
    """Decide self pass-equivalence via link-homotopy plus Arf on every
    matching proper sublink."""
    return _table_verdict(d1, d2, assume_homotopic, arf_link, "arf", cap,
                          skip_singletons=False)


def self_sharp_verdict(d1: Diagram, d2: Diagram, assume_homotopic: bool = False,
                       cap: Optional[int] = None) -> Verdict:
    """Decide self sharp-equivalence via link-homotopy plus reduced Arf on
    every matching proper sublink (single components are identically zero)."""
    return _table_verdict(d1, d2, assume_homotopic, reduced_arf, "reduced_arf",
                          cap, skip_singletons=True)


def theorem12_checksum(d: Diagram, cap: Optional[int] = None) -> int:
    """reduced_arf(full link) + sum over i<j of reduced_arf(k_i u k_j), mod 2."""
    if not is_z2_split(d):
        raise DiagramError("link is not Z2-algebraically split")
    n = d.n_components
    total = reduced_arf(d, tuple(range(1, n + 1)), cap) if n > 1 else 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            total += reduced_arf(d, (i, j), cap)
    return total % 2


def theorem12_check(d1: Diagram, d2: Diagram, assume_homotopic: bool = False,
                    cap: Optional[int] = None) -> bool:
    """Check the reduced-Arf congruence across a link-homotopic pair of
    Z2-algebraically split links.

    Refuses (raises) unless both links are Z2-algebraically split and
    link-homotopy is either decided internally or asserted by the caller.
    """
    if d1.n_components != d2.n_components:
        raise DiagramError("links must have equal component counts")
    if not is_z2_split(d1) or not is_z2_split(d2):
        raise DiagramError("theorem12_check needs Z2-algebraically split links")
    if not assume_homotopic:
        v = link_homotopy_verdict(d1, d2)
        if v.outcome != "homotopic":
            raise DiagramError(
                f"links are not known to be link-homotopic ({v.outcome}); "
                "pass assume_homotopic=True to assert it")
    return theorem12_checksum(d1, cap) == theorem12_checksum(d2, cap)
