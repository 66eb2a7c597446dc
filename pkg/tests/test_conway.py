"""Skein engine: axioms, catalog values, invariance, and an independent
Alexander-polynomial oracle via Fox calculus on the Wirtinger presentation."""

import sympy as sp

from linkmoves import conway, disjoint_union, parse
from linkmoves.catalog import get
from linkmoves.invariants import ConwayPoly, clear_cache
from linkmoves.milnor import wirtinger
from linkmoves.moves import random_move_sequence


def test_axiom_unknot_and_split():
    assert conway(get("unknot").diagram).coeffs == (1,)
    assert conway(get("unlink_2").diagram).is_zero()
    u = get("unknot").diagram
    assert conway(disjoint_union(get("trefoil").diagram, u)).is_zero()


def test_hopf_skein_triple():
    # L+ = positive Hopf, L- = its crossing-switched unlink, L0 = unknot:
    # conway(L+) - conway(L-) = z * conway(L0)
    lplus = conway(get("hopf_plus").diagram)
    lminus = ConwayPoly(())  # 2-component unlink
    lzero = ConwayPoly((1,))
    assert (lplus - lminus).coeffs == lzero.shift().coeffs


def test_catalog_values():
    expected = {
        "unknot": (1,),
        "hopf_plus": (0, 1),
        "hopf_minus": (0, -1),
        "trefoil": (1, 0, 1),
        "figure8": (1, 0, -1),
        "torus_2_4": (0, 2, 0, 1),
        "whitehead": (0, 0, 0, -1),
        "borromean": (0, 0, 0, 0, 1),
        "chain_3": (0, 0, 1),
    }
    for name, coeffs in expected.items():
        assert conway(get(name).diagram).coeffs == coeffs, name


def test_coefficient_parity():
    # a_i = 0 unless i = (#components - 1) mod 2
    for name in ("trefoil", "figure8", "hopf_plus", "torus_2_4", "whitehead",
                 "borromean", "chain_3"):
        d = get(name).diagram
        c = conway(d)
        for i, a in enumerate(c.coeffs):
            if (i - (d.n_components - 1)) % 2 and a:
                raise AssertionError(f"{name}: a_{i} = {a} violates parity")


def test_memo_reuse_is_consistent():
    clear_cache()
    a = conway(get("whitehead").diagram).coeffs
    b = conway(get("whitehead").diagram).coeffs
    assert a == b == (0, 0, 0, -1)


def test_reidemeister_invariance_sample():
    for seed in range(12):
        base = get(("trefoil", "whitehead", "borromean")[seed % 3]).diagram
        want = conway(base).coeffs
        for _site, moved in random_move_sequence(base, {"r1", "r2", "r3"},
                                                 False, 3, seed):
            assert conway(moved).coeffs == want


# ----- independent oracle: Fox calculus Alexander polynomial -------------------


def _fox_alexander_knot(d):
    """Alexander polynomial of a knot from its Wirtinger presentation,
    independent of the skein engine."""
    t = sp.symbols("t")
    wd = wirtinger(d)
    gens = list(wd.generators)
    col = {g: i for i, g in enumerate(gens)}
    rows = []
    for out, over, inn, s in wd.relations:
        # relator: over^s * in * over^{-s} * out^{-1}
        word = [(over, s), (inn, 1), (over, -s), (out, -1)]
        deriv = [sp.Integer(0)] * len(gens)
        prefix = sp.Integer(1)
        for g, e in word:
            if e == 1:
                deriv[col[g]] += prefix
                prefix *= t
            else:
                prefix *= t ** -1
                deriv[col[g]] -= prefix
        rows.append(deriv)
    m = sp.Matrix(rows)
    m.col_del(0)
    m.row_del(0)
    poly = sp.expand(m.det())
    return poly


def _normalize_laurent(poly, t):
    poly = sp.expand(poly)
    if poly == 0:
        return sp.Integer(0)
    p = sp.Poly(sp.together(poly * t ** 20).simplify(), t)
    coeffs = p.all_coeffs()
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if coeffs and coeffs[0] < 0:
        coeffs = [-c for c in coeffs]
    return tuple(coeffs)


def test_conway_against_fox_calculus():
    t = sp.symbols("t")
    z = sp.sqrt(t) - 1 / sp.sqrt(t)
    for name in ("trefoil", "figure8"):
        d = get(name).diagram
        nabla = conway(d)
        from_skein = sum(a * z ** i for i, a in enumerate(nabla.coeffs))
        from_fox = _fox_alexander_knot(d)
        assert _normalize_laurent(sp.expand(from_skein), t) == \
            _normalize_laurent(from_fox, t), name


def test_conway_against_fox_on_fused_links():
    # fuse proper links to knots and compare both routes there as well
    from linkmoves.moves import fuse_to_knot
    t = sp.symbols("t")
    z = sp.sqrt(t) - 1 / sp.sqrt(t)
    for name in ("torus_2_4", "whitehead"):
        k = fuse_to_knot(get(name).diagram)
        nabla = conway(k)
        from_skein = sum(a * z ** i for i, a in enumerate(nabla.coeffs))
        from_fox = _fox_alexander_knot(k)
        assert _normalize_laurent(sp.expand(from_skein), t) == \
            _normalize_laurent(from_fox, t), name
