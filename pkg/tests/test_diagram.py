"""Diagram model: parsing, validation, canonical form, whole-diagram ops."""

import pytest
from hypothesis import given, settings, strategies as st

from linkmoves import (Diagram, DiagramError, disjoint_union, mirror_reverse,
                       parse, sublink)
from linkmoves.catalog import get
from linkmoves.invariants import conway, linking_matrix
from linkmoves.moves import random_move_sequence

HOPF_TEXT = "components: [[1,2],[3,4]]\nX(1,3,2,4)\nX(3,1,4,2)\n"


def test_parse_hopf_signs():
    d = parse(HOPF_TEXT)
    assert d.n_crossings == 2 and d.n_components == 2
    assert d.signs == (1, 1)


def test_parse_unknot_free_circle():
    d = parse("components: [O]\n")
    assert d.n_crossings == 0 and d.n_components == 1
    assert d.components == ((),)


def test_parse_json_mirror():
    d = parse('{"components":[[1,2],[3,4]],"crossings":[[1,3,2,4],[3,1,4,2]]}')
    assert d.signs == (1, 1)
    assert parse(d.to_json()).canonical_key() == d.canonical_key()


def test_parse_arc_appearing_three_times_rejected():
    bad = "components: [[1,2],[3,4]]\nX(1,3,1,4)\nX(3,1,4,2)\n"
    with pytest.raises(DiagramError):
        parse(bad)


def test_parse_orientation_flip_rejected():
    # swapping the under slots breaks the component cycle consistency
    bad = "components: [[1,2],[3,4]]\nX(2,3,1,4)\nX(3,1,4,2)\n"
    with pytest.raises(DiagramError):
        parse(bad)


def test_parse_syntax_error_reports_line():
    with pytest.raises(DiagramError, match="line 2"):
        parse("components: [[1,2]]\nX(1,2\n")


def test_validate_euler_counts():
    d = parse(HOPF_TEXT)
    d.validate()
    assert d.n_crossings == 2
    assert len(d.arcs) == 4
    assert len(d.faces) == 4  # V - E + F = 2 - 4 + 4 = 2


def test_nonplanar_code_rejected():
    # a component cycle inconsistent with any planar embedding
    bad = Diagram([(1, 3, 2, 4), (2, 4, 1, 3)], [(1, 2), (3, 4)])
    with pytest.raises(DiagramError):
        bad.validate()


def test_serialize_roundtrip_catalog():
    for name in ("hopf_plus", "trefoil", "figure8", "whitehead", "borromean",
                 "torus_2_4", "chain_3", "unknot", "unlink_3"):
        d = get(name).diagram
        again = parse(d.to_text())
        assert again.canonical_key() == d.canonical_key()
        again = parse(d.to_json())
        assert again.canonical_key() == d.canonical_key()


def test_sublink_identity_and_hopf():
    hopf = parse(HOPF_TEXT)
    assert sublink(hopf, [1, 2]).canonical_key() == hopf.canonical_key()
    u = sublink(hopf, [1])
    assert u.n_components == 1 and u.n_crossings == 0


def test_sublink_borromean_pair_unlinks():
    bor = get("borromean").diagram
    pair = sublink(bor, [1, 2])
    assert pair.n_components == 2
    assert linking_matrix(pair).tolist() == [[0, 0], [0, 0]]
    assert conway(pair).is_zero()


def test_sublink_composition():
    bor = get("borromean").diagram
    # selecting {1,3} then {2} inside it equals selecting {3} directly
    a = sublink(sublink(bor, [1, 3]), [2])
    b = sublink(bor, [3])
    assert a.canonical_key() == b.canonical_key()


def test_mirror_reverse_negates_lk_and_is_involution():
    for name in ("hopf_plus", "whitehead", "torus_2_4", "chain_3"):
        d = get(name).diagram
        m = mirror_reverse(d)
        assert (linking_matrix(m) == -linking_matrix(d)).all()
        assert mirror_reverse(m).canonical_key() == d.canonical_key()


def test_disjoint_union_blocks():
    hopf = parse(HOPF_TEXT)
    u = get("unknot").diagram
    d = disjoint_union(hopf, u)
    d.validate()
    assert d.n_components == 3
    lk = linking_matrix(d)
    assert lk.tolist() == [[0, 1, 0], [1, 0, 0], [0, 0, 0]]
    assert conway(d).is_zero()


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_roundtrip_on_randomly_moved_diagrams(seed):
    base = get("trefoil").diagram if seed % 2 else get("whitehead").diagram
    seq = random_move_sequence(base, {"r1", "r2"}, False, 3, seed)
    d = seq[-1][1] if seq else base
    d.validate()
    again = parse(d.to_text())
    assert again.canonical_key() == d.canonical_key()
    pieces_faces = len(d.faces)
    assert d.n_crossings - len(d.arcs) + pieces_faces == 2 * (len(d.pieces) or 1)
