import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tamechar import catalog
from tamechar.abelian import identity, matmul, rational_rank
from tamechar.errors import ValidationError
from tamechar.local_field import TameTower
from tamechar.root_data import GaloisRootDatum, RootDatum, fi_by_unitary_rule, levi_closure_check, mat_key

TYPES = {"A1": (2, 2), "A2": (6, 6), "A3": (12, 24), "C2": (8, 8), "B2": (8, 8), "G2": (12, 12)}


def test_root_and_weyl_counts():
    for typ, (n_roots, n_weyl) in TYPES.items():
        for lat in ("sc", "ad"):
            rd = RootDatum.of_type(typ, lat)
            assert len(rd.roots) == n_roots
            assert len(rd.weyl_group) == n_weyl
            assert len(rd.positive) * 2 == n_roots


def test_gl_root_datum():
    rd = RootDatum.gl(3)
    assert len(rd.roots) == 6 and len(rd.weyl_group) == 6
    assert rd.central_cocharacter_rank() == 1


@given(st.sampled_from(sorted(TYPES)), st.sampled_from(["sc", "ad"]))
def test_roots_pair_to_two_with_their_coroots(typ, lat):
    rd = RootDatum.of_type(typ, lat)
    for r, c in zip(rd.roots, rd.coroots):
        assert sum(a * b for a, b in zip(r, c)) == 2


@given(st.sampled_from(sorted(TYPES)), st.data())
def test_weyl_group_preserves_roots_and_is_closed(typ, data):
    rd = RootDatum.of_type(typ)
    W = {mat_key(w) for w in rd.weyl_group}
    w1 = data.draw(st.sampled_from(rd.weyl_group))
    w2 = data.draw(st.sampled_from(rd.weyl_group))
    assert rd.preserves_roots(w1)
    assert mat_key(matmul(w1, w2)) in W
    for i in range(len(rd.roots)):
        s = rd.reflection(i)
        assert mat_key(matmul(s, s)) == mat_key(identity(rd.rank))


@given(st.sampled_from(sorted(TYPES)), st.data())
def test_levi_closure_of_spans(typ, data):
    """R intersected with the span of any subset is closed; proper subsets of it generally are not."""
    rd = RootDatum.of_type(typ)
    picks = data.draw(st.lists(st.sampled_from(rd.roots), min_size=1, max_size=3))
    rank = rational_rank(picks)
    closure = [r for r in rd.roots if rational_rank(picks + [r]) == rank]
    assert levi_closure_check(rd, closure)
    if len(closure) > len(set(map(tuple, picks))):
        assert not levi_closure_check(rd, picks)


def test_levi_closure_examples():
    rd = RootDatum.of_type("C2")
    assert levi_closure_check(rd, [])
    assert levi_closure_check(rd, rd.roots)
    a = rd.roots[0]
    assert levi_closure_check(rd, [a, tuple(-x for x in a)])
    # two orthogonal root lines span the plane but miss the other roots
    b = next(r for r, c in zip(rd.roots, rd.coroots)
             if sum(x * y for x, y in zip(a, c)) == 0 and sum(x * y for x, y in zip(r, rd.coroot(a))) == 0)
    pair = [a, tuple(-x for x in a), b, tuple(-x for x in b)]
    assert not levi_closure_check(rd, pair)


def test_galois_root_datum_validation():
    rd = RootDatum.of_type("A1")
    T = TameTower(3, 1, 2, 2)
    with pytest.raises(ValidationError):
        GaloisRootDatum(rd, T, phi=[[2]])
    with pytest.raises(ValidationError):
        GaloisRootDatum(rd, TameTower(3, 1, 3, 2), phi=[[-1]])
    GaloisRootDatum(rd, T, phi=[[-1]])


def test_root_orbit_kinds():
    S = catalog.sl2_unramified(3, 2)
    info = S.grd.info(S.grd.rd.roots[0])
    assert info.symmetric and not info.ramified
    S = catalog.sl2_ramified(3, 3)
    info = S.grd.info(S.grd.rd.roots[0])
    assert info.symmetric and info.ramified
    S = catalog.gl_induced(3, 1, 2, 2)
    info = S.grd.info(S.grd.rd.roots[0])
    assert info.symmetric


def test_unitary_rule_signs():
    """-1 exactly on symmetric roots of an A_2n component moved by inertia stabilizers."""
    rd = RootDatum.of_type("A2")
    grd = GaloisRootDatum(rd, TameTower(3, 1, 2, 2), phi=[[-1, 0], [0, -1]])
    fi = fi_by_unitary_rule(grd)
    assert fi and set(fi.values()) <= {1, -1}
    grd1 = catalog.sl2_unramified(3, 2).grd
    assert set(fi_by_unitary_rule(grd1).values()) == {1}


def test_elliptic_detection():
    assert catalog.sl2_unramified(3, 2).grd.is_elliptic()
    assert catalog.gl_induced(3, 1, 2, 2).grd.is_elliptic()  # anisotropic modulo the centre
    rd = RootDatum.of_type("A1")
    split = GaloisRootDatum(rd, TameTower(3, 1, 1, 2))
    assert not split.is_elliptic()


def test_elliptic_unramified_elements():
    rd = RootDatum.of_type("A2")
    ell = catalog.elliptic_unramified_elements(rd)
    assert len(ell) == 2  # the two Coxeter elements
    rng = random.Random(0)
    w = rng.choice(ell)
    assert catalog.matrix_order(w) == 3
