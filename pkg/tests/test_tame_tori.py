import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tamechar import catalog
from tamechar.abelian import subgroup_order
from tamechar.characters import rational_weyl_group
from tamechar.errors import TruncationError, ValidationError
from tamechar.tori import reduction_iso_check

TORI = {
    "sl2-unram-3": lambda: catalog.sl2_unramified(3, 3),
    "sl2-unram-5": lambda: catalog.sl2_unramified(5, 3),
    "sl2-ram-5": lambda: catalog.sl2_ramified(5, 4),
    "gl2-unram-3": lambda: catalog.gl_induced(3, 1, 2, 3),
    "gl2-ram-5": lambda: catalog.gl_induced(5, 2, 1, 3),
    "gl3-ram-7": lambda: catalog.gl_induced(7, 3, 1, 3),
    "sp4-cox-5": lambda: catalog.sp4_unramified(5, 3, "coxeter"),
    "sp4-ram-5": lambda: catalog.sp4_ramified(5, 4),
}
_cache = {}


def torus(name):
    if name not in _cache:
        _cache[name] = TORI[name]()
    return _cache[name]


names = st.sampled_from(sorted(TORI))


def test_tame_group_orders():
    """Finite parts of S(F)/S(F)_0+ against the residue-field counts."""
    assert torus("sl2-unram-3").tame.orders == (4,)  # norm-one elements of F_9
    assert torus("sl2-unram-5").tame.orders == (6,)
    assert torus("sl2-ram-5").tame.orders == (2,)  # +-1
    assert sorted(torus("gl2-unram-3").tame.orders) == [0, 8]  # F_9^x and u^Z
    assert torus("sp4-cox-5").tame.orders == (26,)  # q^2 + 1


def test_wild_dimensions():
    S = torus("sl2-unram-3")
    assert {k: W.dim for k, W in S.wild.items()} == {1: 1, 2: 1}
    S = torus("sl2-ram-5")
    assert sorted(S.wild) == [1, 3]  # odd levels only
    S = torus("gl2-unram-3")
    assert {k: W.dim for k, W in S.wild.items()} == {1: 2, 2: 2}


@given(names, st.integers(0, 10**6))
def test_characters_are_homomorphisms(name, seed):
    S = torus(name)
    rng = random.Random(seed)
    th = S.random_character(rng)
    g, h = S.random_point(rng, lam_range=2), S.random_point(rng, lam_range=2)
    assert th(g * h) == th(g) * th(h)
    assert th(g.inverse()) == th(g).inverse()
    eta = S.random_character(rng)
    assert (th * eta)(g) == th(g) * eta(g)
    assert th.inverse()(g) == th(g).inverse()


@given(names, st.integers(0, 10**6))
def test_points_are_rational(name, seed):
    S = torus(name)
    rng = random.Random(seed)
    g = S.random_point(rng, lam_range=1)
    assert g.is_rational()
    low, high = g.split_at(2)
    assert low * high == g


@given(names, st.integers(0, 10**6))
def test_weyl_conjugate_character(name, seed):
    S = torus(name)
    rng = random.Random(seed)
    th = S.random_character(rng)
    W = rational_weyl_group(S)
    w = rng.choice(W)
    g = S.random_point(rng)
    assert g.weyl(w).is_rational()
    assert th.weyl_conjugate(w)(g) == th(g.weyl(w))


@given(names, st.integers(0, 10**6))
def test_depth_of_character(name, seed):
    S = torus(name)
    rng = random.Random(seed)
    th = S.random_character(rng)
    k = th.depth_level
    for lvl in S.wild:
        pt = S.point([0] * S.n, [0] * S.n, {lvl: S.wild[lvl].basis[0]})
        if lvl > k:
            assert th(pt) == th(S.identity_point())


def test_field_points_and_norms():
    S = torus("gl2-unram-3")
    T = S.tower
    G = T.galois_group
    x = T.elt({0: T.k.exp(1), 1: 1})
    pt = S.point_from_field([x.galois(g) for g in G])
    assert pt.is_rational()
    with pytest.raises(ValidationError):
        S.point_from_field([x, x.galois(T.phi).galois(T.phi) * T.u(1)])


def test_filtration_and_window():
    S = torus("sl2-ram-5")
    assert S.jumps() == [Fraction(1, 2), Fraction(3, 2)]
    assert S.mp_filtration(Fraction(1, 2))[1] == [1, 3]
    assert S.mp_filtration(1)[1] == [3]
    with pytest.raises(TruncationError):
        S.mp_filtration(3)


def test_reduction_isomorphism():
    for name in TORI:
        assert reduction_iso_check(torus(name)), name


def test_character_validation():
    S = torus("sl2-unram-3")
    with pytest.raises(ValidationError):
        S.character([Fraction(1, 3)])  # not a 4th root of unity
    with pytest.raises(ValidationError):
        S.character([0, 0])
    assert subgroup_order(S.tame_zero) == 4
