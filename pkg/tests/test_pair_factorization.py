import random
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from tamechar import catalog
from tamechar.pairs import (
    GLNAdmissibilityOracle,
    classify_pair,
    gln_equivalence,
    howe_factorize,
    refactorization_check,
    root_filtration,
    tower_is_valid,
)
from tamechar.root_data import levi_closure_check

TORI = {
    "gl2-unram": lambda: catalog.gl_induced(3, 1, 2, 3),
    "gl2-ram": lambda: catalog.gl_induced(5, 2, 1, 3),
    "gl3-ram": lambda: catalog.gl_induced(7, 3, 1, 3),
    "gl3-unram": lambda: catalog.gl_induced(5, 1, 3, 3),
    "sp4-minus-one": lambda: catalog.sp4_unramified(3, 3),
    "sp4-coxeter": lambda: catalog.sp4_unramified(3, 3, "coxeter"),
    "sp4-ram": lambda: catalog.sp4_ramified(3, 3),
    "sl2-unram": lambda: catalog.sl2_unramified(3, 3),
}
_cache = {}


def torus(name):
    if name not in _cache:
        _cache[name] = TORI[name]()
    return _cache[name]


names = st.sampled_from(sorted(TORI))


@given(names, st.integers(0, 10**6))
def test_howe_factorization_properties(name, seed):
    S = torus(name)
    rng = random.Random(seed)
    th = S.random_character(rng)
    a = howe_factorize(S, th, seed=rng.randrange(1000))
    b = howe_factorize(S, th, seed=rng.randrange(1000))
    assert a.product() == th
    assert tower_is_valid(S, th, a) and tower_is_valid(S, th, b)
    assert refactorization_check(S, a, b)
    assert [r for r in a.depths[:a.d] if r > 0] == root_filtration(S, th).breaks
    assert all(x < y for x, y in zip(a.depths[:a.d], a.depths[1:a.d]))
    for inner, outer in zip(a.levis, a.levis[1:]):
        assert set(inner) <= set(outer)


@given(names, st.integers(0, 10**6))
def test_root_filtration_is_levi(name, seed):
    S = torus(name)
    rng = random.Random(seed)
    th = S.random_character(rng)
    rf = root_filtration(S, th)
    for k in range(S.tower.N + 1):
        r = Fraction(k, S.tower.e)
        assert levi_closure_check(S.grd.rd, rf.R_plus(r))
        assert set(rf.R(r)) <= set(rf.R_plus(r))


def test_trivial_character_factorizes_trivially():
    S = torus("gl2-unram")
    th = S.trivial_character()
    tw = howe_factorize(S, th)
    assert tw.product() == th
    assert tw.d == 0


def test_refactorization_rejects_different_towers():
    S = torus("gl2-unram")
    rng = random.Random(3)
    th1 = th2 = None
    while th1 is None or th2 is None:
        th = S.random_character(rng)
        tw = howe_factorize(S, th)
        if tw.d == 1 and th1 is None:
            th1 = tw
        elif tw.d == 0 and th2 is None:
            th2 = tw
    assert not refactorization_check(S, th1, th2)


def test_classifier_on_depth_one_gl2():
    S = torus("gl2-unram")
    th = S.character(["3/4", "1/2"], {1: [0, 1]})
    rep = classify_pair(S, th)
    assert rep.verdict == "extra-regular"
    assert rep.breaks == [1]
    assert rep.elliptic


def test_classifier_rejects_trivial_character():
    S = torus("sl2-unram")
    rep = classify_pair(S, S.trivial_character())
    assert rep.verdict == "not-a-valid-pair"
    assert rep.reasons


def test_gln_equivalence_small_shapes():
    for args in ((3, 2, 1), (5, 2, 1)):
        rep = gln_equivalence(*args)
        assert rep.ok
        assert 0 < rep.regular < rep.total


def test_gln_oracle_on_a_single_character():
    S = torus("gl2-ram")
    T = S.tower
    orc = GLNAdmissibilityOracle(T, T.N)
    G = T.galois_group
    th = S.character([Fraction(1, 2), 0], {})
    verdict = orc.verdict(lambda x: th.exponent(S.point_from_field([x.galois(g) for g in G])))
    assert (verdict == "admissible") == (classify_pair(S, th).verdict != "not-a-valid-pair")
