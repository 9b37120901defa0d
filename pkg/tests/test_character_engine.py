import cmath
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tamechar import catalog
from tamechar.characters import (
    REAL_CONFIGS,
    RealConfig,
    char_depth_zero,
    char_real_compare,
    char_shallow,
    char_shallow_via_signs,
    dze_check,
    is_shallow,
    maximally_unramified_elliptic_tori,
    rational_weyl_group,
    real_character_values,
    shallow_data,
    shallow_elements,
    weyl_invariant_character,
)
from tamechar.errors import ValidationError
from tamechar.factor_calculus import is_regular
from tamechar.pairs import classify_pair
from tamechar.root_data import GaloisRootDatum, RootDatum

TORI = {
    "sl2-unram-5": lambda: catalog.sl2_unramified(5, 3),
    "sl2-unram-7": lambda: catalog.sl2_unramified(7, 2),
    "sp4-5": lambda: catalog.sp4_unramified(5, 3),
    "sp4-cox-3": lambda: catalog.sp4_unramified(3, 3, "coxeter"),
    "gl2-unram-5": lambda: catalog.gl_induced(5, 1, 2, 3),
    "gl3-unram-7": lambda: catalog.gl_induced(7, 1, 3, 2),
    "gl2-ram-3": lambda: catalog.gl_induced(3, 2, 1, 3),
}
_cache = {}


def torus(name):
    if name not in _cache:
        S = TORI[name]()
        _cache[name] = (S, shallow_elements(S, limit=40, lam_range=1), rational_weyl_group(S))
    return _cache[name]


def _valid_pair(S, rng, depth_level=None):
    for _ in range(30):
        th = S.random_character(rng, depth_level=depth_level)
        if classify_pair(S, th).verdict == "not-a-valid-pair":
            continue
        try:
            return th, shallow_data(S, th)
        except ValidationError:
            continue
    return None


@pytest.mark.parametrize("name", sorted(TORI))
def test_shallow_elements_are_regular_and_shallow(name):
    S, els, _ = torus(name)
    assert els
    assert all(is_regular(g) and is_shallow(g) for g in els)


def test_epsilon_product_on_the_torus_catalogue():
    tori = list(maximally_unramified_elliptic_tori())
    assert len(tori) >= 100
    for name, grd in tori[::7]:
        assert dze_check(grd, name=name).ok, name


def test_epsilon_product_sl2_unramified_by_hand():
    """Anisotropic SL2: r_S = 0, r_T = 1, so the product is -1."""
    S = catalog.sl2_unramified(3, 2)
    res = dze_check(S.grd)
    assert (res.r_S, res.r_T) == (0, 1)
    assert str(res.lhs) == "-1" and str(res.rhs) == "-1"
    assert res.line() == "LHS=-1 RHS=-1 OK"


def test_dze_rejects_split_torus():
    from tamechar.local_field import TameTower

    grd = GaloisRootDatum(RootDatum.of_type("A1"), TameTower(5, 1, 1, 2), None, None, {})
    with pytest.raises(ValidationError):
        dze_check(grd)


@given(st.sampled_from(sorted(TORI)), st.integers(0, 10**6))
def test_weyl_invariance_and_twist(name, seed):
    S, els, W = torus(name)
    rng = random.Random(seed)
    pair = _valid_pair(S, rng)
    if pair is None:
        return
    th, data = pair
    delta = weyl_invariant_character(S, rng)
    data2 = shallow_data(S, th * delta)
    for g in rng.sample(els, min(3, len(els))):
        row = char_shallow(S, th, g, data=data)
        assert char_shallow(S, th, g.weyl(rng.choice(W)), data=data).total == row.total
        assert char_shallow(S, th * delta, g, data=data2).total == row.total * delta(g).as_cyc()
        if data.toral:
            assert char_shallow_via_signs(S, th, g, data=data) == row.total


@given(st.sampled_from(sorted(TORI)), st.integers(0, 10**6))
def test_depth_zero_agreement(name, seed):
    S, els, _ = torus(name)
    rng = random.Random(seed)
    pair = _valid_pair(S, rng, depth_level=0)
    if pair is None:
        return
    th, data = pair
    for g in rng.sample(els, min(3, len(els))):
        assert char_depth_zero(S, th, g) == char_shallow(S, th, g, data=data).total


def test_char_shallow_rejects_deep_elements():
    S, _, _ = torus("sl2-unram-5")
    rng = random.Random(1)
    th, data = _valid_pair(S, rng)
    g = S.random_point(rng)
    while not g.wild:
        g = S.random_point(rng)
    if not is_shallow(g, data.toral):
        with pytest.raises(ValidationError):
            char_shallow(S, th, g, data=data)


@pytest.mark.parametrize("key", sorted(REAL_CONFIGS))
def test_real_comparison(key):
    assert char_real_compare(REAL_CONFIGS[key], samples=100, seed=0) < 1e-9


@given(st.integers(1, 8), st.floats(0.05, math.pi - 0.05))
def test_compact_sl2_matches_weyl_character_formula(n, t):
    """On SU(2) the value is sin((n+1)t) / sin(t)."""
    a, b = real_character_values(RealConfig("SU(2)", "A1", "sc", (n,)), [t])
    expected = math.sin((n + 1) * t) / math.sin(t)
    assert abs(a - expected) < 1e-9 and abs(b - expected) < 1e-9


@given(st.integers(1, 8), st.floats(0.05, math.pi - 0.05))
def test_sl2r_discrete_series_value(n, t):
    """On the compact torus of SL2(R): -e^{i(n+1)t} / (2i sin t)."""
    a, b = real_character_values(RealConfig("SL2(R)", "A1", "sc", (n,), ((2,),)), [t])
    expected = -cmath.exp(1j * (n + 1) * t) / (2j * math.sin(t))
    assert abs(a - expected) < 1e-9 and abs(b - expected) < 1e-9


def test_real_rejects_root_hyperplane():
    with pytest.raises(ValidationError):
        real_character_values(REAL_CONFIGS["su2"], [0.0])
