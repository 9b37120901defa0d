import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tamechar import catalog
from tamechar.cyclotomic import RootOfUnity
from tamechar.errors import ValidationError
from tamechar.factor_calculus import (
    cross_identity,
    eps_L_product,
    is_regular,
    kappa,
    langlands_constant,
    lift_independence,
    mod_a_from_theta,
    ord_x,
    ordx_sl2_oracle,
    random_a_data,
    random_b_data,
    random_chi_data,
    random_zeta_data,
    rescaling_identity,
    root_fields,
    sign_e_tilde,
    sign_eps_fr,
    sign_eps_r,
    sl2_realization_info,
    split_identity,
    standard_sl2_realizations,
    toral_depth,
    valuation_split_ok,
    weil_constant,
    zeta_identity,
)
from tamechar.finite_field import GF
from tamechar.local_field import TameTower

TORI = {
    "sl2-ram-5": lambda: catalog.sl2_ramified(5, 4),
    "sl2-ram-7": lambda: catalog.sl2_ramified(7, 4),
    "sl2-unram-3": lambda: catalog.sl2_unramified(3, 3),
    "sl2-unram-5": lambda: catalog.sl2_unramified(5, 3),
    "sp4-cox-5": lambda: catalog.sp4_unramified(5, 3, "coxeter"),
    "sp4-ram-5": lambda: catalog.sp4_ramified(5, 4),
    "gl2-ram-3": lambda: catalog.gl_induced(3, 2, 1, 3),
    "gl2-unram-5": lambda: catalog.gl_induced(5, 1, 2, 3),
}
_cache = {}


def torus(name):
    if name not in _cache:
        _cache[name] = TORI[name]()
    return _cache[name]


names = st.sampled_from(sorted(TORI))
mu4 = {RootOfUnity(Fraction(k, 4)) for k in range(4)}
signs = {RootOfUnity(0), RootOfUnity(Fraction(1, 2))}


def test_ord_x_against_the_cocycle_oracle():
    seen = set()
    for real in standard_sl2_realizations():
        table = ord_x(sl2_realization_info(real), real.fi)
        assert ordx_sl2_oracle(real) == table, real.name
        seen.add(str(table))
    assert seen == {"(1/2)Z", "Z", "Z+1/2"}


def test_langlands_constant_unramified_is_minus_one():
    T = TameTower(5, 1, 2, 2)
    assert langlands_constant(T.base, T.top) == RootOfUnity(Fraction(1, 2))


@pytest.mark.parametrize("q", [3, 5, 7, 11, 13])
def test_langlands_constant_squares_to_the_sign_of_minus_one(q):
    """lambda(K/F)^2 is the quadratic character of K/F at -1, for ramified K."""
    T = TameTower(q, 2, 1, 2)
    lam = langlands_constant(T.base, T.top)
    F = GF.get(q)
    expected = RootOfUnity(0) if F.is_square(F.neg(1)) else RootOfUnity(Fraction(1, 2))
    assert lam * lam == expected
    for scale in range(1, q):
        lam_s = langlands_constant(T.base, T.top, scale)
        assert lam_s * lam_s == expected
        ratio = lam_s * lam.inverse()
        assert ratio == (RootOfUnity(0) if F.is_square(scale) else RootOfUnity(Fraction(1, 2)))


def test_langlands_constant_values():
    for q, expected in ((3, "i"), (5, "1"), (7, "i"), (11, "i")):
        T = TameTower(q, 2, 1, 2)
        assert str(langlands_constant(T.base, T.top)) == expected


def test_kappa_is_the_norm_residue_character():
    """kappa(b) = 1 exactly when b is a norm, with norms enumerated directly."""
    S = torus("sl2-ram-5")
    grd = S.grd
    T = S.tower
    r = grd.rd.roots[0]
    rf = root_fields(grd, r)
    norms = set()
    for j in range(0, 2):
        for c in range(1, T.Q):
            x = T.elt({j: c})
            if rf.F.contains_elt(x):
                n = rf.Fpm.norm_from(rf.F, x)
                norms.add((n.val % 4, n.leading_coeff()))
    for v in (0, 2):
        for c in range(1, T.Q):
            b = T.elt({v: c})
            if not rf.Fpm.contains_elt(b):
                continue
            assert (kappa(grd, r, b) == RootOfUnity(0)) == ((v % 4, c) in norms)


@given(names, st.integers(0, 10**6))
def test_kappa_is_a_quadratic_character(name, seed):
    S = torus(name)
    grd = S.grd
    rng = random.Random(seed)
    b1, b2 = random_b_data(grd, rng), random_b_data(grd, rng)
    for r in grd.symmetric_reps():
        k1, k2 = kappa(grd, r, b1[r]), kappa(grd, r, b2[r])
        assert k1 in signs
        assert kappa(grd, r, b1[r] * b2[r]) == k1 * k2


def test_weil_constant_is_inverse_of_epsilon_product_up_to_signs():
    for name in TORI:
        grd = torus(name).grd
        e = eps_L_product(grd)
        w = weil_constant(grd)
        assert e in mu4 and w in mu4
        assert (e * w) in signs


@given(names, st.integers(0, 10**6))
def test_mod_a_and_chi_data_invariants(name, seed):
    S = torus(name)
    rng = random.Random(seed)
    th = S.random_character(rng)
    try:
        moda = mod_a_from_theta(S, th)
    except ValidationError:
        return
    assert moda.check_invariants()
    chi = random_chi_data(S, moda, rng)
    assert chi.check_invariants(rng)


@given(names, st.integers(0, 10**6))
def test_delta_identities(name, seed):
    S = torus(name)
    grd = S.grd
    rng = random.Random(seed)
    a = random_a_data(grd, rng)
    chi = random_chi_data(S, a, rng)
    g = S.random_point(rng)
    lhs, rhs = rescaling_identity(g, a, chi, random_b_data(grd, rng))
    assert lhs == rhs
    lhs, rhs = zeta_identity(g, a, chi, random_zeta_data(grd, rng))
    assert lhs == rhs
    k0 = rng.choice(sorted(S.wild))
    lo, hi = g.split_at(k0)
    if valuation_split_ok(lo, hi, k0):
        lhs, rhs = split_identity(lo, hi, a, chi)
        assert lhs == rhs


@given(names, st.integers(0, 10**6))
def test_lift_independence(name, seed):
    S = torus(name)
    rng = random.Random(seed)
    th = S.random_character(rng)
    try:
        moda = mod_a_from_theta(S, th)
    except ValidationError:
        return
    chi = random_chi_data(S, moda, rng)
    lhs, rhs = lift_independence(S.random_point(rng), moda, chi, rng)
    assert lhs == rhs


def _toral_case(S, rng, tries=40):
    for _ in range(tries):
        lvl = rng.choice(sorted(S.wild))
        th = S.random_character(rng, depth_level=lvl)
        try:
            r = toral_depth(S, th)
        except ValidationError:
            continue
        if lvl < 2:
            continue
        g = S.random_point(rng, max_level=lvl - 1)
        if is_regular(g):
            return th, g, r
    return None


@given(st.sampled_from(["sl2-ram-5", "sl2-ram-7", "sl2-unram-3", "sl2-unram-5", "sp4-cox-5", "sp4-ram-5"]),
       st.integers(0, 10**6))
def test_cross_identity(name, seed):
    S = torus(name)
    rng = random.Random(seed)
    case = _toral_case(S, rng) if S.tower.e == 2 else None
    if S.tower.e == 1:
        th = S.random_character(rng, depth_level=1)
        try:
            toral_depth(S, th)
        except ValidationError:
            return
        g = S.random_point(rng, max_level=0)
        case = (th, g, 1) if is_regular(g) else None
    if case is None:
        return
    th, g, _ = case
    try:
        rep = cross_identity(S, th, g, rng=rng)
    except ValidationError:
        return
    assert rep.ok, rep.to_json()
    assert rep.eps_sr in mu4 and rep.e_tilde in signs and rep.eps_fr in signs


@given(names, st.integers(0, 10**6))
def test_sign_values(name, seed):
    """Without a-data only the unit-free signs are defined, and they are +-1."""
    S = torus(name)
    g = S.random_point(random.Random(seed))
    if not is_regular(g):
        return
    assert sign_eps_r(g, Fraction(1)) in signs
    assert sign_e_tilde(g, Fraction(1)) in signs
    assert sign_eps_fr(g) in signs
