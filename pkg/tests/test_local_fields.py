from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tamechar.errors import TruncationError, ValidationError
from tamechar.local_field import TameTower

towers = st.sampled_from([(3, 1, 2, 3), (3, 2, 1, 3), (5, 2, 1, 4), (5, 1, 2, 3), (7, 3, 1, 3), (5, 4, 1, 3)])


def same(a, b):
    """Equality up to the smaller of the two precisions."""
    p = min(a.prec, b.prec)
    return a.with_prec(p) == b.with_prec(p)


@st.composite
def tower_and_elts(draw, n=2, unit=False):
    T = TameTower(*draw(towers))
    out = []
    for _ in range(n):
        terms = {k: draw(st.integers(0, T.Q - 1)) for k in range(1 if unit else 0, T.N)}
        if unit:
            terms[0] = draw(st.integers(1, T.Q - 1))
        out.append(T.elt(terms, T.N))
    return T, out


@given(tower_and_elts(3))
def test_ring_axioms(data):
    T, (a, b, c) = data
    assert same(a + b, b + a)
    assert same(a * b, b * a)
    assert same((a * b) * c, a * (b * c))
    assert same(a * (b + c), a * b + a * c)


@given(tower_and_elts(1, unit=True))
def test_unit_inverse(data):
    T, (a,) = data
    assert same(a * a.inverse(), T.one())


@given(tower_and_elts(2), st.data())
def test_galois_is_a_field_automorphism(data, d):
    T, (a, b) = data
    s = d.draw(st.sampled_from(T.galois_group))
    t = d.draw(st.sampled_from(T.galois_group))
    assert same((a * b).galois(s), a.galois(s) * b.galois(s))
    assert same((a + b).galois(s), a.galois(s) + b.galois(s))
    assert a.galois(t).galois(s) == a.galois(T.gal_mul(s, t))


def test_tower_relation():
    for args in [(3, 2, 1, 3), (5, 4, 1, 3), (7, 3, 1, 3), (3, 2, 2, 3)]:
        T = TameTower(*args)
        x = T.u(1)
        lhs = x.galois(T.gal_inv(T.phi)).galois(T.tau).galois(T.phi)
        assert lhs == x.galois(T.word(" ".join(["tau"] * (T.q % T.e)) or "id"))


@given(tower_and_elts(2, unit=True))
def test_log_exp_inverse_and_homomorphic(data):
    T, (a, b) = data
    one = T.one()
    c = a.scale(T.k.inv(a.leading_coeff()))
    d = b.scale(T.k.inv(b.leading_coeff()))
    la, lb = T.log_series(c), T.log_series(d)
    assert same(T.exp_series(la), c)
    assert same(T.log_series(c * d), la + lb)
    assert T.log_series(one).is_zero()


@given(towers, st.data(), st.integers(1, 4))
def test_additive_character_is_additive(args, d, scale):
    T = TameTower(*args)
    scale = scale % T.p or 1
    base = T.k.subfield_elements(T.m)
    a = T.elt({0: d.draw(st.sampled_from(base)), 1: d.draw(st.integers(0, T.Q - 1))})
    b = T.elt({0: d.draw(st.sampled_from(base))})
    lhs = T.additive_character(a + b, scale)
    rhs = (T.additive_character(a, scale) + T.additive_character(b, scale)) % 1
    assert lhs == rhs


@given(towers, st.data())
def test_norm_is_multiplicative_and_trace_additive(args, d):
    T = TameTower(*args)
    subs = T.all_subgroups()
    H = d.draw(st.sampled_from(subs))
    K = T.subfield(H)
    F = T.base
    def unit():
        return T.elt({0: d.draw(st.integers(1, T.Q - 1)), 1: d.draw(st.integers(0, T.Q - 1))}, T.N)
    x, y = unit(), unit()
    x = K.norm_from(T.top, x)
    y = K.norm_from(T.top, y)
    assert K.contains_elt(x) and K.contains_elt(y)
    assert F.norm_from(K, x * y) == F.norm_from(K, x) * F.norm_from(K, y)
    assert F.trace_from(K, x + y) == F.trace_from(K, x) + F.trace_from(K, y)
    assert F.contains_elt(F.norm_from(K, x))


def test_subfield_degrees_and_uniformizers():
    T = TameTower(5, 4, 1, 3)
    for H in T.all_subgroups():
        K = T.subfield(H)
        assert K.degree * len(H) == T.e * T.f
        assert K.contains_elt(K.uniformizer)
        assert K.uniformizer.ord == Fraction(1, K.e)


def test_valuation_is_in_units_of_the_base():
    T = TameTower(3, 2, 1, 3)
    assert T.u(1).ord == Fraction(1, 2)
    assert (T.u(1) * T.u(1)).ord == 1


def test_truncation_needs_p_at_least_N():
    with pytest.raises(TruncationError):
        TameTower(3, 1, 2, 4)
    assert TameTower(3, 1, 2, 3).N == 3


def test_invalid_towers():
    with pytest.raises(ValidationError):
        TameTower(4, 1, 1, 2)
    with pytest.raises(ValidationError):
        TameTower(3, 3, 1, 2)
    with pytest.raises(ValidationError):
        TameTower(5, 3, 1, 2)
