"""a-data, chi-data, Delta_II^abs, Langlands constants and the sign characters.

Conventions.  For a root alpha, F_alpha and F_{+-alpha} are the fixed fields
of the stabilizers of alpha and of {alpha, -alpha}.  ``ord`` is normalized by
ord(t) = 1 for the uniformizer t of F, so an element c u^k has ord k / e.
Additive characters are Lambda(x) = psi_p(tr(scale * x)) with ``scale`` in
F_p^x.  Values are RootOfUnity objects.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .abelian import solve_mod_p
from .cyclotomic import CycNum, RootOfUnity, gauss_sum
from .errors import InvariantViolation, TruncationError, ValidationError
from .local_field import FieldElt, Subfield, TameTower
from .pairs import root_depth_levels
from .root_data import GaloisRootDatum, RootOrbitInfo, neg
from .tori import TameTorus, TorusCharacter, TorusPoint

ONE = RootOfUnity(0)
MINUS_ONE = RootOfUnity(Fraction(1, 2))


def as_root_of_unity(x, order: int = 8) -> RootOfUnity:
    """A CycNum known to be a root of unity of the given order, as a RootOfUnity."""
    if isinstance(x, RootOfUnity):
        return x
    for k in range(order):
        z = RootOfUnity(Fraction(k, order))
        if z.as_cyc() == x:
            return z
    raise InvariantViolation(f"{x} is not a root of unity of order dividing {order}")


def _grd(S: TameTorus) -> GaloisRootDatum:
    if S.grd is None:
        raise ValidationError("torus has no root datum attached")
    return S.grd


@dataclass(frozen=True)
class RootFields:
    info: RootOrbitInfo
    F: Subfield  # F_alpha
    Fpm: Subfield  # F_{+-alpha}


def root_fields(grd: GaloisRootDatum, root) -> RootFields:
    cache = grd.__dict__.setdefault("_root_fields", {})
    root = tuple(root)
    if root not in cache:
        info = grd.info(root)
        cache[root] = RootFields(info, grd.tower.subfield(info.stabilizer), grd.tower.subfield(info.pm_stabilizer))
    return cache[root]


def _outer(grd: GaloisRootDatum, root):
    """An element of Gamma_{+-alpha} not in Gamma_alpha."""
    rf = root_fields(grd, root)
    return next(s for s in sorted(rf.info.pm_stabilizer) if s not in rf.info.stabilizer)


def root_value(gamma: TorusPoint, root) -> FieldElt:
    return gamma.character_value(root)


def _sign_of(b: bool) -> RootOfUnity:
    return ONE if b else MINUS_ONE


# ord_x -----------------------------------------------------------------------

@dataclass(frozen=True)
class Coset:
    """The subset step * (Z + shift) of Q, 0 <= shift < 1."""

    step: Fraction
    shift: Fraction = Fraction(0)

    def contains(self, x) -> bool:
        return (Fraction(x) / self.step - self.shift).denominator == 1

    def __str__(self):
        base = "Z" if self.shift == 0 else f"Z+{self.shift}"
        if self.step == 1:
            return base
        return f"({self.step}){base}" if self.shift == 0 else f"({self.step})({base})"


def ord_x(info: RootOrbitInfo, fi: int | None = None) -> Coset:
    """The set of ord(X) for nonzero X in the root line of a symmetric root."""
    if not info.symmetric:
        raise ValidationError("ord_x is defined for symmetric roots only")
    fi = info.fi if fi is None else fi
    fi = 1 if fi is None else fi
    step = Fraction(1, info.e_alpha)
    if not info.ramified and fi == -1:
        return Coset(step, Fraction(1, 2))
    return Coset(step)


def _ord_set(info: RootOrbitInfo) -> Coset:
    """ord_x for symmetric roots, e_alpha^-1 Z for asymmetric ones."""
    if info.symmetric:
        return ord_x(info)
    return Coset(Fraction(1, info.e_alpha))


@dataclass(frozen=True)
class SL2Realization:
    """SL_2 with the anisotropic torus of a quadratic extension, cocycle twisted by diag(z, 1).

    z = g^twist_unit u^twist lies in F^x; ramified realizations need a unit z.
    """

    q: int
    ramified: bool
    twist: int = 0
    twist_unit: int = 0
    N: int = 3

    @property
    def fi(self) -> int:
        return -1 if (not self.ramified and self.twist % 2) else 1

    @property
    def name(self) -> str:
        kind = "ramified" if self.ramified else "unramified"
        tw = "" if not (self.twist or self.twist_unit) else f"-twist(u^{self.twist},g^{self.twist_unit})"
        return f"SL2-{kind}-q{self.q}{tw}"


def ordx_sl2_oracle(real: SL2Realization) -> Coset:
    """ord_x of the root of an SL_2 realization, from the valuations of the twisted cocycle.

    With h = [[1, -t^-1/2], [t, 1/2]] (t of trace zero in F_alpha) and the
    cocycle n = h^-1 sigma(h) twisted by diag(z, 1), the root line has breaks
    at ord(F_alpha^x) + <alpha, v> with <alpha, v> = ord(-c / (z b)) / 2.
    """
    e, f = (2, 1) if real.ramified else (1, 2)
    T = TameTower(real.q, e, f, real.N)
    sigma = T.tau if real.ramified else T.phi
    if real.ramified and real.twist:
        raise ValidationError("ramified realizations need a unit twist")
    if real.ramified:
        t = T.u(1)
    else:
        t = T.const(T.k.exp((real.q + 1) // 2 * ((T.Q - 1) // (real.q**2 - 1))))
    if t.galois(sigma) != -t:
        raise InvariantViolation("trace-zero element is not anti-invariant")
    half = T.integer(2).inverse()
    ti = t.inverse()
    h = [[T.one(), -(ti * half)], [t, half]]
    hinv = [[half, ti * half], [-t, T.one()]]
    sh = [[x.galois(sigma) for x in row] for row in h]
    n = [[(hinv[i][0] * sh[0][j] + hinv[i][1] * sh[1][j]) for j in range(2)] for i in range(2)]
    if not (n[0][0].is_zero() and n[1][1].is_zero()):
        raise InvariantViolation("cocycle is not antidiagonal")
    z = T.elt({real.twist * e: T.k.exp(real.twist_unit * ((T.Q - 1) // (real.q - 1)))})
    b, c = n[0][1], n[1][0]
    ratio = -(c / (z * b))
    shift = Fraction(ratio.val, 2 * e)
    breaks = sorted({Fraction(k, e) + shift for k in range(-2 * real.N, 2 * real.N)})
    step = min(y - x for x, y in zip(breaks, breaks[1:]))
    off = shift / step
    return Coset(step, off - (off.numerator // off.denominator))


def standard_sl2_realizations() -> list[SL2Realization]:
    out = []
    for q in (3, 5):
        out.append(SL2Realization(q, True))
        out.append(SL2Realization(q, True, 0, 1))
        out.append(SL2Realization(q, False))
        out.append(SL2Realization(q, False, 1))
    return out


def sl2_realization_info(real: SL2Realization) -> RootOrbitInfo:
    """RootOrbitInfo of the root of the corresponding SL_2 torus, with the realization's fi."""
    from .catalog import sl2_ramified, sl2_unramified

    S = sl2_ramified(real.q, real.N) if real.ramified else sl2_unramified(real.q, real.N)
    grd = S.grd
    root = grd.rd.roots[0]
    grd.set_fi(root, real.fi)
    return grd.info(root)


# Langlands constants and the epsilon product -------------------------------

def langlands_constant(small: Subfield, large: Subfield, scale: int = 1) -> RootOfUnity:
    """lambda of the quadratic extension large/small for the character Lambda o tr.

    Unramified: -1.  Ramified: the normalized quadratic Gauss sum over the
    residue field times the quadratic residue sign of e(small/F).
    """
    if not large.contains(small) or large.degree != 2 * small.degree:
        raise ValidationError("langlands_constant needs a quadratic extension")
    if large.e == small.e:
        return MINUS_ONE
    T = large.tower
    g0 = as_root_of_unity(gauss_sum(large.q, scale % T.p))
    e_sign = large.is_square_residue(small.e % T.p)
    return g0 * _sign_of(e_sign)


def root_langlands_constant(grd: GaloisRootDatum, root, scale: int = 1) -> RootOfUnity:
    rf = root_fields(grd, root)
    if not rf.info.symmetric:
        raise ValidationError("Langlands constants are attached to symmetric roots")
    return langlands_constant(rf.Fpm, rf.F, scale)


def eps_L_product(grd: GaloisRootDatum, scale: int = 1, breakdown: bool = False):
    """Product over symmetric orbits of fi(alpha) * lambda_{F_alpha/F_+-alpha}."""
    total = ONE
    parts = []
    for r in grd.symmetric_reps():
        v = RootOfUnity.sign(grd.get_fi(r)) * root_langlands_constant(grd, r, scale)
        parts.append((r, v))
        total = total * v
    return (total, parts) if breakdown else total


def weil_constant(grd: GaloisRootDatum, scale: int = 1) -> RootOfUnity:
    """e(G) eps_L(X^*(T) - X^*(S)): the product of fi(alpha) lambda^-1 over symmetric orbits."""
    total = ONE
    for r in grd.symmetric_reps():
        total = total * RootOfUnity.sign(grd.get_fi(r)) * root_langlands_constant(grd, r, scale).inverse()
    return total


# kappa ------------------------------------------------------------------------

def kappa(grd: GaloisRootDatum, root, b: FieldElt) -> RootOfUnity:
    """The quadratic character of F_{+-alpha}^x attached to F_alpha, via the norm group."""
    rf = root_fields(grd, root)
    if not rf.info.symmetric:
        raise ValidationError("kappa is attached to symmetric roots")
    if not rf.Fpm.contains_elt(b):
        raise ValidationError("argument does not lie in F_{+-alpha}")
    T = grd.tower
    vu = b.val
    if vu % rf.Fpm.e_top:
        raise InvariantViolation("valuation not in the value group of F_{+-alpha}")
    v = vu // rf.Fpm.e_top
    if not rf.info.ramified:
        return _sign_of(v % 2 == 0)
    n0 = rf.Fpm.norm_from(rf.F, rf.F.uniformizer)
    lead = T.k.mul(b.terms[0][1], T.k.pow(n0.terms[0][1], -v))
    return _sign_of(rf.Fpm.is_square_residue(lead))


# tame characters ---------------------------------------------------------------

class FieldCharacter:
    """A character of K^x evaluated through ``exponent``."""

    field: Subfield

    def exponent(self, x: FieldElt) -> Fraction:
        raise NotImplementedError

    def __call__(self, x: FieldElt) -> RootOfUnity:
        return RootOfUnity(self.exponent(x))

    def __mul__(self, other: "FieldCharacter") -> "FieldCharacter":
        return ProductCharacter(self, other)


@dataclass(frozen=True, eq=False)
class TameCharacter(FieldCharacter):
    """x = pi^v c (1 + ...) -> exp(2 pi i (pi_exp v + unit_exp log c)), pi the canonical uniformizer.

    ``log`` is the discrete log in k_K^x relative to its canonical generator.
    """

    field: Subfield
    pi_exp: Fraction = Fraction(0)
    unit_exp: Fraction = Fraction(0)

    def valuation_and_residue(self, x: FieldElt) -> tuple[int, int]:
        K = self.field
        T = K.tower
        vu = x.val
        if vu % K.e_top:
            raise ValidationError("element does not lie in the subfield")
        v = vu // K.e_top
        lead = T.k.mul(x.terms[0][1], T.k.pow(K.uniformizer.terms[0][1], -v))
        return v, lead

    def exponent(self, x: FieldElt) -> Fraction:
        v, lead = self.valuation_and_residue(x)
        ex = Fraction(self.pi_exp) * v + Fraction(self.unit_exp) * self.field.residue_log(lead)
        return ex - (ex.numerator // ex.denominator)

    def inverse(self) -> "TameCharacter":
        return TameCharacter(self.field, -Fraction(self.pi_exp), -Fraction(self.unit_exp))

    def to_json(self) -> dict:
        return {"uniformizer": str(Fraction(self.pi_exp)), "unit": str(Fraction(self.unit_exp))}


@dataclass(frozen=True, eq=False)
class ProductCharacter(FieldCharacter):
    a: FieldCharacter
    b: FieldCharacter

    @property
    def field(self):
        return self.a.field

    def exponent(self, x):
        ex = self.a.exponent(x) + self.b.exponent(x)
        return ex - (ex.numerator // ex.denominator)


@dataclass(frozen=True, eq=False)
class TransportedCharacter(FieldCharacter):
    """x -> base(s^-1 x)^sign, a character of s(K)^x."""

    base: FieldCharacter
    s: tuple
    sign: int
    field: Subfield

    def exponent(self, x):
        T = self.field.tower
        ex = self.sign * self.base.exponent(x.galois(T.gal_inv(self.s)))
        return ex - (ex.numerator // ex.denominator)


def _transport_chars(grd: GaloisRootDatum, reps: dict) -> dict:
    """Characters on all roots from characters on Gamma x {+-1} representatives."""
    out = {}
    T = grd.tower
    for a, chi in reps.items():
        for s in T.galois_group:
            b = grd.act(s, a)
            if b not in out:
                out[b] = TransportedCharacter(chi, s, 1, root_fields(grd, b).F)
            nb = neg(b)
            if nb not in out:
                out[nb] = TransportedCharacter(chi, s, -1, root_fields(grd, nb).F)
    return out


def _transport_elts(grd: GaloisRootDatum, reps: dict, negate: bool = True) -> dict:
    """FieldElt data on all roots: a_{s alpha} = s(a_alpha), a_{-alpha} = -a_alpha (or +a_alpha)."""
    out = {}
    T = grd.tower
    for a, x in reps.items():
        for s in T.galois_group:
            for b, y in ((grd.act(s, a), x.galois(s)), (neg(grd.act(s, a)), -x.galois(s) if negate else x.galois(s))):
                if b in out:
                    if out[b] != y:
                        raise InvariantViolation(f"root data are not Galois-equivariant at {b}")
                else:
                    out[b] = y
    return out


# random field elements ---------------------------------------------------------

def random_level_coeff(K: Subfield, k: int, rng: random.Random, nonzero: bool = True) -> int:
    """A random c with c u^k in K."""
    T = K.tower
    basis = K.level_coeffs(k)
    if not basis:
        if nonzero:
            raise ValidationError(f"subfield has no elements of u-valuation {k}")
        return 0
    while True:
        c = 0
        for b in basis:
            c = T.k.add(c, T.k.mul(rng.randrange(T.p), b))
        if c or not nonzero:
            return c


def random_elt(K: Subfield, rng: random.Random, val: int, depth: int = 1, prec: int | None = None) -> FieldElt:
    """A random element of K with u-valuation ``val`` and up to ``depth`` further terms."""
    T = K.tower
    prec = T.N + val if prec is None else prec
    terms = {val: random_level_coeff(K, val, rng)}
    for k in range(val + 1, min(prec, val + 1 + depth * T.e)):
        if K.level_coeffs(k):
            c = random_level_coeff(K, k, rng, nonzero=False)
            if c:
                terms[k] = c
    return T.elt(terms, prec)


def random_unit(K: Subfield, rng: random.Random, depth: int = 1) -> FieldElt:
    return random_elt(K, rng, 0, depth)


# mod-a-data -------------------------------------------------------------------

@dataclass
class ModAData:
    """Per root: the u-level k of the root and abar in u^-k k_E (known modulo [F_alpha]_{-r+})."""

    torus: TameTorus = field(repr=False)
    levels: dict
    abar: dict

    def __getitem__(self, root) -> FieldElt:
        return self.abar[tuple(root)]

    def depth(self, root) -> Fraction:
        return Fraction(self.levels[tuple(root)], self.torus.tower.e)

    def lift(self, rng: random.Random) -> dict:
        """Random lifts a_alpha in F_alpha of every abar_alpha (no equivariance imposed)."""
        grd = _grd(self.torus)
        T = self.torus.tower
        out = {}
        for r, a in self.abar.items():
            F = root_fields(grd, r).F
            k = a.val
            terms = dict(a.terms)
            for j in range(k + 1, min(T.N, k + 1 + 2 * T.e)):
                if F.level_coeffs(j):
                    c = random_level_coeff(F, j, rng, nonzero=False)
                    if c:
                        terms[j] = c
            out[r] = T.elt(terms, T.N)
        return out

    def check_invariants(self) -> bool:
        grd = _grd(self.torus)
        T = self.torus.tower
        for r, a in self.abar.items():
            if self.abar[neg(r)] != -a:
                raise InvariantViolation(f"abar_(-alpha) != -abar_alpha at {r}")
            for s in (T.tau, T.phi):
                if self.abar[grd.act(s, r)] != a.galois(s):
                    raise InvariantViolation(f"abar is not Galois-equivariant at {r}")
            if self.levels[grd.act(T.phi, r)] != self.levels[r]:
                raise InvariantViolation("levels are not Galois-invariant")
        return True

    def to_json(self) -> dict:
        return {",".join(map(str, r)): {"level": self.levels[r], "abar": str(a)} for r, a in sorted(self.abar.items())}


def solve_abar(S: TameTorus, theta: TorusCharacter, cochar, H, k: int, scale: int = 1) -> FieldElt:
    """abar in u^-k k_E with theta(N_{K/F}(cochar (x) (1 + X))) = Lambda(tr_{K/F}(abar X)), K = E^H.

    X runs over [K]_k / [K]_{k+1}; the equation is F_p-linear in both.
    """
    T = S.tower
    if k <= 0:
        raise ValidationError("the defining equation needs a positive level")
    if k >= T.N:
        raise TruncationError(f"level {k} is beyond the truncation window", required_n=k + 1)
    K = T.subfield(H)
    xs = K.level_coeffs(k)
    bs = K.level_coeffs(-k)
    if len(xs) != len(bs):
        raise InvariantViolation("level spaces of opposite levels differ in dimension")
    p = T.p
    lhs, rows = [], []
    for x in xs:
        ex = theta.exponent(S.norm_point(cochar, T.elt({0: 1, k: x}), H))
        if (ex * p).denominator != 1:
            raise InvariantViolation("character is not of exponent p on principal units")
        lhs.append(int(ex * p) % p)
        row = []
        for b in bs:
            tr = T.base.trace_from(K, T.elt({0: T.k.mul(b, x)}))
            row.append(int(T.additive_character(tr, scale) * p) % p)
        rows.append(row)
    beta = solve_mod_p(rows, lhs, p)
    if beta is None:
        raise InvariantViolation("defining equation for abar has no solution")
    c = 0
    for bj, b in zip(beta, bs):
        c = T.k.add(c, T.k.mul(bj, b))
    if not c:
        raise ValidationError(f"theta o N o coroot is trivial at level {k}")
    return T.elt({-k: c}, -k + 1)


def _unit_abar(grd: GaloisRootDatum, root) -> FieldElt:
    """A unit-level abar: 1 for asymmetric roots, a trace-zero residue for symmetric ones."""
    rf = root_fields(grd, root)
    T = grd.tower
    if not rf.info.symmetric:
        return T.elt({0: 1}, 1)
    if rf.info.ramified:
        raise ValidationError("a symmetric ramified root cannot carry a unit-level abar")
    s = _outer(grd, root)
    for j in range(T.Q - 1):
        c = T.k.exp(j)
        if not T.k.in_subfield(c, T.m * rf.F.f):
            continue
        x = T.elt({0: c}, 1)
        if x.galois(s) == -x and rf.F.contains_elt(x):
            return x
    raise InvariantViolation("no trace-zero residue found")


def mod_a_from_theta(S: TameTorus, theta: TorusCharacter, scale: int = 1) -> ModAData:
    """Mod-a-data from the generic character: each root at its own depth level.

    Roots on which theta o N o coroot is trivial at all positive levels get a
    unit-level entry, transported along Gamma x {+-1}-orbits.
    """
    grd = _grd(S)
    levels = root_depth_levels(S, theta)
    abar = {}
    zero = [r for r, k in levels.items() if k == 0]
    for r, k in levels.items():
        if k > 0:
            abar[r] = solve_abar(S, theta, grd.rd.coroot(r), grd.stabilizer(r), k, scale)
    if zero:
        reps = {r: _unit_abar(grd, r) for r in grd.orbit_reps(zero)}
        abar.update(_transport_elts(grd, reps))
    return ModAData(S, dict(levels), abar)


def random_a_data(grd: GaloisRootDatum, rng: random.Random, max_val: int = 1) -> dict:
    """Random a-data: a_(-alpha) = -a_alpha, a_(s alpha) = s(a_alpha), exact within the window."""
    T = grd.tower
    reps = {}
    for r in grd.orbit_reps():
        rf = root_fields(grd, r)
        while True:
            v = rf.F.e_top * rng.randint(-max_val, max_val)
            y = random_elt(rf.F, rng, v, depth=1, prec=T.N)
            if rf.info.symmetric:
                y = y - y.galois(_outer(grd, r))
            if not y.is_zero():
                break
        reps[r] = y
    return _transport_elts(grd, reps)


def random_b_data(grd: GaloisRootDatum, rng: random.Random, max_val: int = 1) -> dict:
    """b_alpha in F_alpha^x (in F_{+-alpha}^x when symmetric) with b_(-alpha) = b_alpha, equivariant."""
    T = grd.tower
    reps = {}
    for r in grd.orbit_reps():
        rf = root_fields(grd, r)
        K = rf.Fpm if rf.info.symmetric else rf.F
        v = K.e_top * rng.randint(-max_val, max_val)
        reps[r] = random_elt(K, rng, v, depth=1, prec=T.N)
    return _transport_elts(grd, reps, negate=False)


# chi-data -------------------------------------------------------------------

class ChiData:
    """Characters chi_alpha of F_alpha^x for every root."""

    def __init__(self, grd: GaloisRootDatum, chars: dict, kinds: dict | None = None):
        self.grd = grd
        self.chars = chars
        self.kinds = kinds or {}

    def __getitem__(self, root) -> FieldCharacter:
        return self.chars[tuple(root)]

    def times(self, other: "ChiData") -> "ChiData":
        return ChiData(self.grd, {r: c * other.chars[r] for r, c in self.chars.items()}, dict(self.kinds))

    def check_invariants(self, rng: random.Random, samples: int = 3) -> bool:
        """chi_(-alpha) = chi_alpha^-1, chi_(s alpha)(s x) = chi_alpha(x), chi_alpha = kappa on F_(+-alpha)."""
        grd = self.grd
        T = grd.tower
        for r in grd.rd.roots:
            rf = root_fields(grd, r)
            for _ in range(samples):
                x = random_elt(rf.F, rng, rf.F.e_top * rng.randint(-2, 2), depth=1, prec=T.N)
                if (self[r].exponent(x) + self[neg(r)].exponent(x)) % 1:
                    raise InvariantViolation(f"chi_(-alpha) != chi_alpha^-1 at {r}")
                for s in (T.tau, T.phi):
                    if self[grd.act(s, r)].exponent(x.galois(s)) != self[r].exponent(x):
                        raise InvariantViolation(f"chi-data not Galois-equivariant at {r}")
            if rf.info.symmetric:
                for y in _pm_generators(rf):
                    if self[r](y) != kappa(grd, r, y):
                        raise InvariantViolation(f"chi_alpha does not extend kappa at {r}")
        return True

    def is_minimally_ramified(self) -> bool:
        """Trivial on asymmetric roots, unramified quadratic on unramified symmetric, tame quadratic on units."""
        return all(k in ("trivial", "unramified-quadratic", "tame-ramified-A", "tame-ramified-B")
                   for k in self.kinds.values())


def _pm_generators(rf: RootFields):
    """Generators of F_(+-alpha)^x modulo principal units."""
    K = rf.Fpm
    T = K.tower
    return [K.uniformizer.with_prec(T.N), T.elt({0: K.residue_gen}, T.N)]


def _ramified_candidates(grd: GaloisRootDatum, root) -> list[TameCharacter]:
    """Tame characters of F_alpha^x extending kappa, quadratic on units (two of them)."""
    rf = root_fields(grd, root)
    out = []
    for j in range(4):
        chi = TameCharacter(rf.F, Fraction(j, 4), Fraction(1, 2))
        if all(chi(y) == kappa(grd, root, y) for y in _pm_generators(rf)):
            out.append(chi)
    if len(out) != 2:
        raise InvariantViolation(f"expected two tame extensions of kappa, found {len(out)}")
    return out


def chi_from_mod_a(grd: GaloisRootDatum, root, abar: FieldElt | None, variant: str = "chi'",
                   scale: int = 1) -> tuple[str, TameCharacter]:
    """The chi-data entry of one root.

    ``variant`` "chi'" pins chi(-2 a^-1) = lambda, "chi" pins fi * lambda.
    Returns (kind, character).
    """
    rf = root_fields(grd, root)
    T = grd.tower
    if not rf.info.symmetric:
        return "trivial", TameCharacter(rf.F)
    if not rf.info.ramified:
        return "unramified-quadratic", TameCharacter(rf.F, Fraction(1, 2))
    if variant not in ("chi", "chi'"):
        raise ValidationError("variant must be 'chi' or \"chi'\"")
    lam = root_langlands_constant(grd, root, scale)
    target = lam if variant == "chi'" else RootOfUnity.sign(grd.get_fi(root)) * lam
    if abar is None:
        raise ValidationError("ramified roots need abar")
    arg = abar.inverse().scale(T.k.neg(2 % T.p))
    cands = _ramified_candidates(grd, root)
    hits = [(i, c) for i, c in enumerate(cands) if c(arg) == target]
    if len(hits) != 1:
        raise InvariantViolation("prescribed value is not a square root of kappa(-1)")
    i, chi = hits[0]
    return "tame-ramified-" + "AB"[i], chi


def chi_data(S: TameTorus, moda: ModAData | dict, variant: str = "chi'", scale: int = 1,
             overrides: dict | None = None) -> ChiData:
    """Chi-data on all roots from representatives; asymmetric defaults to trivial."""
    grd = _grd(S)
    reps, kinds = {}, {}
    for r in grd.orbit_reps():
        if overrides and r in overrides:
            kinds[r], reps[r] = "override", overrides[r]
            continue
        a = moda[r] if root_fields(grd, r).info.ramified else None
        kinds[r], reps[r] = chi_from_mod_a(grd, r, a, variant, scale)
    return ChiData(grd, _transport_chars(grd, reps), kinds)


def random_zeta_data(grd: GaloisRootDatum, rng: random.Random) -> ChiData:
    """Random tame zeta-data: zeta_(-alpha) = zeta_alpha^-1, equivariant, trivial on F_(+-alpha)^x if symmetric."""
    reps = {}
    T = grd.tower
    for r in grd.orbit_reps():
        rf = root_fields(grd, r)
        qa = rf.F.q
        if not rf.info.symmetric:
            reps[r] = TameCharacter(rf.F, Fraction(rng.randrange(12), 12), Fraction(rng.randrange(qa - 1), qa - 1))
            continue
        # unit part trivial on k_(+-)^x, then solve for the uniformizer value
        qpm = rf.Fpm.q
        step = (qa - 1) // (qpm - 1)
        unit = Fraction(rng.randrange(step), step) if step > 1 else Fraction(0)
        upm = rf.Fpm.uniformizer.with_prec(T.N)
        probe = TameCharacter(rf.F, Fraction(0), unit)
        v, _ = probe.valuation_and_residue(upm)
        base = -probe.exponent(upm)
        pi = (base + rng.randrange(v)) / v
        chi = TameCharacter(rf.F, pi, unit)
        if any(chi.exponent(y) for y in _pm_generators(rf)):
            raise InvariantViolation("zeta is not trivial on F_(+-alpha)^x")
        reps[r] = chi
    return ChiData(grd, _transport_chars(grd, reps), {r: "zeta" for r in reps})


def random_chi_data(S: TameTorus, moda, rng: random.Random, scale: int = 1) -> ChiData:
    """Canonical chi'-data twisted by random zeta-data: a random tame chi-data."""
    return chi_data(S, moda, "chi'", scale).times(random_zeta_data(_grd(S), rng))


def zeta_T(grd: GaloisRootDatum, zeta: ChiData, gamma: TorusPoint) -> RootOfUnity:
    """The character of T(F) attached to zeta-data.

    Asymmetric orbits contribute zeta_alpha(alpha(gamma)); symmetric ones
    zeta_alpha(delta) with delta / s(delta) = alpha(gamma), s in Gamma_(+-alpha) - Gamma_alpha.
    """
    T = grd.tower
    total = Fraction(0)
    for r in grd.orbit_reps():
        rf = root_fields(grd, r)
        x = root_value(gamma, r)
        if not rf.info.symmetric:
            total += zeta[r].exponent(x)
            continue
        s = _outer(grd, r)
        delta = None
        for c in (T.one(), rf.F.uniformizer.with_prec(T.N), _trace_zero_unit(grd, r)):
            d = c + x * c.galois(s)
            if not d.is_zero():
                delta = d
                break
        if delta is None:
            raise TruncationError("Hilbert 90 preimage not resolved within the window", required_n=T.N + 1)
        total += zeta[r].exponent(delta)
    return RootOfUnity(total)


def _trace_zero_unit(grd: GaloisRootDatum, root) -> FieldElt:
    rf = root_fields(grd, root)
    T = grd.tower
    s = _outer(grd, root)
    for j in range(T.Q - 1):
        x = T.elt({0: T.k.exp(j)}, T.N)
        if rf.F.contains_elt(x) and x.galois(s) == -x:
            return x
    return rf.F.uniformizer.with_prec(T.N) if rf.info.ramified else T.one()


# Delta_II^abs -------------------------------------------------------------------

def delta_II_abs(gamma: TorusPoint, a, chi: ChiData, roots=None, reps=None, breakdown: bool = False):
    """Product of chi_alpha((alpha(gamma) - 1) / a_alpha) over Gamma-orbits with alpha(gamma) != 1.

    ``a`` maps roots to FieldElts (a-data or abar); ``reps`` overrides the
    orbit representatives.  alpha(gamma) - 1 vanishing modulo the window
    counts as alpha(gamma) = 1.
    """
    grd = chi.grd
    reps = grd.gamma_orbit_reps(roots) if reps is None else reps
    total = Fraction(0)
    parts = []
    for r in reps:
        x = root_value(gamma, r) - gamma.torus.tower.one()
        if x.is_zero():
            continue
        ex = chi[r].exponent(x / a[tuple(r)])
        parts.append((tuple(r), RootOfUnity(ex)))
        total += ex
    val = RootOfUnity(total)
    return (val, parts) if breakdown else val


def regular_roots(gamma: TorusPoint, roots=None) -> list:
    S = gamma.torus
    roots = _grd(S).rd.roots if roots is None else roots
    one = S.tower.one()
    return [r for r in roots if not (root_value(gamma, r) - one).is_zero()]


def is_regular(gamma: TorusPoint) -> bool:
    return len(regular_roots(gamma)) == len(_grd(gamma.torus).rd.roots)


# sign characters -----------------------------------------------------------------

@dataclass
class SignBundle:
    eps_sr: RootOfUnity
    eps_r: RootOfUnity
    e_tilde: RootOfUnity
    eps_fr: RootOfUnity
    parts: dict = field(default_factory=dict)  # name -> [(root, value)]

    def to_json(self) -> dict:
        return {
            "eps_sr": str(self.eps_sr), "eps_r": str(self.eps_r), "e_tilde": str(self.e_tilde),
            "eps_fr": str(self.eps_fr),
            "orbits": {k: [{"root": list(r), "value": str(v)} for r, v in vs] for k, vs in self.parts.items()},
        }


def _ord_minus_one(gamma: TorusPoint, root):
    x = root_value(gamma, root) - gamma.torus.tower.one()
    if x.is_zero():
        return None, x
    return x.ord, x


def sign_eps_sr(gamma: TorusPoint, r, a: dict, roots=None, scale: int = 1, rng: random.Random | None = None,
                breakdown: bool = False):
    """Product over symmetric ramified orbits in R_{(r-o)/2} of fi (-G)^f_alpha sgn(t_alpha).

    t_alpha = (e_alpha / 2) N_{F_alpha/F_(+-alpha)}(w_alpha) a_alpha (alpha(gamma) - 1) with
    ord(w_alpha) = (r - o) / 2; with ``rng`` w_alpha is a random element of that
    valuation, otherwise a power of the canonical uniformizer.
    """
    S = gamma.torus
    grd = _grd(S)
    T = S.tower
    r = Fraction(r)
    G = as_root_of_unity(gauss_sum(T.q, scale % T.p))
    total = ONE
    parts = []
    for al in grd.gamma_orbit_reps(roots):
        rf = root_fields(grd, al)
        if not rf.info.ramified:
            continue
        o, x = _ord_minus_one(gamma, al)
        if o is None:
            continue
        m = (r - o) / 2
        if not ord_x(rf.info).contains(m):
            continue
        ku = m * T.e
        if ku.denominator != 1 or ku.numerator % rf.F.e_top:
            raise InvariantViolation("no element of the required valuation in F_alpha")
        ku = int(ku)
        if rng is None:
            w = rf.F.uniformizer.with_prec(T.N) ** (ku // rf.F.e_top)
        else:
            w = random_elt(rf.F, rng, ku, depth=1, prec=T.N + ku)
        nw = rf.Fpm.norm_from(rf.F, w)
        t = (nw * a[al] * x).scale(T.k.mul(rf.info.e_alpha % T.p, T.k.inv(2)))
        if t.is_zero() or t.val != 0:
            raise InvariantViolation("t_alpha is not a unit")
        sq = rf.F.is_square_residue(t.terms[0][1])
        v = RootOfUnity.sign(grd.get_fi(al)) * (MINUS_ONE * G) ** rf.info.f_alpha * _sign_of(sq)
        parts.append((al, v))
        total = total * v
    return (total, parts) if breakdown else total


def sign_e_tilde(gamma: TorusPoint, r, roots=None, breakdown: bool = False):
    """(-1)^(number of symmetric Gamma-orbits in R_{(r-o)/2} with alpha(gamma) != 1)."""
    grd = _grd(gamma.torus)
    r = Fraction(r)
    total = ONE
    parts = []
    for al in grd.gamma_orbit_reps(roots):
        rf = root_fields(grd, al)
        if not rf.info.symmetric:
            continue
        o, _ = _ord_minus_one(gamma, al)
        if o is None or not ord_x(rf.info).contains((r - o) / 2):
            continue
        parts.append((al, MINUS_ONE))
        total = total * MINUS_ONE
    return (total, parts) if breakdown else total


def sign_eps_r(gamma: TorusPoint, r, roots=None, reps=None, breakdown: bool = False):
    """Quadratic signs of the residues of alpha(gamma) over R_{r/2}.

    Asymmetric Gamma x {+-1}-orbits contribute sgn on k_alpha^x, unramified
    symmetric orbits sgn on the norm-one group k_alpha^1.
    """
    S = gamma.torus
    grd = _grd(S)
    T = S.tower
    r = Fraction(r)
    total = ONE
    parts = []
    reps = grd.orbit_reps(roots) if reps is None else reps
    for al in reps:
        rf = root_fields(grd, al)
        if rf.info.ramified:
            continue
        if not _ord_set(rf.info).contains(r / 2):
            continue
        x = root_value(gamma, al)
        if x.val != 0:
            raise ValidationError("alpha(gamma) is not a unit")
        lg = rf.F.residue_log(x.terms[0][1])
        if rf.info.symmetric:
            qpm = rf.Fpm.q
            if lg % (qpm - 1):
                raise InvariantViolation("alpha(gamma) residue is not of norm one")
            v = _sign_of((lg // (qpm - 1)) % 2 == 0)
        else:
            v = _sign_of(lg % 2 == 0)
        parts.append((al, v))
        total = total * v
    return (total, parts) if breakdown else total


def sign_eps_fr(gamma: TorusPoint, roots=None, breakdown: bool = False):
    """Product of fi over symmetric ramified orbits with ord(alpha(gamma) - 1) = 0."""
    grd = _grd(gamma.torus)
    total = ONE
    parts = []
    for al in grd.gamma_orbit_reps(roots):
        rf = root_fields(grd, al)
        if not rf.info.ramified:
            continue
        o, _ = _ord_minus_one(gamma, al)
        if o is None or o != 0:
            continue
        v = RootOfUnity.sign(grd.get_fi(al))
        parts.append((al, v))
        total = total * v
    return (total, parts) if breakdown else total


def sign_bundle(gamma: TorusPoint, r, a: dict, roots=None, scale: int = 1) -> SignBundle:
    sr, p1 = sign_eps_sr(gamma, r, a, roots, scale, breakdown=True)
    er, p2 = sign_eps_r(gamma, r, roots, breakdown=True)
    et, p3 = sign_e_tilde(gamma, r, roots, breakdown=True)
    fr, p4 = sign_eps_fr(gamma, roots, breakdown=True)
    return SignBundle(sr, er, et, fr, {"eps_sr": p1, "eps_r": p2, "e_tilde": p3, "eps_fr": p4})


# the toral cross-identity -------------------------------------------------------

@dataclass
class CrossIdentityReport:
    lhs: RootOfUnity
    rhs: RootOfUnity
    eps_sr: RootOfUnity
    e_tilde: RootOfUnity
    eps_fr: RootOfUnity
    constant: RootOfUnity
    delta: RootOfUnity
    depth: Fraction

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        return {k: str(getattr(self, k)) for k in ("lhs", "rhs", "eps_sr", "e_tilde", "eps_fr", "constant",
                                                    "delta", "depth")} | {"ok": self.ok}


def toral_depth(S: TameTorus, theta: TorusCharacter) -> Fraction:
    """Depth r of a toral generic character: every root has the same positive depth level."""
    levels = set(root_depth_levels(S, theta).values())
    if len(levels) != 1 or 0 in levels:
        raise ValidationError("character is not toral-generic: roots have differing or zero depth")
    return Fraction(levels.pop(), S.tower.e)


def cross_identity(S: TameTorus, theta: TorusCharacter, gamma: TorusPoint, scale: int = 1,
                   rng: random.Random | None = None) -> CrossIdentityReport:
    """eps_sr * e_tilde against eps_fr * e(G) eps_L * Delta_II^abs[a, chi'] at a regular gamma of depth < r."""
    grd = _grd(S)
    r = toral_depth(S, theta)
    if not is_regular(gamma):
        raise ValidationError("gamma is not regular")
    for al in grd.rd.roots:
        if root_value(gamma, al).__sub__(S.tower.one()).ord >= r:
            raise ValidationError("gamma is not of depth below r on every root")
    moda = mod_a_from_theta(S, theta, scale)
    moda.check_invariants()
    chi = chi_data(S, moda, "chi'", scale)
    sr = sign_eps_sr(gamma, r, moda.abar, scale=scale)
    if rng is not None:
        sr2 = sign_eps_sr(gamma, r, moda.abar, scale=scale, rng=rng)
        if sr2 != sr:
            raise InvariantViolation("eps_sr depends on the choice of w_alpha")
    et = sign_e_tilde(gamma, r)
    fr = sign_eps_fr(gamma)
    const = weil_constant(grd, scale)
    delta = delta_II_abs(gamma, moda.abar, chi)
    return CrossIdentityReport(sr * et, fr * const * delta, sr, et, fr, const, delta, r)


# identities of Delta_II^abs ---------------------------------------------------

def rescaling_identity(gamma: TorusPoint, a: dict, chi: ChiData, b: dict) -> tuple[RootOfUnity, RootOfUnity]:
    """Delta[b a, chi](gamma) and Delta[a, chi](gamma) * prod kappa_alpha(b_alpha) over symmetric orbits."""
    grd = chi.grd
    ba = {r: b[r] * x for r, x in a.items()}
    lhs = delta_II_abs(gamma, ba, chi)
    rhs = delta_II_abs(gamma, a, chi)
    live = set(regular_roots(gamma))
    for r in grd.gamma_orbit_reps():
        if root_fields(grd, r).info.symmetric and r in live:
            rhs = rhs * kappa(grd, r, b[r])
    return lhs, rhs


def zeta_identity(gamma: TorusPoint, a: dict, chi: ChiData, zeta: ChiData) -> tuple[RootOfUnity, RootOfUnity]:
    """Delta[a, zeta chi](gamma) and Delta[a, chi](gamma) * zeta_T(gamma)."""
    lhs = delta_II_abs(gamma, a, chi.times(zeta))
    return lhs, delta_II_abs(gamma, a, chi) * zeta_T(chi.grd, zeta, gamma)


def split_identity(low: TorusPoint, high: TorusPoint, a: dict, chi: ChiData) -> tuple[RootOfUnity, RootOfUnity]:
    """Delta^G(low high) and Delta^G(low) Delta^J(high), J the roots killing ``low``."""
    grd = chi.grd
    one = low.torus.tower.one()
    J = [r for r in grd.rd.roots if (root_value(low, r) - one).is_zero()]
    lhs = delta_II_abs(low * high, a, chi)
    rhs = delta_II_abs(low, a, chi) * (delta_II_abs(high, a, chi, roots=J) if J else ONE)
    return lhs, rhs


def valuation_split_ok(low: TorusPoint, high: TorusPoint, k0: int) -> bool:
    """ord(alpha(low) - 1) < r <= ord(alpha(high) - 1) for every root (r = k0 / e)."""
    grd = _grd(low.torus)
    one = low.torus.tower.one()
    for r in grd.rd.roots:
        x = root_value(low, r) - one
        if not x.is_zero() and x.val >= k0:
            return False
        y = root_value(high, r) - one
        if not y.is_zero() and y.val < k0:
            return False
    return True


def lift_independence(gamma: TorusPoint, moda: ModAData, chi: ChiData, rng: random.Random) -> tuple:
    """Delta at two random lifts of the mod-a-data."""
    return delta_II_abs(gamma, moda.lift(rng), chi), delta_II_abs(gamma, moda.lift(rng), chi)




__all__ = [
    "ChiData", "Coset", "CrossIdentityReport", "ModAData", "SL2Realization", "SignBundle", "TameCharacter",
    "as_root_of_unity", "chi_data", "chi_from_mod_a", "cross_identity", "delta_II_abs", "eps_L_product",
    "is_regular", "kappa", "langlands_constant", "mod_a_from_theta", "ord_x", "ordx_sl2_oracle",
    "random_a_data", "random_b_data", "random_chi_data", "random_zeta_data", "regular_roots",
    "root_langlands_constant", "root_value", "sign_bundle", "sign_e_tilde", "sign_eps_fr", "sign_eps_r",
    "sign_eps_sr", "solve_abar", "standard_sl2_realizations", "toral_depth", "weil_constant", "zeta_T",
    "lift_independence", "rescaling_identity", "split_identity", "valuation_split_ok",
    "sl2_realization_info", "zeta_identity", "ONE", "MINUS_ONE",
]
