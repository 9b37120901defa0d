"""Character values at shallow elements, the real comparison and the epsilon-product rank check."""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .abelian import identity, integer_inverse, matmul, rational_rank
from .cyclotomic import CycNum, RootOfUnity
from .errors import InvariantViolation, ValidationError
from .factor_calculus import (
    ONE,
    chi_data,
    delta_II_abs,
    eps_L_product,
    is_regular,
    mod_a_from_theta,
    regular_roots,
    root_value,
    sign_e_tilde,
    sign_eps_fr,
    sign_eps_r,
    sign_eps_sr,
    weil_constant,
)
from .local_field import TameTower
from .pairs import HoweTower, howe_factorize
from .root_data import GaloisRootDatum, RootDatum, fi_by_unitary_rule, mat_key, neg
from .tori import TameTorus, TorusCharacter, TorusPoint


def _grd(S: TameTorus) -> GaloisRootDatum:
    if S.grd is None:
        raise ValidationError("torus has no root datum attached")
    return S.grd


def rational_weyl_group(S: TameTorus) -> list:
    """Weyl elements commuting with the Galois action: N(S, G)(F) / S(F)."""
    return [w for w in _grd(S).rd.weyl_group if S.is_rational_weyl(w)]


def _cyc_sum(values) -> CycNum:
    acc = CycNum.zero()
    for v in values:
        acc = acc + (v.as_cyc() if isinstance(v, RootOfUnity) else v)
    return acc


# quasi-split form and ranks ---------------------------------------------------

def pinned_part(rd: RootDatum, a):
    """The pinned automorphism w^-1 a, w the Weyl element with w(R+) = a(R+)."""
    target = frozenset(rd.index(rd.act(a, rd.roots[i])) for i in rd.positive)
    for w in rd.weyl_group:
        if frozenset(rd.index(rd.act(w, rd.roots[i])) for i in rd.positive) == target:
            out = mat_key(matmul(integer_inverse(w), a))
            if not rd.is_pinned_automorphism(out):
                raise InvariantViolation("pinned projection does not preserve the base")
            return out
    raise InvariantViolation("automorphism does not map positive systems to positive systems")


def quasi_split_datum(grd: GaloisRootDatum) -> GaloisRootDatum:
    """The same tower acting through the pinned projections of tau and phi."""
    return GaloisRootDatum(grd.rd, grd.tower, pinned_part(grd.rd, grd.tau), pinned_part(grd.rd, grd.phi))


def ranks(grd: GaloisRootDatum, form_rank: int | None = None) -> tuple[int, int, int]:
    """(r_G, r_S, r_T): split ranks of the form, of S and of the quasi-split minimal Levi."""
    r_S = grd.invariant_cocharacter_rank()
    r_T = quasi_split_datum(grd).invariant_cocharacter_rank()
    return (r_T if form_rank is None else form_rank), r_S, r_T


# depth zero -------------------------------------------------------------------

def is_shallow(gamma: TorusPoint, toral: bool = False) -> bool:
    """gamma has no wild part, or (toral case) a wild part killed by every root."""
    if not gamma.wild:
        return True
    if not toral:
        return False
    one = gamma.torus.tower.one()
    w = gamma.wild_part()
    return all((root_value(w, r) - one).is_zero() for r in _grd(gamma.torus).rd.roots)


def char_depth_zero(S: TameTorus, theta: TorusCharacter, gamma: TorusPoint, form_rank: int | None = None) -> CycNum:
    """(-1)^(r_G - r_S) sum over rational Weyl elements of theta(gamma^w)."""
    if theta.depth_level:
        raise ValidationError("character is not of depth zero")
    if gamma.wild:
        raise ValidationError("element is not absolutely semisimple (it has a wild part)")
    if not is_regular(gamma):
        raise ValidationError("element is not regular")
    r_G, r_S, _ = ranks(_grd(S), form_rank)
    total = _cyc_sum(theta(gamma.weyl(w)) for w in rational_weyl_group(S))
    return total * (-1 if (r_G - r_S) % 2 else 1)


# shallow characters -------------------------------------------------------------

@dataclass
class CharTerm:
    weyl: tuple
    element: str
    delta: RootOfUnity
    theta: RootOfUnity
    theta_prime: RootOfUnity
    product: RootOfUnity

    def to_json(self) -> dict:
        return {"w": [list(r) for r in self.weyl], "element": self.element, "delta": str(self.delta),
                "theta": str(self.theta), "theta_prime": str(self.theta_prime), "product": str(self.product)}


@dataclass
class CharTableRow:
    element: str
    tame_coords: list
    terms: list
    constant: RootOfUnity
    total: CycNum
    N: int
    normalization: str = "Phi (|D|^(1/2) omitted)"

    def to_json(self) -> dict:
        return {"element": self.element, "tame_coords": [int(x) for x in self.tame_coords],
                "terms": [t.to_json() for t in self.terms], "constant": str(self.constant),
                "total": str(self.total), "total_float": _fmt_complex(self.total.embed_complex()),
                "N": self.N, "normalization": self.normalization}


def _fmt_complex(z: complex) -> str:
    re = 0.0 if abs(z.real) < 5e-13 else z.real
    im = 0.0 if abs(z.imag) < 5e-13 else z.imag
    return f"{re:.12g}{'+' if im >= 0 else '-'}{abs(im):.12g}i"


@dataclass
class ShallowData:
    """Howe tower, mod-a-data, chi'-data and leading constant shared by all elements."""

    torus: TameTorus
    theta: TorusCharacter
    tower: HoweTower
    moda: object
    chi: object
    constant: RootOfUnity
    scale: int = 1

    @property
    def toral(self) -> bool:
        return not self.tower.levis[0] and self.tower.d == 1

    def theta_prime(self, gamma: TorusPoint) -> RootOfUnity:
        return sign_eps_fr(gamma) * self.eps_r(gamma) * self.theta(gamma)

    def eps_r(self, gamma: TorusPoint) -> RootOfUnity:
        out = ONE
        levis = self.tower.levis
        for i in range(1, self.tower.d + 1):
            new = [r for r in levis[i] if r not in set(levis[i - 1])]
            if new:
                out = out * sign_eps_r(gamma, self.tower.depths[i - 1], roots=new)
        return out


def shallow_data(S: TameTorus, theta: TorusCharacter, scale: int = 1) -> ShallowData:
    tower = howe_factorize(S, theta)
    moda = mod_a_from_theta(S, theta, scale)
    moda.check_invariants()
    chi = chi_data(S, moda, "chi'", scale)
    return ShallowData(S, theta, tower, moda, chi, weil_constant(_grd(S), scale), scale)


def char_shallow(S: TameTorus, theta: TorusCharacter, gamma: TorusPoint, scale: int = 1,
                 data: ShallowData | None = None) -> CharTableRow:
    """constant * sum over rational w of Delta_II^abs[a, chi'](gamma^w) theta'(gamma^w)."""
    data = data or shallow_data(S, theta, scale)
    if not is_shallow(gamma, data.toral):
        raise ValidationError("element is not shallow")
    if not is_regular(gamma):
        raise ValidationError("element is not regular")
    terms = []
    for w in rational_weyl_group(S):
        gw = gamma.weyl(w)
        d = delta_II_abs(gw, data.moda.abar, data.chi)
        th = theta(gw)
        tp = data.theta_prime(gw)
        terms.append(CharTerm(w, str(gw), d, th, tp, d * tp))
    total = data.constant.as_cyc() * _cyc_sum(t.product for t in terms)
    return CharTableRow(str(gamma), list(gamma.tame_coords()), terms, data.constant, total, S.tower.N)


def char_shallow_via_signs(S: TameTorus, theta: TorusCharacter, gamma: TorusPoint, scale: int = 1,
                           data: ShallowData | None = None) -> CycNum:
    """Toral value assembled from eps_sr, e~ and eps^r: sum over w of their product with theta."""
    data = data or shallow_data(S, theta, scale)
    if not data.toral:
        raise ValidationError("the sign pipeline covers toral pairs only")
    if not is_regular(gamma):
        raise ValidationError("element is not regular")
    r = data.tower.depths[0]
    vals = []
    for w in rational_weyl_group(S):
        gw = gamma.weyl(w)
        s = sign_eps_sr(gw, r, data.moda.abar, scale=scale) * sign_e_tilde(gw, r) * data.eps_r(gw)
        vals.append(s * theta(gw))
    return _cyc_sum(vals)


def weyl_invariant_character(S: TameTorus, rng: random.Random) -> TorusCharacter:
    """A random depth-zero character invariant under the rational Weyl group (a Weyl norm)."""
    eta = S.random_character(rng, depth_level=0)
    out = S.trivial_character()
    for w in rational_weyl_group(S):
        out = out * eta.weyl_conjugate(w)
    return out


def shallow_elements(S: TameTorus, limit: int | None = None, lam_range: int = 0) -> list:
    """Regular elements of the tame part of S(F), in coordinate order.

    Free tame coordinates (u-powers of central cocharacters) run over
    -lam_range..lam_range.
    """
    from itertools import product as iproduct

    ranges = [range(o) if o else range(-lam_range, lam_range + 1) for o in S.tame.orders]
    out = []
    for coords in iproduct(*ranges):
        g = S.point_from_coords(list(coords))
        if is_regular(g):
            out.append(g)
            if limit and len(out) >= limit:
                break
    return out


# epsilon-product rank check --------------------------------------------------------

@dataclass
class DzeResult:
    name: str
    lhs: RootOfUnity
    rhs: RootOfUnity
    r_S: int
    r_T: int

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs

    def line(self) -> str:
        return f"LHS={self.lhs} RHS={self.rhs} {'OK' if self.ok else 'MISMATCH'}"


def dze_check(grd: GaloisRootDatum, scale: int = 1, name: str = "") -> DzeResult:
    """eps_L_product against (-1)^(r_S - r_T) for a maximally unramified elliptic torus."""
    if grd.inertia_positive_system() is None:
        raise ValidationError("torus is not maximally unramified: inertia preserves no positive system")
    if not grd.is_elliptic():
        raise ValidationError("torus is not elliptic")
    _, r_S, r_T = ranks(grd)
    lhs = eps_L_product(grd, scale)
    rhs = RootOfUnity.sign(-1 if (r_S - r_T) % 2 else 1)
    return DzeResult(name or grd.rd.name, lhs, rhs, r_S, r_T)


def _matrix_order(a, bound: int = 24):
    n = len(a)
    ident = mat_key(identity(n))
    cur = mat_key(a)
    for k in range(1, bound + 1):
        if cur == ident:
            return k
        cur = mat_key(matmul(cur, a))
    return None


def _fixed_rank(mats, n: int) -> int:
    rows = []
    for m in mats:
        rows.extend([[m[i][j] - (i == j) for j in range(n)] for i in range(n)])
    return n - rational_rank(rows)


def automorphism_group(rd: RootDatum) -> list:
    """W together with W sigma for the opposition involution sigma = -w_0 (when it is outer)."""
    w0 = max(rd.weyl_group, key=lambda w: sum(1 for i in rd.positive if rd.index(rd.act(w, rd.roots[i]))
                                                not in rd.positive))
    sigma = mat_key([[-x for x in row] for row in w0])
    out = list(rd.weyl_group)
    if sigma not in set(out):
        out += [mat_key(matmul(w, sigma)) for w in rd.weyl_group]
    return out


def maximally_unramified_elliptic_tori(types=(("A1", "sc"), ("A1", "ad"), ("A2", "sc"), ("A2", "ad"),
                                              ("C2", "sc"), ("C2", "ad"), ("A3", "sc"), ("A3", "ad")),
                                       qs=(3, 5, 7), max_field: int = 20000):
    """Yield (name, GaloisRootDatum) with fi from the unitary rule.

    Unramified tori: Frobenius any elliptic automorphism.  Ramified tori:
    inertia a pinned involution, Frobenius an elliptic automorphism commuting with it.
    """
    for typ, lat in types:
        rd = RootDatum.of_type(typ, lat)
        n = rd.rank
        auts = automorphism_group(rd)
        pinned = [a for a in auts if rd.is_pinned_automorphism(a) and a != mat_key(identity(n))]
        for q in qs:
            for phi in auts:
                f = _matrix_order(phi)
                if f is None or q**f > max_field or _fixed_rank([phi], n):
                    continue
                grd = GaloisRootDatum(rd, TameTower(q, 1, f, 2), phi=phi)
                grd.fi.update(fi_by_unitary_rule(grd))
                yield f"{typ}-{lat} q={q} phi={_mstr(phi)}", grd
            for tau in pinned:
                if _matrix_order(tau) != 2:
                    continue
                for phi in auts:
                    if mat_key(matmul(phi, tau)) != mat_key(matmul(tau, phi)):
                        continue
                    f = _matrix_order(phi)
                    if f is None or q**f > max_field or _fixed_rank([phi, tau], n):
                        continue
                    grd = GaloisRootDatum(rd, TameTower(q, 2, f, 2), tau=tau, phi=phi)
                    grd.fi.update(fi_by_unitary_rule(grd))
                    yield f"{typ}-{lat} q={q} tau={_mstr(tau)} phi={_mstr(phi)}", grd


def _mstr(a) -> str:
    return "[" + ",".join("[" + ",".join(map(str, r)) + "]" for r in a) + "]"


# real comparison ----------------------------------------------------------------

@dataclass(frozen=True)
class RealConfig:
    """A compact maximal torus of a real group of equal rank.

    ``weight`` is the character theta of S(R) on X^*; ``noncompact`` lists
    the roots (up to sign) that are noncompact imaginary.
    """

    name: str
    typ: str
    lattice: str
    weight: tuple
    noncompact: tuple = ()

    @property
    def rd(self) -> RootDatum:
        return RootDatum.of_type(self.typ, self.lattice)


REAL_CONFIGS = {
    "su2": RealConfig("SU(2)", "A1", "sc", (3,)),
    "su2-n2": RealConfig("SU(2) n=2", "A1", "sc", (2,)),
    "su2-boundary": RealConfig("SU(2) n=1", "A1", "sc", (1,)),
    "sl2r": RealConfig("SL2(R)", "A1", "sc", (3,), ((2,),)),
    "sl2r-boundary": RealConfig("SL2(R) n=1", "A1", "sc", (1,), ((2,),)),
    "su3": RealConfig("SU(3)", "A2", "sc", (2, 1)),
    "su21": RealConfig("SU(2,1)", "A2", "sc", (2, 1), ((1, 1),)),
}


def _real_setup(cfg: RealConfig):
    rd = cfg.rd
    nc = {tuple(r) for r in cfg.noncompact} | {neg(tuple(r)) for r in cfg.noncompact}
    for r in nc:
        rd.index(r)
    pos = [r for r, c in zip(rd.roots, rd.coroots) if sum(x * y for x, y in zip(cfg.weight, c)) > 0]
    if 2 * len(pos) != len(rd.roots):
        raise ValidationError("weight is singular: some coroot pairs to zero with it")
    compact_idx = [i for i, r in enumerate(rd.roots) if r not in nc]
    weyl = rd.subsystem_weyl_group(compact_idx) if compact_idx else [mat_key(identity(rd.rank))]
    return rd, nc, pos, weyl


def real_character_values(cfg: RealConfig, angles) -> tuple[complex, complex]:
    """(p-adic-shaped value, Harish-Chandra value) at the element with the given angle vector.

    Both are values of Theta: the first divides by |D(gamma)|^(1/2).
    """
    rd, nc, pos, weyl = _real_setup(cfg)

    def ev(chi, w):
        wc = matmul(w, [[x] for x in chi])
        return cmath.exp(1j * sum(a * row[0] for a, row in zip(angles, wc)))

    for r in rd.roots:
        if abs(ev(r, identity(rd.rank)) - 1) < 1e-6:
            raise ValidationError("element lies on a root hyperplane")
    # constant prod f(alpha) lambda^-1 with lambda = i, f = -1 on compact roots
    const = 1 + 0j
    for r in pos:
        const *= (1 if r in nc else -1) * (-1j)
    a = {r: sum(x * y for x, y in zip(cfg.weight, rd.coroot(r))) / (2j * math.pi) for r in pos}
    qG = sum(1 for r in pos if r in nc)
    padic = 0j
    hc = 0j
    for w in weyl:
        th = ev(cfg.weight, w)
        delta = 1 + 0j
        absD = 1.0
        denom = 1 + 0j
        for r in pos:
            x = ev(r, w)
            z = (x - 1) / a[r]
            delta *= z / abs(z)
            absD *= abs(x - 1)
            denom *= 1 - 1 / x
        padic += delta * th / absD
        hc += th / denom
    return const * padic, (-1) ** qG * hc


def char_real_compare(cfg: RealConfig, samples: int = 100, seed: int = 0) -> float:
    """Max |p-adic-shaped value - Harish-Chandra value| over random angles off the root hyperplanes."""
    rng = random.Random(seed)
    rd = cfg.rd
    worst = 0.0
    done = 0
    while done < samples:
        ang = [rng.uniform(0, 2 * math.pi) for _ in range(rd.rank)]
        try:
            a, b = real_character_values(cfg, ang)
        except ValidationError:
            continue
        worst = max(worst, abs(a - b))
        done += 1
    return worst


__all__ = [
    "CharTableRow", "CharTerm", "DzeResult", "REAL_CONFIGS", "RealConfig", "ShallowData", "automorphism_group",
    "char_depth_zero", "char_real_compare", "char_shallow", "char_shallow_via_signs", "dze_check",
    "is_shallow", "maximally_unramified_elliptic_tori", "pinned_part", "quasi_split_datum", "ranks",
    "rational_weyl_group", "real_character_values", "shallow_data", "shallow_elements",
    "weyl_invariant_character",
]
