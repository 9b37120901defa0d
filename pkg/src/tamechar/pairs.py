"""Root filtrations, the regular-pair classifier and Howe factorizations."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .abelian import (
    SubspaceModP,
    integer_kernel,
    kernel_mod_p,
    rational_rank,
    smith_normal_form,
    span_basis_mod_p,
    transpose,
)
from .errors import InvariantViolation, ValidationError
from .root_data import GaloisRootDatum, levi_closure_check, mat_key
from .tori import TameTorus, TorusCharacter, char_compose_coroot, coroot_tame_norms, depth_zero_regularity


def _grd(S: TameTorus) -> GaloisRootDatum:
    if S.grd is None:
        raise ValidationError("torus has no root datum attached")
    return S.grd


def root_depth_levels(S: TameTorus, theta: TorusCharacter) -> dict:
    """Root -> largest u-level where theta o N o coroot is nontrivial (0 if none)."""
    grd = _grd(S)
    out = {}
    cache = {}
    for r, c in zip(grd.rd.roots, grd.rd.coroots):
        key = tuple(c)
        if key not in cache:
            lvl = 0
            for k in sorted(S.wild, reverse=True):
                if any(char_compose_coroot(theta, c, k)):
                    lvl = k
                    break
            cache[key] = lvl
        out[r] = cache[key]
    return out


@dataclass
class RootFiltration:
    """R_r for all r, via the depth level of each root."""

    e: int
    depth_levels: dict  # root -> u-level

    def R(self, r) -> list:
        """Roots alpha with theta o N o alpha^vee trivial on E_r^x."""
        r = Fraction(r)
        k0 = -((-r.numerator * self.e) // r.denominator)
        if r == 0:
            return []
        return [a for a, lvl in self.depth_levels.items() if lvl < k0]

    def R_plus(self, r) -> list:
        """R_{r+}: roots whose depth level is at most e r."""
        r = Fraction(r)
        return [a for a, lvl in self.depth_levels.items() if Fraction(lvl, self.e) <= r]

    @property
    def break_levels(self) -> list:
        return sorted({lvl for lvl in self.depth_levels.values() if lvl > 0})

    @property
    def breaks(self) -> list:
        return [Fraction(k, self.e) for k in self.break_levels]


def root_filtration(S: TameTorus, theta: TorusCharacter) -> RootFiltration:
    rf = RootFiltration(S.tower.e, root_depth_levels(S, theta))
    rd = _grd(S).rd
    for k in [0] + rf.break_levels:
        sub = rf.R_plus(Fraction(k, S.tower.e))
        if not levi_closure_check(rd, sub):
            raise InvariantViolation(f"R_r at level {k} is not a Levi subsystem")
    return rf


# classifier -----------------------------------------------------------------

@dataclass
class RegularPairReport:
    verdict: str  # "extra-regular", "regular" or "not-a-valid-pair"
    elliptic: bool
    R0plus: list
    positive_system: list | None
    stabilizer: list
    breaks: list
    reasons: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "elliptic": self.elliptic,
            "R0plus": [list(r) for r in self.R0plus],
            "inertia_positive_system": None if self.positive_system is None else [list(r) for r in
                                                                                 self.positive_system],
            "stabilizer_order": len(self.stabilizer),
            "stabilizer": [[list(row) for row in w] for w in self.stabilizer],
            "breaks": [str(b) for b in self.breaks],
            "reasons": list(self.reasons),
        }


def classify_pair(S: TameTorus, theta: TorusCharacter) -> RegularPairReport:
    """Tame elliptic (extra-)regularity of (S, theta).

    The rational Weyl group of R_{0+} stands in for N(S, G^0)(F)/S(F), so a
    trivial stabilizer gives the extra-regular verdict, which implies regular.
    """
    grd = _grd(S)
    rf = root_filtration(S, theta)
    R0 = rf.R_plus(0)
    reasons = []
    elliptic = grd.is_elliptic()
    if not elliptic:
        reasons.append("torus is not elliptic")
    pos = grd.inertia_positive_system(R0)
    if pos is None:
        reasons.append("inertia preserves no positive system of R_0+")
    idx = [grd.rd.index(r) for r in R0]
    weyl = grd.rd.subsystem_weyl_group(idx)
    _, stab = depth_zero_regularity(theta, weyl)
    if len(stab) > 1:
        reasons.append(f"theta on S(F)_0 has a stabilizer of order {len(stab)}")
    verdict = "extra-regular" if not reasons else "not-a-valid-pair"
    return RegularPairReport(verdict, elliptic, R0, None if pos is None else sorted(pos), stab, rf.breaks, reasons)


# Howe factorization ---------------------------------------------------------

def fundamental_group_order(rd) -> int:
    """|pi_1(G_der)| = index of the coroot lattice in its saturation in X_*."""
    cor = [list(c) for c in rd.coroots]
    if not cor:
        return 1
    U, D, V = smith_normal_form(transpose(cor))
    out = 1
    for i in range(min(len(D), len(D[0]))):
        if D[i][i]:
            out *= D[i][i]
    return out


@dataclass
class HoweTower:
    levis: list  # root lists R(S, G^0) c ... c R(S, G^d)
    depths: list  # r_0, ..., r_d (r_d = r_{d-1} iff phi_d trivial)
    phis: list  # phi_{-1}, phi_0, ..., phi_d
    kernels: list = field(repr=False, default_factory=list)

    @property
    def d(self) -> int:
        return len(self.levis) - 1

    def phi(self, i: int) -> TorusCharacter:
        return self.phis[i + 1]

    def product(self) -> TorusCharacter:
        out = self.phis[0]
        for ph in self.phis[1:]:
            out = out * ph
        return out

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "depths": [str(r) for r in self.depths],
            "levis": [[list(r) for r in L] for L in self.levis],
            "phis": {str(i - 1): ph.to_json() for i, ph in enumerate(self.phis)},
        }


@dataclass
class _Kernel:
    tame: list  # tame coordinate vectors
    wild: dict  # level -> list of W_k coordinate vectors spanning K_i at that level


def levi_kernel(S: TameTorus, roots) -> _Kernel:
    """Subgroup of S(F) generated by norms of coroots of the given roots."""
    grd = _grd(S)
    cor = sorted({grd.rd.coroot(r) for r in roots})
    tame = coroot_tame_norms(S, cor) if cor else []
    wild = {}
    T = S.tower
    for k, W in S.wild.items():
        vecs = []
        Nm = S.norm_wild_matrix(k)
        for c in cor:
            for b in range(S.d):
                v = S.wild_vector(c, T.p**b)
                img = [sum(x * y for x, y in zip(row, v)) % T.p for row in Nm]
                vecs.append(W.coords(img))
        wild[k] = span_basis_mod_p(vecs, T.p) if vecs else []
    return _Kernel(tame, wild)


def _kills(vals, vectors, p) -> bool:
    return all(sum(a * b for a, b in zip(vals, v)) % p == 0 for v in vectors)


def _random_functional_vanishing(vectors, dim: int, p: int, rng: random.Random):
    if not vectors:
        return [rng.randrange(p) for _ in range(dim)]
    basis = kernel_mod_p([list(v) for v in vectors], dim, p)
    out = [0] * dim
    for b in basis:
        c = rng.randrange(p)
        out = [(x + c * y) % p for x, y in zip(out, b)]
    return out


def howe_factorize(S: TameTorus, theta: TorusCharacter, seed: int | None = None) -> HoweTower:
    """Howe factorization of theta along the twisted Levi tower of its root filtration.

    With ``seed`` None every free extension choice is the trivial one; with
    a seed, characters below each band are random among the admissible ones.
    """
    grd = _grd(S)
    pi1 = fundamental_group_order(grd.rd)
    if pi1 % S.tower.p == 0:
        raise ValidationError(f"p = {S.tower.p} divides |pi_1(G_der)| = {pi1}")
    rng = random.Random(seed) if seed is not None else None
    rf = root_filtration(S, theta)
    L = rf.break_levels  # L_0 < ... < L_{d-1}
    d = len(L)
    e = S.tower.e
    levis = [rf.R_plus(0)] + [rf.R_plus(Fraction(L[i], e)) for i in range(d)]
    top = theta.depth_level
    phi_d_nontrivial = top > (L[-1] if L else 0)
    upper = L + [top if phi_d_nontrivial else (L[-1] if L else 0)]
    depths = [Fraction(x, e) for x in upper]
    kernels = [levi_kernel(S, R) for R in levis]
    p = S.tower.p
    cur = theta
    phis = [None] * (d + 1)
    for i in range(d, -1, -1):
        K = kernels[i]
        lower = L[i - 1] if i > 0 else 0
        hi = upper[i]
        if i == d and not phi_d_nontrivial:
            phis[i] = S.trivial_character()
            continue
        if i == 0 and not levis[0]:
            # G^0 = S: phi_0 takes all of theta_0
            phis[0] = cur
            cur = cur / cur
            continue
        wild = {}
        for k, W in S.wild.items():
            if lower < k <= hi:
                vals = list(cur.level(k))
                if not _kills(vals, K.wild.get(k, []), p):
                    raise InvariantViolation(f"theta_{i} at level {k} is not trivial on the Levi kernel")
                wild[k] = vals
            elif k <= lower and rng is not None:
                wild[k] = _random_functional_vanishing(K.wild.get(k, []), W.dim, p, rng)
        tame = S.tame_character_vanishing(K.tame, rng)
        ph = S.character(tame, wild)
        for v in K.tame:
            if sum(x * c for x, c in zip(ph.tame, v)) % 1:
                raise InvariantViolation("tame extension does not kill the Levi kernel")
        phis[i] = ph
        cur = cur / ph
        expected = L[i - 1] if i > 0 else 0
        if cur.depth_level > expected:
            raise InvariantViolation(f"depth of theta_{i - 1} is {cur.depth_level}, expected at most {expected}")
    tower = HoweTower(levis, depths, [cur] + phis, kernels)
    if tower.product() != theta:
        raise InvariantViolation("product of the factorization differs from theta")
    return tower


def genericity_check(S: TameTorus, phi: TorusCharacter, level: int, inner, outer) -> bool:
    """phi o N o alpha^vee is nontrivial at ``level`` for all outer roots and phi kills the inner kernel."""
    grd = _grd(S)
    if level not in S.wild:
        return not outer
    for r in outer:
        if not any(char_compose_coroot(phi, grd.rd.coroot(r), level)):
            return False
    K = levi_kernel(S, inner)
    p = S.tower.p
    for k in S.wild:
        if not _kills(list(phi.level(k)), K.wild.get(k, []), p):
            return False
    return True


def tower_is_valid(S: TameTorus, theta: TorusCharacter, tower: HoweTower) -> bool:
    """Product, depth and genericity conditions of a Howe factorization."""
    if tower.product() != theta:
        return False
    e = S.tower.e
    for i in range(tower.d):
        ph = tower.phi(i)
        if ph.depth != tower.depths[i]:
            return False
        lvl = int(tower.depths[i] * e)
        outer = [r for r in tower.levis[i + 1] if r not in tower.levis[i]]
        if not genericity_check(S, ph, lvl, tower.levis[i], outer):
            return False
    if tower.d > 0 and tower.phi(tower.d).is_trivial() != (tower.depths[-1] == tower.depths[-2]):
        return False
    if not tower.levis[0] and not tower.phi(-1).is_trivial():
        return False
    return True


def refactorization_check(S: TameTorus, a: HoweTower, b: HoweTower) -> bool:
    """F0-F2 for two factorizations of the same pair.

    chi_i = prod_{j >= i} phi_j / phi'_j must kill the Levi kernel of G^i
    (F0), have depth at most r_{i-1} (F1), and phi'_{-1} = phi_{-1} chi_0 (F2).
    """
    if [sorted(x) for x in a.levis] != [sorted(x) for x in b.levis] or a.depths != b.depths:
        return False
    if a.product() != b.product():
        return False
    d = a.d
    e = S.tower.e
    p = S.tower.p
    chi = S.trivial_character()
    for i in range(d, -1, -1):
        chi = chi * a.phi(i) / b.phi(i)
        K = levi_kernel(S, a.levis[i])
        for k in S.wild:
            if not _kills(list(chi.level(k)), K.wild.get(k, []), p):
                return False
        for v in K.tame:
            if sum(x * c for x, c in zip(chi.tame, v)) % 1:
                return False
        bound = a.depths[i - 1] if i > 0 else Fraction(0)
        if Fraction(chi.depth_level, e) > bound:
            return False
    return b.phi(-1) == a.phi(-1) * chi


# GL_N admissibility oracle ----------------------------------------------------

def _group_generators(elements, mul, one):
    """Greedy generating set of a finite abelian group given by its element list."""
    elements = list(elements)
    span = {one}
    gens = []
    for x in elements:
        if x in span:
            continue
        gens.append(x)
        layer = span
        while True:
            layer = {mul(y, x) for y in layer} - span
            if not layer:
                break
            span = span | layer
    if span != set(elements):
        raise InvariantViolation("kernel elements do not form a group")
    return gens


class GLNAdmissibilityOracle:
    """Classical admissibility for characters of K^x with [K:F] = N, K the top of the tower.

    A character theta of K^x / U_K^n is admissible unless it factors through
    the norm to a proper subfield L, or its restriction to U_K^1 factors
    through the norm to a subfield L with K/L ramified.  The kernels of the
    truncated norm maps are found by enumerating O_K^x / U_K^n.
    """

    def __init__(self, tower, n_levels: int):
        from .local_field import all_units_mod

        T = tower
        self.tower = T
        if T.e * T.f > 3:
            raise ValidationError("the oracle supports [K:F] <= 3 only")
        self.K = T.top
        self.bound = n_levels
        self.subfields = [T.subfield(H) for H in T.all_subgroups() if len(H) > 1]
        units = list(all_units_mod(self.K, n_levels))
        self.units = units
        self.kernels = []
        mul = lambda x, y: (x * y).with_prec(n_levels)
        one = T.one().with_prec(n_levels)
        for L in self.subfields:
            ker_all, ker_u1 = [], []
            for x in units:
                nx = L.norm_from(self.K, x)
                if _is_one_mod(nx, n_levels):
                    ker_all.append(x)
                    if x.coeff(0) == 1:
                        ker_u1.append(x)
            ramified = L.e < self.K.e
            self.kernels.append((L, ramified, _group_generators(ker_all, mul, one),
                                 _group_generators(ker_u1, mul, one)))

    def verdict(self, theta_K) -> str:
        """``theta_K`` maps a unit FieldElt of K to an exponent in Q/Z."""
        for L, ramified, gens_all, gens_u1 in self.kernels:
            if all(theta_K(x) == 0 for x in gens_all):
                return "not"
            if ramified and all(theta_K(x) == 0 for x in gens_u1):
                return "not"
        return "admissible"


def gln_admissibility_oracle(N: int, tower, theta_K, n_levels: int) -> str:
    """Admissible / not for a character of the degree-N extension at the top of ``tower``."""
    if tower.e * tower.f != N or N > 3:
        raise ValidationError("unsupported N for the admissibility oracle")
    return GLNAdmissibilityOracle(tower, n_levels).verdict(theta_K)


def _is_one_mod(x, bound: int) -> bool:
    """x == 1 modulo u^bound."""
    return x.coeff(0) == 1 and all(x.coeff(k) == 0 for k in range(1, bound))


@dataclass
class GLNEquivalenceReport:
    q: int
    e: int
    f: int
    total: int
    regular: int
    admissible: int
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {"q": self.q, "e": self.e, "f": self.f, "characters": self.total, "regular": self.regular,
                "admissible": self.admissible, "mismatches": len(self.mismatches), "equal": self.ok}


def gln_equivalence(q: int, e: int, f: int, N: int = 3) -> GLNEquivalenceReport:
    """Regular pairs against admissible characters for GL_{ef}, all characters of the truncated torus.

    Characters of K^x are transported to S(F) along x -> (s(x))_s; the free
    tame direction (the value on u) is held at 0, which neither notion sees.
    """
    from itertools import product as iproduct

    from .catalog import gl_induced

    S = gl_induced(q, e, f, N)
    T = S.tower
    oracle = GLNAdmissibilityOracle(T, N)
    G = T.galois_group
    gens = []
    for _, _, ga, gu in oracle.kernels:
        gens += ga + gu
    pts = {x: S.point_from_field([x.galois(g) for g in G]) for x in gens}
    orders = S.tame.orders
    ranges = [range(o) if o else range(1) for o in orders]
    levels = sorted(S.wild)
    total = reg = adm = 0
    bad = []
    for tc in iproduct(*ranges):
        tame = [Fraction(c, o) if o else 0 for c, o in zip(tc, orders)]
        for wv in iproduct(*[iproduct(range(T.p), repeat=S.wild[k].dim) for k in levels]):
            th = S.character(tame, dict(zip(levels, wv)))
            v1 = classify_pair(S, th).verdict != "not-a-valid-pair"
            v2 = oracle.verdict(lambda x: th.exponent(pts[x])) == "admissible"
            total += 1
            reg += v1
            adm += v2
            if v1 != v2:
                bad.append(th)
    return GLNEquivalenceReport(q, e, f, total, reg, adm, bad)
