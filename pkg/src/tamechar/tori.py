"""Rational points, Moy-Prasad filtrations and characters of tame tori.

A point of S(E) = X_* (x) E^x modulo U^N is a triple (lam, mu, wild):
lam in X_* records u-powers, mu in X_* (x) Z/M records powers of the fixed
generator g of k_E^x (M = |k_E^x|), and wild[k] in X_* (x) k_E records the
level-k part of the logarithm of the principal-unit factor.  The point is
lam(u) * mu(g) * exp(sum_k wild[k] u^k).

Galois acts on the tame part by (lam, mu) -> (A lam, q^j A mu + i (M/e) A lam)
for tau^i phi^j, since tau(u) = zeta_e u with zeta_e = g^(M/e).  On each wild
level it acts coefficientwise.  S(F) is the fixed subgroup: a finitely
generated abelian group (tame part) times F_p-spaces W_k (wild levels).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .abelian import (
    SubspaceModP,
    Subquotient,
    characters_vanishing_on,
    identity,
    integer_inverse,
    integer_kernel,
    intersect_subgroups,
    kernel_mod_p,
    kernel_subgroup,
    matmul,
    matvec,
    solve_integer,
    subgroup_from_generators,
    subgroup_order,
    transpose,
)
from .cyclotomic import RootOfUnity
from .errors import TruncationError, ValidationError
from .local_field import FieldElt, TameTower
from .root_data import GaloisRootDatum, dual_action, mat_key, mat_pow


def _kron(a, b, p):
    na, nb = len(a), len(b)
    return [[(a[i // nb][j // nb] * b[i % nb][j % nb]) % p for j in range(na * nb)] for i in range(na * nb)]


def ceil_level(r, e: int) -> int:
    """Smallest u-exponent k with k / e >= r."""
    r = Fraction(r)
    return -((-r.numerator * e) // r.denominator)


class TameTorus:
    """A torus split over the tower, given by its Galois action on X_*.

    ``tau`` and ``phi`` are integer matrices acting on cocharacters.
    """

    def __init__(self, tower: TameTower, tau, phi, grd: GaloisRootDatum | None = None, name: str = ""):
        self.tower = tower
        self.n = len(tau)
        self.tau = mat_key(tau)
        self.phi = mat_key(phi)
        self.grd = grd
        self.name = name
        n, e, f, q = self.n, tower.e, tower.f, tower.q
        ident = mat_key(identity(n))
        if mat_key(mat_pow(self.tau, e)) != ident or mat_key(mat_pow(self.phi, f)) != ident:
            raise ValidationError("torus action does not factor through Gal(E/F)")
        lhs = matmul(matmul(self.phi, self.tau), integer_inverse(self.phi))
        if mat_key(lhs) != mat_key(mat_pow(self.tau, q % e)):
            raise ValidationError("torus action violates phi tau phi^-1 = tau^q")
        self.M = tower.Q - 1
        self.d = tower.k.n
        self._mats = {}
        for s in tower.galois_group:
            i, j = s
            self._mats[s] = mat_key(matmul(mat_pow(self.tau, i), mat_pow(self.phi, j)))
        self._norm_cache = {}

    @classmethod
    def from_root_datum(cls, grd: GaloisRootDatum, name: str = "") -> "TameTorus":
        return cls(grd.tower, grd.dual_matrix(grd.tower.tau), grd.dual_matrix(grd.tower.phi), grd, name)

    def __repr__(self):
        return f"TameTorus({self.name or 'rank %d' % self.n}, {self.tower!r})"

    def cochar_matrix(self, s):
        return self._mats[s]

    # tame part --------------------------------------------------------
    def tame_matrix(self, s):
        """Integer matrix of s on Z^n x (Z/M)^n."""
        A = self._mats[s]
        i, j = s
        n, M, e = self.n, self.M, self.tower.e
        qj = self.tower.q**j
        top = [list(A[r]) + [0] * n for r in range(n)]
        bot = [[i * (M // e) * A[r][c] for c in range(n)] + [qj * A[r][c] for c in range(n)] for r in range(n)]
        return top + bot

    @cached_property
    def tame_relations(self):
        n = self.n
        return tuple(tuple(self.M * int(c == n + r) for c in range(2 * n)) for r in range(n))

    def _fixed_hom(self):
        rows = []
        for s in (self.tower.tau, self.tower.phi):
            m = self.tame_matrix(s)
            rows.extend([[m[a][b] - (a == b) for b in range(2 * self.n)] for a in range(2 * self.n)])
        return rows

    @cached_property
    def tame(self) -> Subquotient:
        """The tame part of S(F): fixed points in Z^n x (Z/M)^n."""
        rel = [list(r) for r in self.tame_relations]
        dst_rel = [list(r) + [0] * (2 * self.n) for r in rel] + [[0] * (2 * self.n) + list(r) for r in rel]
        return kernel_subgroup(self._fixed_hom(), rel, dst_rel, 2 * self.n)

    @cached_property
    def inertia_fixed_cochars(self):
        """Z-basis of X_*^tau."""
        n = self.n
        rows = [[self.tau[a][b] - (a == b) for b in range(n)] for a in range(n)]
        return integer_kernel(rows, n)

    @cached_property
    def tame_zero(self) -> Subquotient:
        """Tame part of S(F)_0: lam = 0 and mu in the image of X_*^tau."""
        n = self.n
        rel = [list(r) for r in self.tame_relations]
        gens = [[0] * n + list(v) for v in self.inertia_fixed_cochars]
        image = subgroup_from_generators(gens, rel, 2 * n)
        return intersect_subgroups(self.tame, image)

    def norm_tame(self, v):
        out = [0] * (2 * self.n)
        for s in self.tower.galois_group:
            w = matvec(self.tame_matrix(s), v)
            out = [a + b for a, b in zip(out, w)]
        return self.reduce_tame(out)

    def reduce_tame(self, v):
        n = self.n
        return tuple(list(v[:n]) + [x % self.M for x in v[n:]])

    # wild part --------------------------------------------------------
    def wild_matrix(self, s, k: int):
        return _kron(self._mats[s], self.tower.coeff_matrix(s, k), self.tower.p)

    @cached_property
    def wild(self) -> dict:
        """Level k (1 <= k < N) -> SubspaceModP of fixed vectors (only nonzero levels)."""
        out = {}
        p = self.tower.p
        dim = self.n * self.d
        for k in range(1, self.tower.N):
            rows = []
            for s in (self.tower.tau, self.tower.phi):
                m = self.wild_matrix(s, k)
                rows.extend([[m[a][b] - (a == b) for b in range(dim)] for a in range(dim)])
            basis = kernel_mod_p(rows, dim, p)
            if basis:
                out[k] = SubspaceModP(basis, dim, p)
        return out

    def norm_wild_matrix(self, k: int):
        if k in self._norm_cache:
            return self._norm_cache[k]
        p = self.tower.p
        dim = self.n * self.d
        acc = [[0] * dim for _ in range(dim)]
        for s in self.tower.galois_group:
            m = self.wild_matrix(s, k)
            acc = [[(x + y) % p for x, y in zip(r1, r2)] for r1, r2 in zip(acc, m)]
        self._norm_cache[k] = acc
        return acc

    def wild_vector(self, cochar, c: int):
        """Ambient level vector of cochar (x) c, c in k_E."""
        digits = self.tower.k.digits(c)
        p = self.tower.p
        return [(cochar[i] * digits[b]) % p for i in range(self.n) for b in range(self.d)]

    # filtration -------------------------------------------------------
    def levels_at_least(self, r):
        """Wild levels of S(F)_r for r > 0."""
        k0 = max(1, ceil_level(r, self.tower.e))
        return [k for k in sorted(self.wild) if k >= k0]

    def mp_filtration(self, r):
        """Description of S(F)_r: (tame subgroup or None, list of wild levels)."""
        r = Fraction(r)
        if r < 0:
            raise ValidationError("filtration index must be non-negative")
        if r > Fraction(self.tower.N - 1, self.tower.e):
            raise TruncationError(f"depth {r} is beyond the truncation window",
                                  required_n=ceil_level(r, self.tower.e) + 1)
        if r == 0:
            return self.tame_zero, sorted(self.wild)
        return None, self.levels_at_least(r)

    def jumps(self):
        """Depths r > 0 at which S(F)_r jumps, within the window."""
        return [Fraction(k, self.tower.e) for k in sorted(self.wild)]

    # subtori ----------------------------------------------------------
    def maximal_unramified_subtorus(self) -> tuple["TameTorus", list]:
        """S' with X_*(S') = X_*^tau, and the inclusion matrix (columns = basis)."""
        B = self.inertia_fixed_cochars
        n2 = len(B)
        Bm = transpose(B)  # n x n2
        if n2 == 0:
            return TameTorus(self.tower, [], [], name="trivial"), Bm

        def restrict(A):
            cols = []
            for b in B:
                img = matvec(A, b)
                c = solve_integer(Bm, img)
                if c is None:
                    raise AssertionError("X_*^tau is not stable")
                cols.append(c)
            return transpose(cols)

        phi2 = restrict(self.phi)
        tau2 = identity(n2)
        return TameTorus(self.tower, tau2, phi2, name=f"{self.name}-unramified-part"), Bm

    # points -----------------------------------------------------------
    def point(self, lam, mu, wild=None) -> "TorusPoint":
        wild = wild or {}
        p = self.tower.p
        w = tuple(sorted((k, tuple(x % p for x in v)) for k, v in wild.items() if any(x % p for x in v)))
        return TorusPoint(self, tuple(lam), tuple(x % self.M for x in mu), w)

    def identity_point(self) -> "TorusPoint":
        return self.point([0] * self.n, [0] * self.n)

    def point_from_coords(self, tame_coords, wild_coords=None) -> "TorusPoint":
        v = self.tame.element(tame_coords)
        wild = {}
        for k, c in (wild_coords or {}).items():
            wild[k] = self.wild[k].element(c)
        n = self.n
        return self.point(v[:n], v[n:], wild)

    def point_from_field(self, xs) -> "TorusPoint":
        """Point with coordinate i equal to the FieldElt xs[i] in X_* (x) E^x."""
        basis = [[int(i == j) for j in range(self.n)] for i in range(self.n)]
        return self.point_from_tensor(list(zip(basis, xs)))

    def point_from_tensor(self, pairs, check: bool = True) -> "TorusPoint":
        """The product of cochar (x) x over (cochar, FieldElt) pairs."""
        T = self.tower
        lam, mu = [0] * self.n, [0] * self.n
        wild = {}
        for v, x in pairs:
            val, c, unit = x.unit_part()
            lc = T.k.log(c)
            for i in range(self.n):
                lam[i] += v[i] * val
                mu[i] += v[i] * lc
            logu = T.log_series(unit.with_prec(min(unit.prec, T.N)))
            for k, cc in logu.terms:
                if k >= T.N:
                    continue
                vec = wild.setdefault(k, [0] * (self.n * self.d))
                ds = T.k.digits(cc)
                for i in range(self.n):
                    if v[i]:
                        for b in range(self.d):
                            vec[i * self.d + b] += v[i] * ds[b]
        pt = self.point(lam, mu, wild)
        if check and not pt.is_rational():
            raise ValidationError("field vector is not a rational point")
        return pt

    def norm_point(self, cochar, x: FieldElt, H) -> "TorusPoint":
        """N_{K/F}(cochar (x) x) where K = E^H fixes both cochar and x."""
        T = self.tower
        reps = T.base.coset_reps(T.subfield(H))
        pairs = [(matvec(self._mats[s], cochar), x.galois(s)) for s in reps]
        return self.point_from_tensor(pairs)

    def generators(self):
        """Generators of S(F) mod truncation: tame generators, then wild basis vectors."""
        out = []
        for i in range(len(self.tame.gens)):
            c = [0] * len(self.tame.gens)
            c[i] = 1
            out.append(self.point_from_coords(c))
        for k, W in sorted(self.wild.items()):
            for b in W.basis:
                out.append(self.point([0] * self.n, [0] * self.n, {k: b}))
        return out

    def random_point(self, rng: random.Random, max_level: int | None = None, tame: bool = True,
                     lam_range: int = 0) -> "TorusPoint":
        coords = []
        if tame:
            for o in self.tame.orders:
                coords.append(rng.randrange(o) if o else rng.randint(-lam_range, lam_range))
        else:
            coords = [0] * len(self.tame.orders)
        wild = {}
        for k, W in self.wild.items():
            if max_level is not None and k > max_level:
                continue
            wild[k] = [rng.randrange(self.tower.p) for _ in range(W.dim)]
        return self.point_from_coords(coords, wild)

    # characters -------------------------------------------------------
    def character(self, tame, wild=None) -> "TorusCharacter":
        return TorusCharacter.make(self, tame, wild or {})

    def trivial_character(self) -> "TorusCharacter":
        return self.character([0] * len(self.tame.orders))

    def random_character(self, rng: random.Random, depth_level: int | None = None,
                         free_denominator: int = 6) -> "TorusCharacter":
        """Random character; wild levels above ``depth_level`` are zero."""
        tame = []
        for o in self.tame.orders:
            tame.append(Fraction(rng.randrange(o), o) if o else Fraction(rng.randrange(free_denominator),
                                                                          free_denominator))
        wild = {}
        for k, W in self.wild.items():
            if depth_level is not None and k > depth_level:
                continue
            wild[k] = [rng.randrange(self.tower.p) for _ in range(W.dim)]
        return self.character(tame, wild)

    def tame_character_vanishing(self, vectors, rng: random.Random | None, free_denominator: int = 6):
        """Tame exponents of a character killing the given tame coordinate vectors.

        With ``rng`` None returns the trivial one.
        """
        k = len(self.tame.orders)
        if rng is None:
            return [Fraction(0)] * k
        U, ds = characters_vanishing_on(list(self.tame.orders), vectors)
        chi = [Fraction(rng.randrange(d), d) if d else Fraction(rng.randrange(free_denominator), free_denominator)
               for d in ds]
        return [sum((U[j][i] * chi[j] for j in range(len(ds))), Fraction(0)) for i in range(k)]

    # Weyl action ------------------------------------------------------
    def is_rational_weyl(self, w) -> bool:
        """``w`` (matrix on X^*) commutes with the Galois action."""
        wd = dual_action(w)
        return all(mat_key(matmul(wd, self._mats[s])) == mat_key(matmul(self._mats[s], wd))
                   for s in (self.tower.tau, self.tower.phi))


@dataclass(frozen=True)
class TorusPoint:
    """A point lam(u) mu(g) exp(sum wild[k] u^k) of the truncated S(E)."""

    torus: TameTorus = field(compare=False, hash=False, repr=False)
    lam: tuple
    mu: tuple
    wild: tuple  # ((k, vector), ...) sorted, zero vectors dropped

    @property
    def wild_dict(self) -> dict:
        return dict(self.wild)

    def __mul__(self, other: "TorusPoint") -> "TorusPoint":
        S = self.torus
        wild = self.wild_dict
        for k, v in other.wild:
            wild[k] = [a + b for a, b in zip(wild.get(k, [0] * len(v)), v)]
        return S.point([a + b for a, b in zip(self.lam, other.lam)],
                       [a + b for a, b in zip(self.mu, other.mu)], wild)

    def inverse(self) -> "TorusPoint":
        return self.torus.point([-a for a in self.lam], [-a for a in self.mu],
                                {k: [-x for x in v] for k, v in self.wild})

    def __pow__(self, n: int) -> "TorusPoint":
        return self.torus.point([n * a for a in self.lam], [n * a for a in self.mu],
                                {k: [n * x for x in v] for k, v in self.wild})

    def galois(self, s) -> "TorusPoint":
        S = self.torus
        t = matvec(S.tame_matrix(s), list(self.lam) + list(self.mu))
        wild = {k: matvec(S.wild_matrix(s, k), v) for k, v in self.wild}
        return S.point(t[: S.n], t[S.n:], wild)

    def is_rational(self) -> bool:
        S = self.torus
        return all(self.galois(s) == self for s in (S.tower.tau, S.tower.phi))

    def tame_part(self) -> "TorusPoint":
        return self.torus.point(self.lam, self.mu)

    def wild_part(self) -> "TorusPoint":
        return self.torus.point([0] * self.torus.n, [0] * self.torus.n, self.wild_dict)

    def truncate_below(self, k0: int) -> "TorusPoint":
        """Drop wild levels >= k0."""
        return self.torus.point(self.lam, self.mu, {k: v for k, v in self.wild if k < k0})

    def split_at(self, k0: int) -> tuple["TorusPoint", "TorusPoint"]:
        """(part below level k0, part at levels >= k0); their product is self."""
        low = self.truncate_below(k0)
        S = self.torus
        high = S.point([0] * S.n, [0] * S.n, {k: v for k, v in self.wild if k >= k0})
        return low, high

    def weyl(self, w) -> "TorusPoint":
        """Image under the Weyl element with matrix ``w`` on X^*."""
        S = self.torus
        wd = dual_action(w)
        wild = {k: matvec(_kron(wd, identity(S.d), S.tower.p), v) for k, v in self.wild}
        return S.point(matvec(wd, self.lam), matvec(wd, self.mu), wild)

    def tame_coords(self):
        return self.torus.tame.coords(list(self.lam) + list(self.mu))

    def wild_coords(self, k: int):
        S = self.torus
        v = self.wild_dict.get(k)
        if v is None:
            return [0] * (S.wild[k].dim if k in S.wild else 0)
        if k not in S.wild:
            raise ValidationError("point is not rational")
        return S.wild[k].coords(v)

    def min_wild_level(self):
        return self.wild[0][0] if self.wild else None

    def character_value(self, chi) -> FieldElt:
        """chi(self) in E for a character chi in X^*."""
        S = self.torus
        T = S.tower
        a = sum(x * y for x, y in zip(chi, self.lam))
        b = sum(x * y for x, y in zip(chi, self.mu))
        terms = {}
        for k, v in self.wild:
            acc = 0
            for i in range(S.n):
                ci = chi[i] % T.p
                if ci:
                    c = T.k.from_digits(v[i * S.d:(i + 1) * S.d])
                    acc = T.k.add(acc, T.k.mul(ci, c))
            if acc:
                terms[k] = acc
        log_part = T.elt(terms)
        unit = T.exp_series(log_part) if terms else T.one()
        return T.elt({a: T.k.exp(b)}, T.N + a) * unit

    def __str__(self):
        w = ", ".join(f"{k}: {list(v)}" for k, v in self.wild)
        return f"lam={list(self.lam)} mu={list(self.mu)} wild={{{w}}}"


@dataclass(frozen=True)
class TorusCharacter:
    """A character of S(F) mod truncation.

    ``tame[i]`` is the exponent (in Q/Z) of the value on the i-th tame
    generator; ``wild[k]`` gives F_p values on the basis of W_k (value
    exponent c / p).
    """

    torus: TameTorus = field(compare=False, hash=False, repr=False)
    tame: tuple
    wild: tuple  # ((k, values), ...)

    @staticmethod
    def make(torus: TameTorus, tame, wild) -> "TorusCharacter":
        orders = torus.tame.orders
        if len(tame) != len(orders):
            raise ValidationError(f"expected {len(orders)} tame values, got {len(tame)}")
        t = []
        for x, o in zip(tame, orders):
            x = Fraction(x)
            if o:
                if (x * o).denominator != 1:
                    raise ValidationError(f"value {x} on a generator of order {o} is not an {o}-th root of unity")
                x = x - (x.numerator // x.denominator)
            t.append(x)
        p = torus.tower.p
        w = []
        for k, vals in sorted(dict(wild).items()):
            k = int(k)
            if k not in torus.wild:
                if any(int(v) % p for v in vals):
                    raise ValidationError(f"no rational points at level {k}")
                continue
            if len(vals) != torus.wild[k].dim:
                raise ValidationError(f"level {k} needs {torus.wild[k].dim} values")
            vals = tuple(int(v) % p for v in vals)
            if any(vals):
                w.append((k, vals))
        return TorusCharacter(torus, tuple(t), tuple(w))

    @property
    def wild_dict(self) -> dict:
        return dict(self.wild)

    def __call__(self, pt: TorusPoint) -> RootOfUnity:
        return RootOfUnity(self.exponent(pt))

    def exponent(self, pt: TorusPoint) -> Fraction:
        S = self.torus
        acc = Fraction(0)
        c = pt.tame_coords()
        for x, ci in zip(self.tame, c):
            acc += x * ci
        p = S.tower.p
        wd = self.wild_dict
        for k, v in pt.wild:
            vals = wd.get(k)
            if vals is None:
                if k not in S.wild:
                    raise ValidationError("point is not rational")
                continue
            coords = S.wild[k].coords(v)
            acc += Fraction(sum(a * b for a, b in zip(vals, coords)) % p, p)
        return acc - (acc.numerator // acc.denominator)

    def __mul__(self, other: "TorusCharacter") -> "TorusCharacter":
        wild = {k: list(v) for k, v in self.wild}
        for k, v in other.wild:
            wild[k] = [a + b for a, b in zip(wild.get(k, [0] * len(v)), v)]
        return TorusCharacter.make(self.torus, [a + b for a, b in zip(self.tame, other.tame)], wild)

    def inverse(self) -> "TorusCharacter":
        return TorusCharacter.make(self.torus, [-a for a in self.tame], {k: [-x for x in v] for k, v in self.wild})

    def __truediv__(self, other):
        return self * other.inverse()

    def is_trivial(self) -> bool:
        return not self.wild and all(x == 0 for x in self.tame)

    @property
    def depth_level(self) -> int:
        """Largest u-level where the character is nontrivial (0 if trivial on S(F)_{0+})."""
        return max((k for k, _ in self.wild), default=0)

    @property
    def depth(self) -> Fraction:
        return Fraction(self.depth_level, self.torus.tower.e)

    def level(self, k: int):
        return self.wild_dict.get(k, tuple([0] * self.torus.wild[k].dim) if k in self.torus.wild else ())

    def level_functional(self, k: int):
        """The level-k values as a functional on the ambient level space (via W_k coordinates)."""
        return self.level(k)

    def weyl_conjugate(self, w) -> "TorusCharacter":
        """The character gamma -> self(w . gamma), for a rational Weyl element w."""
        S = self.torus
        tame = []
        for i in range(len(S.tame.gens)):
            c = [0] * len(S.tame.gens)
            c[i] = 1
            tame.append(self.exponent(S.point_from_coords(c).weyl(w)))
        wild = {}
        for k, W in S.wild.items():
            vals = []
            for b in W.basis:
                ex = self.exponent(S.point([0] * S.n, [0] * S.n, {k: b}).weyl(w))
                vals.append(int(ex * S.tower.p))
            wild[k] = vals
        return TorusCharacter.make(S, tame, wild)

    def to_json(self) -> dict:
        return {"tame": [str(x) for x in self.tame], "wild": {str(k): list(v) for k, v in self.wild}}


def char_compose_coroot(theta: TorusCharacter, coroot, k: int):
    """F_p-linear functional c -> theta(N_{E/F}(coroot (x) c u^k)) on k_E, as digit coefficients."""
    S = theta.torus
    if k not in S.wild:
        return tuple([0] * S.d)
    T = S.tower
    Nm = S.norm_wild_matrix(k)
    vals = theta.level(k)
    W = S.wild[k]
    out = []
    for b in range(S.d):
        v = S.wild_vector(coroot, T.p**b)
        img = matvec(Nm, v)
        coords = W.coords([x % T.p for x in img])
        out.append(sum(a * c for a, c in zip(vals, coords)) % T.p)
    return tuple(out)


def coroot_tame_norms(S: TameTorus, coroots):
    """Tame coordinates of N(coroot(u)) and N(coroot(g)) for the given coroots."""
    out = []
    n = S.n
    for c in coroots:
        for vec in (list(c) + [0] * n, [0] * n + list(c)):
            out.append(S.tame.coords(list(S.norm_tame(vec))))
    return out


def depth_zero_regularity(theta: TorusCharacter, weyl_elements) -> tuple[str, list]:
    """Stabilizer of theta restricted to S(F)_0 among rational Weyl elements.

    Returns ("extra-regular", [identity]) when the stabilizer is trivial,
    otherwise ("neither", stabilizer).
    """
    S = theta.torus
    gens = []
    for g in S.tame_zero.gens:
        gens.append(S.point(g[: S.n], g[S.n:]))
    for k, W in S.wild.items():
        for b in W.basis:
            gens.append(S.point([0] * S.n, [0] * S.n, {k: b}))
    stab = []
    for w in weyl_elements:
        if not S.is_rational_weyl(w):
            continue
        if all(theta.exponent(x.weyl(w)) == theta.exponent(x) for x in gens):
            stab.append(w)
    return ("extra-regular" if len(stab) == 1 else "neither"), stab


def reduction_iso_check(S: TameTorus) -> bool:
    """S'(F)_0 / S'(F)_0+ -> S(F)_0 / S(F)_0+ is an isomorphism, S' the maximal unramified subtorus."""
    Sp, B = S.maximal_unramified_subtorus()
    target = S.tame_zero
    if Sp.n == 0:
        return subgroup_order(target) == 1
    src = Sp.tame_zero
    if src.rank or target.rank:
        return False
    n = S.n
    images = []
    for g in src.gens:
        mu = matvec(B, list(g[Sp.n:]))
        v = [0] * n + [x % S.M for x in mu]
        if not target.contains(v):
            return False
        images.append(v)
    img = subgroup_from_generators(images, [list(r) for r in S.tame_relations], 2 * n)
    return subgroup_order(img) == subgroup_order(src) == subgroup_order(target)
