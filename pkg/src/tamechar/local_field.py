"""Tamely ramified Galois towers of Laurent-series fields.

The tower is E = k_E((u)) over F = F_q((t)), t = u^e, k_E = F_{q^f}.  Its
Galois group is generated by the inertia generator tau (u -> zeta_e u, trivial
on k_E) and the Frobenius phi (coefficients to the q-th power, u fixed), with
phi tau phi^-1 = tau^q.  A group element tau^i phi^j is the pair (i, j).

Elements are truncated Laurent series with explicit absolute precision: a
:class:`FieldElt` with ``prec = n`` is known modulo u^n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product as iproduct

import sympy

from .abelian import kernel_mod_p
from .errors import TruncationError, ValidationError
from .finite_field import GF


def prime_power(q: int) -> tuple[int, int]:
    f = sympy.factorint(q)
    if len(f) != 1:
        raise ValidationError(f"q = {q} is not a prime power")
    (p, m), = f.items()
    return int(p), int(m)


class TameTower:
    """The tower E/F with parameters (q, e, f) truncated at u^N.

    The truncated logarithm identifies U^1/U^N with (u k_E[[u]] / u^N, +)
    Galois-equivariantly, which needs p >= N.
    """

    def __init__(self, q: int, e: int, f: int, N: int):
        p, m = prime_power(q)
        if p == 2:
            raise ValidationError("residue characteristic must be odd")
        if e < 1 or f < 1 or N < 1:
            raise ValidationError("e, f and N must be positive")
        if e % p == 0:
            raise ValidationError(f"e = {e} is divisible by p = {p}; the tower would not be tame")
        if (q**f - 1) % e:
            raise ValidationError(f"e = {e} does not divide q^f - 1; no tame Galois tower with these (q, e, f)")
        if N > p:
            raise TruncationError(f"truncation N = {N} exceeds p = {p}; the truncated log/exp is not available",
                                  required_n=None)
        self.q, self.e, self.f, self.N = q, e, f, N
        self.p, self.m = p, m
        self.k = GF.get(p, m * f)
        self.Q = self.k.order
        self.g = self.k.gen
        self.zeta_e = self.k.exp((self.Q - 1) // e)

    def __repr__(self):
        return f"TameTower(q={self.q}, e={self.e}, f={self.f}, N={self.N})"

    def __eq__(self, other):
        return isinstance(other, TameTower) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def key(self):
        return (self.q, self.e, self.f, self.N)

    def with_precision(self, N: int) -> "TameTower":
        return TameTower(self.q, self.e, self.f, N)

    # Galois group -----------------------------------------------------
    @cached_property
    def galois_group(self) -> tuple:
        return tuple((i, j) for j in range(self.f) for i in range(self.e))

    def gal_mul(self, a, b):
        (i, j), (i2, j2) = a, b
        return ((i + i2 * pow(self.q, j, self.e)) % self.e, (j + j2) % self.f)

    def gal_inv(self, a):
        for b in self.galois_group:
            if self.gal_mul(a, b) == (0, 0):
                return b
        raise AssertionError("no inverse")

    @property
    def tau(self):
        return (1 % self.e, 0)

    @property
    def phi(self):
        return (0, 1 % self.f)

    def word(self, letters: str):
        """Group element of a word such as 'phi tau tau' (leftmost acts last)."""
        out = (0, 0)
        for w in letters.replace("*", " ").split():
            if w == "tau":
                out = self.gal_mul(out, self.tau)
            elif w == "phi":
                out = self.gal_mul(out, self.phi)
            elif w in ("1", "id"):
                continue
            else:
                raise ValidationError(f"unknown Galois letter {w!r}")
        return out

    def is_inertia(self, s) -> bool:
        return s[1] == 0

    def subgroup(self, gens) -> frozenset:
        elems = {(0, 0)}
        frontier = [(0, 0)]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.gal_mul(x, g)
                if y not in elems:
                    elems.add(y)
                    frontier.append(y)
        return frozenset(elems)

    def all_subgroups(self) -> list[frozenset]:
        seen = set()
        out = []
        G = self.galois_group
        for a in G:
            for b in G:
                H = self.subgroup([a, b])
                if H not in seen:
                    seen.add(H)
                    out.append(H)
        return sorted(out, key=lambda H: (-len(H), sorted(H)))

    # coefficient-level Galois action ----------------------------------
    def act_coeff(self, s, c: int, k: int) -> int:
        """Coefficient of u^k in s(c u^k)."""
        i, j = s
        if c == 0:
            return 0
        c = self.k.pow(c, self.q**j) if j else c
        return self.k.mul(self.k.pow(self.zeta_e, i * k), c) if (i * k) % self.e else c

    @lru_cache(maxsize=None)
    def coeff_matrix(self, s, k: int):
        """F_p-matrix (rows act on digit column vectors) of c -> coefficient of s(c u^k)."""
        n = self.k.n
        cols = [self.k.digits(self.act_coeff(s, self.p**b, k)) for b in range(n)]
        return tuple(tuple(cols[b][a] for b in range(n)) for a in range(n))

    @lru_cache(maxsize=None)
    def mult_matrix(self, c: int):
        """F_p-matrix of multiplication by c on k_E."""
        n = self.k.n
        cols = [self.k.digits(self.k.mul(c, self.p**b)) for b in range(n)]
        return tuple(tuple(cols[b][a] for b in range(n)) for a in range(n))

    # elements ---------------------------------------------------------
    def elt(self, terms, prec: int | None = None) -> "FieldElt":
        return FieldElt.make(self, terms, self.N if prec is None else prec)

    def one(self) -> "FieldElt":
        return self.elt({0: 1})

    def zero(self) -> "FieldElt":
        return self.elt({})

    def const(self, c: int) -> "FieldElt":
        return self.elt({0: c})

    def integer(self, n: int) -> "FieldElt":
        return self.elt({0: n % self.p})

    def u(self, k: int = 1) -> "FieldElt":
        return self.elt({k: 1})

    def exp_series(self, y: "FieldElt") -> "FieldElt":
        """Truncated exponential of y with val(y) >= 1."""
        if y.is_zero():
            return self.one().with_prec(y.prec)
        if y.val < 1:
            raise ValidationError("exp needs an element of positive valuation")
        out = self.one().with_prec(y.prec)
        term = out
        j = 1
        while True:
            term = (term * y).with_prec(y.prec)
            if term.is_zero():
                break
            if j >= self.p:
                raise TruncationError("exp series needs 1/j! with j >= p", required_n=self.p)
            term = term.scale_inv(j)
            out = out + term
            j += 1
        return out

    def log_series(self, x: "FieldElt") -> "FieldElt":
        """Truncated logarithm of a principal unit."""
        y = x - self.one()
        if y.is_zero():
            return y
        if y.val < 1:
            raise ValidationError("log needs a principal unit")
        out = self.zero().with_prec(x.prec)
        power = self.one().with_prec(x.prec)
        j = 1
        while j * y.val < x.prec:
            if j >= self.p:
                raise TruncationError("log series needs 1/j with j >= p", required_n=self.p)
            power = (power * y).with_prec(x.prec)
            term = power.scale_inv(j)
            out = out + term if j % 2 else out - term
            j += 1
        return out

    # additive character -----------------------------------------------
    def additive_character(self, x: "FieldElt", scale: int = 1) -> Fraction:
        """Exponent in Q/Z of Lambda(x) = psi_p(tr(scale * constant coefficient))."""
        if x.prec <= 0:
            raise TruncationError("additive character needs the u^0 coefficient", required_n=self.N - x.prec + 1)
        c = x.coeff(0)
        if not self.k.in_subfield(c, self.m) or not self.k.in_subfield(scale, self.m):
            raise ValidationError("additive character evaluated off the base field")
        return Fraction(_trace_Fq_to_Fp(self, self.k.mul(scale, c)), self.p)

    # subfields --------------------------------------------------------
    def subfield(self, H) -> "Subfield":
        return Subfield(self, frozenset(H))

    @cached_property
    def base(self) -> "Subfield":
        return Subfield(self, frozenset(self.galois_group))

    @cached_property
    def top(self) -> "Subfield":
        return Subfield(self, frozenset({(0, 0)}))

    def filtration_group(self, r, s):
        """Invariant factors and generators of E^x_r / E^x_s (depths in ord units).

        Returns (orders, generators) with generators FieldElts.
        """
        r, s = Fraction(r), Fraction(s)
        if not 0 <= r < s:
            raise ValidationError("need 0 <= r < s")
        lo = -(-r.numerator * self.e // r.denominator)
        hi = -(-s.numerator * self.e // s.denominator)
        if hi > self.N:
            raise TruncationError("quotient level beyond truncation", required_n=hi)
        orders, gens = [], []
        if lo == 0:
            orders.append(self.Q - 1)
            gens.append(self.const(self.g).with_prec(hi))
            lo = 1
        for k in range(lo, hi):
            for b in range(self.k.n):
                orders.append(self.p)
                gens.append(self.elt({0: 1, k: self.p**b}, hi))
        return orders, gens


def _trace_Fq_to_Fp(tower: TameTower, c: int) -> int:
    """tr_{F_q/F_p}(c) for c in F_q inside k_E."""
    F = tower.k
    acc = 0
    cur = c
    for _ in range(tower.m):
        acc = F.add(acc, cur)
        cur = F.frobenius(cur)
    if acc >= tower.p:
        raise AssertionError("trace left the prime field")
    return acc


@dataclass(frozen=True)
class FieldElt:
    """A truncated Laurent series sum c_k u^k, known modulo u^prec."""

    tower: TameTower = field(compare=False, hash=False)
    terms: tuple  # sorted ((k, c), ...) with c != 0 and k < prec
    prec: int

    @staticmethod
    def make(tower, terms, prec) -> "FieldElt":
        if isinstance(terms, dict):
            items = terms.items()
        else:
            items = terms
        acc = {}
        for k, c in items:
            if k < prec and c:
                acc[k] = tower.k.add(acc.get(k, 0), c)
        return FieldElt(tower, tuple(sorted((k, c) for k, c in acc.items() if c)), prec)

    # basic queries ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def val(self) -> int:
        """u-adic valuation; raises if the element is indistinguishable from 0."""
        if not self.terms:
            raise TruncationError("valuation of an element known only to be 0 mod u^%d" % self.prec,
                                  required_n=self.tower.N + 1)
        return self.terms[0][0]

    @property
    def ord(self) -> Fraction:
        """Valuation normalized so that ord(t) = 1."""
        return Fraction(self.val, self.tower.e)

    def coeff(self, k: int) -> int:
        if k >= self.prec:
            raise TruncationError(f"coefficient of u^{k} is beyond the precision", required_n=self.tower.N + k - self.prec + 1)
        for kk, c in self.terms:
            if kk == k:
                return c
        return 0

    def leading_coeff(self) -> int:
        return self.terms[0][1] if self.terms else self.coeff(self.val)

    def with_prec(self, prec: int) -> "FieldElt":
        """Same terms, declared known modulo u^prec (callers only raise precision of exact values)."""
        return FieldElt.make(self.tower, self.terms, prec)

    def _check(self, other):
        if not isinstance(other, FieldElt):
            raise TypeError("expected a FieldElt")
        if other.tower.key[:3] != self.tower.key[:3]:
            raise ValidationError("elements of different towers")

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        self._check(other)
        prec = min(self.prec, other.prec)
        return FieldElt.make(self.tower, list(self.terms) + list(other.terms), prec)

    def __neg__(self):
        F = self.tower.k
        return FieldElt(self.tower, tuple((k, F.neg(c)) for k, c in self.terms), self.prec)

    def __sub__(self, other):
        return self + (-other)

    def _val_or_prec(self):
        return self.terms[0][0] if self.terms else self.prec

    def __mul__(self, other):
        self._check(other)
        F = self.tower.k
        prec = min(self.prec + other._val_or_prec(), other.prec + self._val_or_prec())
        acc = {}
        for k1, c1 in self.terms:
            for k2, c2 in other.terms:
                k = k1 + k2
                if k < prec:
                    acc[k] = F.add(acc.get(k, 0), F.mul(c1, c2))
        return FieldElt(self.tower, tuple(sorted((k, c) for k, c in acc.items() if c)), prec)

    def scale(self, c: int) -> "FieldElt":
        F = self.tower.k
        return FieldElt.make(self.tower, [(k, F.mul(c, x)) for k, x in self.terms], self.prec)

    def scale_inv(self, n: int) -> "FieldElt":
        """Divide by the integer n (prime to p)."""
        if n % self.tower.p == 0:
            raise ValidationError("division by a multiple of p")
        return self.scale(self.tower.k.inv(n % self.tower.p))

    def inverse(self) -> "FieldElt":
        F = self.tower.k
        v = self.val
        rel = self.prec - v
        c = F.inv(self.terms[0][1])
        # self = c0 u^v (1 + y) with val(y) >= 1
        y = FieldElt.make(self.tower, [(k - v, F.mul(c, x)) for k, x in self.terms[1:]], rel)
        out = self.tower.one().with_prec(rel)
        power = self.tower.one().with_prec(rel)
        j = 1
        while not y.is_zero() and j * y.val < rel:
            power = power * (-y)
            out = out + power
            j += 1
        return FieldElt.make(self.tower, [(k - v, F.mul(c, x)) for k, x in out.terms], rel - v)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.tower.one().with_prec(max(self.prec, self.tower.N))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def galois(self, s) -> "FieldElt":
        T = self.tower
        return FieldElt.make(T, [(k, T.act_coeff(s, c, k)) for k, c in self.terms], self.prec)

    def is_fixed_by(self, H) -> bool:
        return all(self.galois(s) == self for s in H)

    def unit_part(self) -> tuple[int, int, "FieldElt"]:
        """(val, leading coefficient, principal unit) with self = u^val * c * unit."""
        F = self.tower.k
        v = self.val
        c = self.terms[0][1]
        ci = F.inv(c)
        unit = FieldElt.make(self.tower, [(k - v, F.mul(ci, x)) for k, x in self.terms], self.prec - v)
        return v, c, unit

    def __str__(self):
        F = self.tower.k
        parts = []
        for k, c in self.terms:
            coef = str(c) if c < self.tower.p else f"g^{F.log(c)}"
            mono = "" if k == 0 else ("u" if k == 1 else f"u^{k}")
            if not mono:
                parts.append(coef)
            elif coef == "1":
                parts.append(mono)
            else:
                parts.append(f"{coef}*{mono}")
        body = " + ".join(parts) if parts else "0"
        return f"{body} (mod u^{self.prec})"

    __repr__ = __str__


class Subfield:
    """The fixed field K = E^H of a subgroup H of Gal(E/F)."""

    def __init__(self, tower: TameTower, H: frozenset):
        self.tower = tower
        self.H = frozenset(H)
        if (0, 0) not in self.H:
            raise ValidationError("subgroup must contain the identity")
        inert = [s for s in self.H if tower.is_inertia(s)]
        self.e_top = len(inert)  # e(E/K)
        self.f_top = len(self.H) // self.e_top  # f(E/K)
        if tower.e % self.e_top or tower.f % self.f_top:
            raise ValidationError("not a subgroup of the tower's Galois group")
        self.e = tower.e // self.e_top  # e(K/F)
        self.f = tower.f // self.f_top  # f(K/F)
        self.q = tower.q**self.f  # residue field size

    def __eq__(self, other):
        return isinstance(other, Subfield) and self.H == other.H and self.tower == other.tower

    def __hash__(self):
        return hash((self.H, self.tower.key))

    def __repr__(self):
        return f"Subfield(e={self.e}, f={self.f}, |H|={len(self.H)})"

    @property
    def degree(self) -> int:
        return self.e * self.f

    def contains(self, other: "Subfield") -> bool:
        return self.H <= other.H

    @cached_property
    def residue_gen(self) -> int:
        T = self.tower
        return T.k.exp((T.Q - 1) // (self.q - 1))

    @property
    def residue_degree_over_prime(self) -> int:
        return self.tower.m * self.f

    def level_coeffs(self, k: int) -> list[int]:
        """F_p-basis (field elements) of {c in k_E : c u^k lies in K}."""
        T = self.tower
        n = T.k.n
        rows = []
        for s in self.H:
            mat = T.coeff_matrix(s, k)
            rows.extend([[mat[a][b] - (a == b) for b in range(n)] for a in range(n)])
        return [T.k.from_digits(v) for v in kernel_mod_p(rows, n, T.p)]

    @cached_property
    def uniformizer(self) -> FieldElt:
        """Canonical uniformizer c u^(e(E/K)) with c = g^s, s minimal."""
        T = self.tower
        d = self.e_top
        for s in range(T.Q - 1):
            c = T.k.exp(s)
            if all(T.act_coeff(h, c, d) == c for h in self.H):
                return T.elt({d: c}, max(T.N, d + 1))
        raise AssertionError("no uniformizer found")

    def contains_elt(self, x: FieldElt) -> bool:
        return x.is_fixed_by(self.H)

    def residue_log(self, c: int) -> int:
        """Discrete log of c in k_K^x relative to residue_gen."""
        T = self.tower
        step = (T.Q - 1) // (self.q - 1)
        lg = T.k.log(c)
        if lg % step:
            raise ValidationError("element is not in the residue field of the subfield")
        return lg // step

    def is_square_residue(self, c: int) -> bool:
        return self.residue_log(c) % 2 == 0

    def coset_reps(self, smaller: "Subfield") -> list:
        """Representatives of H_self / H_smaller: the embeddings of ``smaller`` over self.

        Requires self contained in ``smaller`` (H_smaller subgroup of H_self).
        """
        if not smaller.H <= self.H:
            raise ValidationError("field inclusion fails")
        T = self.tower
        reps = []
        covered = set()
        for s in sorted(self.H):
            if s in covered:
                continue
            reps.append(s)
            covered |= {T.gal_mul(s, h) for h in smaller.H}
        return reps

    def norm_from(self, larger: "Subfield", x: FieldElt) -> FieldElt:
        """N_{larger/self}(x)."""
        out = None
        for s in self.coset_reps(larger):
            y = x.galois(s)
            out = y if out is None else out * y
        return out

    def trace_from(self, larger: "Subfield", x: FieldElt) -> FieldElt:
        out = None
        for s in self.coset_reps(larger):
            y = x.galois(s)
            out = y if out is None else out + y
        return out


def norm_trace(small: Subfield, large: Subfield, a: FieldElt, which: str) -> FieldElt:
    """Norm or trace from ``large`` down to ``small``."""
    if which == "norm":
        return small.norm_from(large, a)
    if which == "trace":
        return small.trace_from(large, a)
    raise ValidationError("which must be 'norm' or 'trace'")


def all_units_mod(K: Subfield, bound: int):
    """Representatives of O_K^x modulo u^bound (bound an E-exponent); small fields only."""
    T = K.tower
    levels = [(k, K.level_coeffs(k)) for k in range(1, bound)]
    levels = [(k, b) for k, b in levels if b]
    lead = [c for c in range(1, T.Q) if T.k.in_subfield(c, T.m * K.f)]
    for c in lead:
        for choice in iproduct(*[iproduct(range(T.p), repeat=len(b)) for _, b in levels]):
            terms = {0: c}
            for (k, basis), coefs in zip(levels, choice):
                acc = 0
                for a, b in zip(coefs, basis):
                    if a:
                        acc = T.k.add(acc, T.k.mul(a, b))
                if acc:
                    terms[k] = T.k.mul(c, acc)
            yield T.elt(terms, bound)
