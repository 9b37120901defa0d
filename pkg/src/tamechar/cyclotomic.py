"""Exact arithmetic in cyclotomic fields.

A :class:`CycNum` is an element of Q(zeta_M) stored in the power basis
1, z, ..., z^(phi(M)-1) modulo the M-th cyclotomic polynomial, so equal
numbers of equal conductor have equal coefficient tuples.  Mixed-conductor
arithmetic promotes both operands to the lcm.

A :class:`RootOfUnity` is an exponent in Q/Z; it multiplies by adding.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import sympy

from .errors import ValidationError


@lru_cache(maxsize=None)
def _cyclotomic(m: int) -> tuple[int, ...]:
    """Coefficients (low degree first) of the m-th cyclotomic polynomial."""
    x = sympy.Symbol("x")
    return tuple(int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(m, x), x).all_coeffs()))


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Row k is the reduced power-basis vector of z^k, for 0 <= k < m."""
    phi = _cyclotomic(m)
    d = len(phi) - 1
    rows = []
    cur = [0] * d
    cur[0] = 1
    for _ in range(m):
        rows.append(tuple(cur))
        # multiply by z and reduce the top coefficient
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * phi[i] for i, c in enumerate(cur)]
    return tuple(rows)


def _conductor_of(exponent: Fraction) -> int:
    return exponent.denominator


class CycNum:
    """Exact element of a cyclotomic field.

    >>> z4 = RootOfUnity(Fraction(1, 4)).as_cyc()
    >>> z4 * z4 == CycNum.from_int(-1)
    True
    """

    __slots__ = ("M", "coeffs")
    __hash__ = None

    def __init__(self, M: int, coeffs):
        self.M = int(M)
        self.coeffs = tuple(Fraction(c) for c in coeffs)
        if len(self.coeffs) != len(_cyclotomic(self.M)) - 1:
            raise ValidationError("coefficient vector has the wrong length for the conductor")

    # constructors -----------------------------------------------------
    @classmethod
    def from_int(cls, n) -> "CycNum":
        return cls(1, [Fraction(n)])

    @classmethod
    def zero(cls) -> "CycNum":
        return cls.from_int(0)

    @classmethod
    def one(cls) -> "CycNum":
        return cls.from_int(1)

    @classmethod
    def from_exponents(cls, M: int, terms) -> "CycNum":
        """Sum of c * z_M^k over (k, c) pairs."""
        table = _power_table(M)
        acc = [Fraction(0)] * (len(table[0]))
        for k, c in terms:
            if c:
                row = table[k % M]
                for i, r in enumerate(row):
                    if r:
                        acc[i] += c * r
        return cls(M, acc)

    @classmethod
    def zeta(cls, M: int, k: int = 1) -> "CycNum":
        return cls.from_exponents(M, [(k, 1)])

    # conductor handling -----------------------------------------------
    def promote(self, M2: int) -> "CycNum":
        if M2 == self.M:
            return self
        if M2 % self.M:
            raise ValidationError(f"cannot promote conductor {self.M} to {M2}")
        step = M2 // self.M
        return CycNum.from_exponents(M2, [(k * step, c) for k, c in enumerate(self.coeffs)])

    def _common(self, other):
        if not isinstance(other, CycNum):
            other = _coerce(other)
        M = math.lcm(self.M, other.M)
        return self.promote(M), other.promote(M), M

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        a, b, M = self._common(other)
        return CycNum(M, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.M, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycNum(self.M, [x * other for x in self.coeffs])
        a, b, M = self._common(other)
        prod = {}
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] = prod.get(i + j, 0) + x * y
        return CycNum.from_exponents(M, prod.items())

    __rmul__ = __mul__

    def conj(self) -> "CycNum":
        """Complex conjugation z -> z^-1."""
        return CycNum.from_exponents(self.M, [(-k, c) for k, c in enumerate(self.coeffs)])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycNum(self.M, [x / Fraction(other) for x in self.coeffs])
        return self * _coerce(other).inverse()

    def inverse(self) -> "CycNum":
        """Multiplicative inverse via the product of the Galois conjugates."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        others = CycNum.one()
        for k in range(2, self.M):
            if math.gcd(k, self.M) == 1:
                others = others * self.galois(k)
        norm = self * others
        n = norm.rational_value()
        if n is None:
            raise AssertionError("norm is not rational")
        return others / n

    def galois(self, k: int) -> "CycNum":
        """Apply the automorphism z -> z^k (k a unit mod M)."""
        if math.gcd(k, self.M) != 1:
            raise ValidationError("Galois exponent must be a unit")
        return CycNum.from_exponents(self.M, [(i * k, c) for i, c in enumerate(self.coeffs)])

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = CycNum.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparisons ------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, (CycNum, RootOfUnity, int, Fraction)):
            return NotImplemented
        a, b, _ = self._common(other)
        return a.coeffs == b.coeffs

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def rational_value(self):
        """The rational number this equals, or None."""
        if all(c == 0 for c in self.coeffs[1:]):
            return self.coeffs[0]
        return None

    def as_root_of_unity(self):
        """The equal :class:`RootOfUnity`, or None if this is not one."""
        z = self.embed_complex()
        if abs(abs(z) - 1) > 1e-9:
            return None
        L = 2 * self.M
        k = round(cmath.phase(z) / (2 * math.pi) * L) % L
        cand = RootOfUnity(Fraction(k, L))
        return cand if cand.as_cyc() == self else None

    # output -----------------------------------------------------------
    def embed_complex(self) -> complex:
        return sum((complex(c) * cmath.exp(2j * math.pi * k / self.M) for k, c in enumerate(self.coeffs) if c),
                   0j)

    def reduced(self) -> "CycNum":
        """Equal number with the smallest conductor dividing M."""
        for d in sorted(sympy.divisors(self.M)):
            if d == self.M:
                return self
            cand = _project(self, d)
            if cand is not None:
                return cand
        return self

    def to_json(self) -> dict:
        r = self.reduced()
        return {"M": r.M, "coeffs": [[k, str(c)] for k, c in enumerate(r.coeffs) if c]}

    @classmethod
    def from_json(cls, data) -> "CycNum":
        return cls.from_exponents(int(data["M"]), [(int(k), Fraction(c)) for k, c in data["coeffs"]])

    def __str__(self):
        r = self.reduced()
        root = r.as_root_of_unity()
        if root is not None:
            return str(root)
        terms = []
        for k, c in enumerate(r.coeffs):
            if not c:
                continue
            mono = "1" if k == 0 else f"z{r.M}" + (f"^{k}" if k > 1 else "")
            terms.append(f"{c}" if k == 0 else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(terms) if terms else "0"

    def __repr__(self):
        return f"CycNum({self})"


def _project(x: CycNum, d: int):
    """Express x in Q(zeta_d) if possible (d | x.M)."""
    n = len(_cyclotomic(d)) - 1
    # the power basis of Q(zeta_d) promoted into Q(zeta_M) is linearly independent;
    # solve the linear system by matching coordinates
    basis = [CycNum.zeta(d, k).promote(x.M).coeffs for k in range(n)]
    mat = sympy.Matrix([list(b) for b in basis]).T
    rhs = sympy.Matrix(list(x.coeffs))
    try:
        sol, params = mat.gauss_jordan_solve(rhs)
    except ValueError:
        return None
    if params.shape[0]:
        sol = sol.subs({p: 0 for p in params})
    return CycNum(d, [Fraction(int(s.p), int(s.q)) for s in sol])


def _coerce(x) -> CycNum:
    if isinstance(x, CycNum):
        return x
    if isinstance(x, RootOfUnity):
        return x.as_cyc()
    if isinstance(x, (int, Fraction)):
        return CycNum.from_int(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to CycNum")


class RootOfUnity:
    """exp(2 pi i * exponent) with exponent in Q/Z.

    >>> RootOfUnity(Fraction(1, 4)) * RootOfUnity(Fraction(1, 4))
    RootOfUnity(1/2)
    """

    __slots__ = ("exponent",)

    def __init__(self, exponent=0):
        e = Fraction(exponent)
        self.exponent = e - math.floor(e)

    @classmethod
    def sign(cls, s: int) -> "RootOfUnity":
        if s not in (1, -1):
            raise ValidationError("sign must be +1 or -1")
        return cls(Fraction(0) if s == 1 else Fraction(1, 2))

    def __mul__(self, other):
        if isinstance(other, RootOfUnity):
            return RootOfUnity(self.exponent + other.exponent)
        if isinstance(other, int) and other in (1, -1):
            return self * RootOfUnity.sign(other)
        return self.as_cyc() * other

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RootOfUnity):
            return RootOfUnity(self.exponent - other.exponent)
        if isinstance(other, int) and other in (1, -1):
            return self * other
        return self.as_cyc() / other

    def inverse(self) -> "RootOfUnity":
        return RootOfUnity(-self.exponent)

    conj = inverse

    def __pow__(self, n: int):
        return RootOfUnity(self.exponent * n)

    def __eq__(self, other):
        if isinstance(other, RootOfUnity):
            return self.exponent == other.exponent
        if isinstance(other, int):
            return other in (1, -1) and self == RootOfUnity.sign(other)
        if isinstance(other, CycNum):
            return self.as_cyc() == other
        return NotImplemented

    def __hash__(self):
        return hash(self.exponent)

    @property
    def order(self) -> int:
        return self.exponent.denominator

    def as_cyc(self) -> CycNum:
        return CycNum.zeta(self.exponent.denominator, self.exponent.numerator)

    def as_sign(self) -> int:
        if self.exponent == 0:
            return 1
        if self.exponent == Fraction(1, 2):
            return -1
        raise ValidationError(f"{self} is not a sign")

    def embed_complex(self) -> complex:
        return cmath.exp(2j * math.pi * self.exponent)

    def __str__(self):
        e = self.exponent
        if e == 0:
            return "1"
        if e == Fraction(1, 2):
            return "-1"
        if e == Fraction(1, 4):
            return "i"
        if e == Fraction(3, 4):
            return "-i"
        return f"z{e.denominator}" + (f"^{e.numerator}" if e.numerator != 1 else "")

    def __repr__(self):
        return f"RootOfUnity({self.exponent})"


def embed_complex(x) -> complex:
    return _coerce(x).embed_complex() if not isinstance(x, RootOfUnity) else x.embed_complex()


# Gauss sums ---------------------------------------------------------------

def _prime_power(q: int) -> tuple[int, int]:
    f = sympy.factorint(q)
    if len(f) != 1:
        raise ValidationError(f"{q} is not a prime power")
    (p, m), = f.items()
    return int(p), int(m)


@lru_cache(maxsize=None)
def sqrt_prime(p: int) -> CycNum:
    """The positive (or positive imaginary times -i) square root of p in Q(zeta_4p)."""
    g = CycNum.from_exponents(p, [(a, sympy.legendre_symbol(a, p)) for a in range(1, p)])
    if p % 4 == 1:
        return g
    return g * CycNum.zeta(4, 3)


def sqrt_q(q: int) -> CycNum:
    p, m = _prime_power(q)
    root = CycNum.from_int(p ** (m // 2))
    return root * sqrt_prime(p) if m % 2 else root


def raw_gauss_sum(q: int, scale: int = 1) -> CycNum:
    """sum over x in F_q of psi_p(tr(scale * x^2)), scale an element of F_q."""
    from .finite_field import GF

    p, m = _prime_power(q)
    if p == 2:
        raise ValidationError("Gauss sums are only defined here for odd q")
    F = GF.get(p, m)
    if scale == 0:
        raise ValidationError("additive character scale must be nonzero")
    counts = [0] * p
    for x in range(q):
        counts[F.trace_to_prime(F.mul(scale, F.mul(x, x)))] += 1
    return CycNum.from_exponents(p, list(enumerate(counts)))


@lru_cache(maxsize=None)
def gauss_sum(q: int, scale: int = 1) -> CycNum:
    """Normalized quadratic Gauss sum q^(-1/2) sum psi(x^2), exact.

    The normalization divides by the exact square root of q in a cyclotomic
    field, so the result is again a CycNum (a fourth root of unity).

    >>> str(gauss_sum(3)), str(gauss_sum(5)), str(gauss_sum(7))
    ('i', '1', 'i')
    """
    raw = raw_gauss_sum(q, scale)
    s = sqrt_q(q)
    return (raw * s / q).reduced()
