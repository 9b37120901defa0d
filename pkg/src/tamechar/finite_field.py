"""Finite fields GF(p^n) with log/antilog tables.

Elements are plain ints in ``range(p**n)``; the base-p digits of an element
are the coefficients of its polynomial representative (digit ``i`` is the
coefficient of ``x**i``).  The class of ``x`` is a primitive element, so the
generator used for discrete logs is always ``1 * x``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import sympy

from .errors import ValidationError


def _poly_mulmod(a, b, mod, p):
    """Multiply coefficient lists ``a``, ``b`` modulo the monic ``mod`` over F_p."""
    n = len(mod) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    for k in range(len(out) - 1, n - 1, -1):
        c = out[k]
        if c:
            for j in range(n + 1):
                out[k - n + j] = (out[k - n + j] - c * mod[j]) % p
    return (out + [0] * n)[:n]


def _is_primitive(mod, p):
    """True if x generates the multiplicative group of F_p[x]/(mod)."""
    n = len(mod) - 1
    order = p**n - 1
    x = [0, 1] + [0] * (n - 2) if n > 1 else [(-mod[0]) % p]

    def power(e):
        result = [1] + [0] * (n - 1)
        base = list(x)
        while e:
            if e & 1:
                result = _poly_mulmod(result, base, mod, p)
            base = _poly_mulmod(base, base, mod, p)
            e >>= 1
        return result

    one = [1] + [0] * (n - 1)
    if power(order) != one:
        return False
    return all(power(order // r) != one for r in sympy.primefactors(order))


def _primitive_polynomial(p, n):
    """Lexicographically first monic primitive polynomial of degree n over F_p."""
    if n == 1:
        g = sympy.primitive_root(p) if p > 2 else 1
        return [(-g) % p, 1]
    for tail in product(range(p), repeat=n):
        mod = list(reversed(tail)) + [1]
        if mod[0] == 0:
            continue
        if _is_primitive(mod, p):
            return mod
    raise AssertionError("no primitive polynomial found")


class GF:
    """The field with ``p**n`` elements.

    >>> F = GF.get(3, 2)
    >>> F.order
    9
    >>> F.mul(F.gen, F.inv(F.gen))
    1
    """

    def __init__(self, p: int, n: int):
        if not sympy.isprime(p):
            raise ValidationError(f"characteristic {p} is not prime")
        if n < 1:
            raise ValidationError("degree must be positive")
        self.p = p
        self.n = n
        self.order = p**n
        self.modulus = _primitive_polynomial(p, n)
        q1 = self.order - 1
        exp = [0] * q1
        log = [None] * self.order
        cur = [1] + [0] * (n - 1)
        gen_poly = [0, 1] + [0] * (n - 2) if n > 1 else [(-self.modulus[0]) % p]
        for i in range(q1):
            v = self._encode(cur)
            exp[i] = v
            log[v] = i
            cur = _poly_mulmod(cur, gen_poly, self.modulus, p)
        self._exp = exp
        self._log = log
        self.gen = exp[1 % q1] if q1 > 1 else 1
        self._add = None
        # trace to F_p of each power-basis vector
        self._basis_trace = [self.trace_to_prime(self._encode([int(i == j) for j in range(n)]), _slow=True)
                             for i in range(n)]

    @staticmethod
    @lru_cache(maxsize=None)
    def get(p: int, n: int = 1) -> "GF":
        return GF(p, n)

    def __repr__(self):
        return f"GF({self.p}^{self.n})"

    def __reduce__(self):
        return (GF.get, (self.p, self.n))

    # encoding ---------------------------------------------------------
    def _encode(self, coeffs):
        v = 0
        for c in reversed(coeffs):
            v = v * self.p + (c % self.p)
        return v

    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.n):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def from_digits(self, ds) -> int:
        return self._encode(list(ds))

    # arithmetic -------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a + b) % self.p
        if self._add is not None:
            return self._add[a][b]
        return self._encode([x + y for x, y in zip(self.digits(a), self.digits(b))])

    def build_add_table(self):
        """Cache the full addition table (worth it for repeated use on small fields)."""
        if self._add is None and self.n > 1:
            rows = []
            ds = [self.digits(a) for a in range(self.order)]
            for a in range(self.order):
                da = ds[a]
                rows.append([self._encode([x + y for x, y in zip(da, db)]) for db in ds])
            self._add = rows
        return self

    def neg(self, a: int) -> int:
        if self.n == 1:
            return (-a) % self.p
        return self._encode([-x for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def scalar(self, k: int) -> int:
        """Image of the integer k."""
        return k % self.p

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in finite field")
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k <= 0:
                raise ZeroDivisionError("zero to a non-positive power")
            return 0
        return self._exp[(self._log[a] * k) % (self.order - 1)]

    def log(self, a: int) -> int:
        """Discrete log to base ``gen``."""
        if a == 0:
            raise ZeroDivisionError("log of zero")
        return self._log[a]

    def exp(self, k: int) -> int:
        return self._exp[k % (self.order - 1)]

    def frobenius(self, a: int, times: int = 1) -> int:
        """a -> a^(p^times)."""
        return self.pow(a, self.p ** (times % self.n)) if a else 0

    # subfields and traces ---------------------------------------------
    def subfield_elements(self, d: int) -> list[int]:
        """Elements of the subfield with p^d elements."""
        if self.n % d:
            raise ValidationError(f"F_{self.p}^{d} is not a subfield of {self}")
        step = (self.order - 1) // (self.p**d - 1)
        return [0] + [self._exp[i] for i in range(0, self.order - 1, step)]

    def in_subfield(self, a: int, d: int) -> bool:
        return a == 0 or self._log[a] % ((self.order - 1) // (self.p**d - 1)) == 0

    def trace_to_prime(self, a: int, _slow: bool = False) -> int:
        """Absolute trace to F_p, returned as an int in range(p)."""
        if not _slow:
            return sum(c * t for c, t in zip(self.digits(a), self._basis_trace)) % self.p
        acc = 0
        cur = a
        for _ in range(self.n):
            acc = self.add(acc, cur)
            cur = self.frobenius(cur)
        assert acc < self.p
        return acc

    def relative_trace(self, a: int, d: int) -> int:
        """Trace from this field down to the subfield of size p^d."""
        acc = 0
        cur = a
        for _ in range(self.n // d):
            acc = self.add(acc, cur)
            cur = self.frobenius(cur, d)
        return acc

    def relative_norm(self, a: int, d: int) -> int:
        if a == 0:
            return 0
        k = self.n // d
        e = sum(self.p ** (d * i) for i in range(k))
        return self.pow(a, e)

    def is_square(self, a: int, d: int | None = None) -> bool:
        """Square test in the subfield with p^d elements containing ``a``."""
        if a == 0:
            raise ValidationError("square test of zero")
        d = self.n if d is None else d
        step = (self.order - 1) // (self.p**d - 1)
        lg = self._log[a]
        if lg % step:
            raise ValidationError("element does not lie in the requested subfield")
        return (lg // step) % 2 == 0 if self.p != 2 else True


def quadratic_sign(x: int, field: GF, d: int | None = None) -> int:
    """+1 if ``x`` is a square in the subfield of size p^d (default: all of ``field``)."""
    return 1 if field.is_square(x, d) else -1
