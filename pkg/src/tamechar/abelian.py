"""Integer and mod-p linear algebra for finitely generated abelian groups.

Matrices are lists of rows of Python ints.  The Smith form routine returns
unimodular transforms, which is what the presentation code needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction

from .errors import ValidationError


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(r) for r in zip(*a)] if a else []


def matmul(a, b):
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]


def matvec(a, v):
    return [sum(x * y for x, y in zip(r, v)) for r in a]


def smith_normal_form(a):
    """Return (U, D, V) with U * a * V = D diagonal, U and V unimodular.

    The diagonal entries are non-negative and each divides the next.

    >>> U, D, V = smith_normal_form([[2, 4], [6, 8]])
    >>> [D[0][0], D[1][1]]
    [2, 4]
    """
    m = len(a)
    n = len(a[0]) if m else 0
    D = [list(r) for r in a]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, k):  # row dst += k * row src
        if k:
            D[dst] = [x + k * y for x, y in zip(D[dst], D[src])]
            U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, k):
        if k:
            for r in D:
                r[dst] += k * r[src]
            for r in V:
                r[dst] += k * r[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // D[t][t]))
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // D[t][t]))
                    if D[t][j]:
                        done = False
            if done:
                # divisibility of the rest of the block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if D[i][j] % D[t][t]:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(bad, t, 1)
                continue
            # move the smallest entry of row/column t to the pivot
            best = (t, t)
            for i in range(t, m):
                if D[i][t] and abs(D[i][t]) < abs(D[best[0]][best[1]]):
                    best = (i, t)
            for j in range(t, n):
                if D[t][j] and abs(D[t][j]) < abs(D[best[0]][best[1]]):
                    best = (t, j)
            swap_rows(t, best[0])
            swap_cols(t, best[1])
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


def integer_kernel(a, ncols: int | None = None):
    """Basis (list of column vectors) of {x in Z^n : a x = 0}."""
    if not a:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    n = len(a[0])
    U, D, V = smith_normal_form(a)
    rank = sum(1 for i in range(min(len(D), n)) if D[i][i])
    return [[V[i][j] for i in range(n)] for j in range(rank, n)]


def solve_integer(a, b):
    """One integer solution x of a x = b, or None."""
    m = len(a)
    n = len(a[0]) if m else 0
    U, D, V = smith_normal_form(a)
    ub = matvec(U, b)
    z = [0] * n
    for i in range(m):
        d = D[i][i] if i < n else 0
        if d == 0:
            if ub[i]:
                return None
        else:
            if ub[i] % d:
                return None
            z[i] = ub[i] // d
    return matvec(V, z)


def hermite_column_basis(vectors, dim: int):
    """A Z-basis (columns) of the lattice spanned by the given vectors."""
    if not vectors:
        return []
    a = transpose(vectors)  # dim x k
    U, D, V = smith_normal_form(a)
    # a V = U^-1 D, so the nonzero columns of U^-1 D span the lattice
    uinv = integer_inverse(U)
    basis = []
    for j in range(min(len(D), len(D[0]))):
        if D[j][j]:
            basis.append([uinv[i][j] * D[j][j] for i in range(dim)])
    return basis


def integer_inverse(u):
    """Inverse of a unimodular matrix."""
    n = len(u)
    aug = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(u)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                k = aug[r][c]
                aug[r] = [x - k * y for x, y in zip(aug[r], aug[c])]
    out = [[aug[i][n + j] for j in range(n)] for i in range(n)]
    if any(x.denominator != 1 for r in out for x in r):
        raise ValidationError("matrix is not unimodular")
    return [[int(x) for x in r] for r in out]


def rational_rank(vectors) -> int:
    """Rank over Q of a list of integer vectors."""
    rows = [list(map(Fraction, v)) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                k = rows[r][c] / rows[rank][c]
                rows[r] = [x - k * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class Subquotient:
    """A subgroup of an ambient group Z^d / R, in Smith-normal coordinates.

    ``gens`` are ambient vectors; ``orders[i]`` is the order of ``gens[i]``
    (0 for infinite order).  Every element of the subgroup is
    ``sum c_i gens[i]`` with coordinates unique modulo the orders.
    """

    dim: int
    relations: tuple  # ambient relation vectors
    gens: tuple
    orders: tuple

    @property
    def rank(self) -> int:
        return sum(1 for o in self.orders if o == 0)

    @property
    def torsion(self) -> tuple:
        return tuple(o for o in self.orders if o)

    @cached_property
    def _solver(self):
        cols = [list(g) for g in self.gens] + [list(r) for r in self.relations]
        if not cols:
            return None
        return smith_normal_form(transpose(cols))

    def coords(self, x):
        """Coordinates of an ambient vector x lying in the subgroup."""
        if self._solver is None:
            if any(x):
                raise ValidationError("vector not in subgroup")
            return []
        U, D, V = self._solver
        ub = matvec(U, list(x))
        n = len(V)
        z = [0] * n
        for i, val in enumerate(ub):
            d = D[i][i] if i < n else 0
            if d == 0:
                if val:
                    raise ValidationError("vector not in subgroup")
            elif val % d:
                raise ValidationError("vector not in subgroup")
            else:
                z[i] = val // d
        c = matvec(V, z)[: len(self.gens)]
        return [ci % o if o else ci for ci, o in zip(c, self.orders)]

    def contains(self, x) -> bool:
        try:
            self.coords(x)
        except ValidationError:
            return False
        return True

    def element(self, c):
        v = [0] * self.dim
        for ci, g in zip(c, self.gens):
            if ci:
                v = [a + ci * b for a, b in zip(v, g)]
        return v


def subgroup_from_generators(vectors, relations, dim: int) -> Subquotient:
    """The subgroup of Z^dim / <relations> generated by ``vectors``."""
    vectors = [list(v) for v in vectors]
    relations = [list(r) for r in relations]
    lattice = hermite_column_basis(vectors + relations, dim)
    if not lattice:
        return Subquotient(dim, tuple(map(tuple, relations)), (), ())
    k = len(lattice)
    # express relations in lattice coordinates
    lat_t = transpose(lattice)
    rel_cols = []
    for r in relations:
        c = solve_integer(lat_t, r)
        assert c is not None
        rel_cols.append(c)
    if rel_cols:
        U, D, V = smith_normal_form(transpose(rel_cols))  # k x #rels
    else:
        U, D, V = identity(k), [[0] * 0 for _ in range(k)], []
    # new generators: columns of lattice * U^-1
    uinv = integer_inverse(U)
    new_gens = []
    orders = []
    for j in range(k):
        g = [sum(lat_t[i][l] * uinv[l][j] for l in range(k)) for i in range(dim)]
        d = D[j][j] if (rel_cols and j < len(D[0])) else 0
        if d == 1:
            continue
        new_gens.append(tuple(g))
        orders.append(d)
    return Subquotient(dim, tuple(map(tuple, relations)), tuple(new_gens), tuple(orders))


def kernel_subgroup(hom, src_relations, dst_relations, src_dim: int) -> Subquotient:
    """Kernel of x -> hom x from Z^src / R_src to Z^dst / R_dst."""
    dst_relations = [list(r) for r in dst_relations]
    # solve hom x - R_dst y = 0
    big = [list(row) + [-r[i] for r in dst_relations] for i, row in enumerate(hom)]
    if not big:
        kernel = [[int(i == j) for i in range(src_dim)] for j in range(src_dim)]
    else:
        kernel = [v[:src_dim] for v in integer_kernel(big)]
    return subgroup_from_generators(kernel, src_relations, src_dim)


# linear algebra over F_p --------------------------------------------------

def rref_mod_p(rows, p: int):
    """Reduced row echelon form mod p; returns (rows, pivot columns)."""
    rows = [[x % p for x in r] for r in rows]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                k = rows[i][c]
                rows[i] = [(x - k * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def kernel_mod_p(a, ncols: int, p: int):
    """Basis of {x in F_p^ncols : a x = 0}."""
    if not a:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    rows, pivots = rref_mod_p(a, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [0] * ncols
        v[fcol] = 1
        for r, pc in zip(rows, pivots):
            v[pc] = (-r[fcol]) % p
        basis.append(v)
    return basis


def solve_mod_p(a, b, p: int):
    """One solution x of a x = b over F_p, or None."""
    ncols = len(a[0]) if a else 0
    aug = [list(r) + [y] for r, y in zip(a, b)]
    rows, pivots = rref_mod_p(aug, p) if aug else ([], [])
    if ncols in pivots:
        return None
    x = [0] * ncols
    for r, pc in zip(rows, pivots):
        x[pc] = r[ncols] % p
    return x


def span_basis_mod_p(vectors, p: int):
    rows, _ = rref_mod_p(vectors, p) if vectors else ([], [])
    return rows


class SubspaceModP:
    """A subspace of F_p^d with a fixed basis and a coordinate solver."""

    def __init__(self, basis, dim: int, p: int):
        self.p = p
        self.dim_ambient = dim
        self.basis = [list(b) for b in basis]
        self.dim = len(self.basis)
        # solver: rref of [basis^T | I] style via pivot columns of basis rows
        if self.basis:
            aug = [list(b) + [int(i == j) for j in range(self.dim)] for i, b in enumerate(self.basis)]
            rows, pivots = rref_mod_p(aug, p)
            self._rows = rows
            self._pivots = pivots
            if len([c for c in pivots if c < dim]) != self.dim:
                raise ValidationError("basis vectors are linearly dependent")
        else:
            self._rows, self._pivots = [], []

    def coords(self, v):
        """Coordinates of v in the basis; raises if v is not in the subspace."""
        if not self.basis:
            if any(x % self.p for x in v):
                raise ValidationError("vector not in subspace")
            return []
        p = self.p
        d = self.dim_ambient
        c = [0] * self.dim
        resid = [x % p for x in v]
        for r, pc in zip(self._rows, self._pivots):
            if pc >= d:
                break
            k = resid[pc]
            if k:
                resid = [(x - k * y) % p for x, y in zip(resid, r[:d])]
                c = [(x + k * y) % p for x, y in zip(c, r[d:])]
        if any(resid):
            raise ValidationError("vector not in subspace")
        return c

    def contains(self, v) -> bool:
        try:
            self.coords(v)
        except ValidationError:
            return False
        return True

    def element(self, c):
        v = [0] * self.dim_ambient
        for ci, b in zip(c, self.basis):
            if ci:
                v = [(x + ci * y) % self.p for x, y in zip(v, b)]
        return v


def intersect_subgroups(a: Subquotient, b: Subquotient) -> Subquotient:
    """Intersection of two subgroups of the same ambient group."""
    if a.dim != b.dim or set(a.relations) != set(b.relations):
        raise ValidationError("subgroups live in different ambient groups")
    ga, gb, rel = [list(g) for g in a.gens], [list(g) for g in b.gens], [list(r) for r in a.relations]
    if not ga or not gb:
        return Subquotient(a.dim, a.relations, (), ())
    cols = ga + [[-x for x in g] for g in gb] + [[-x for x in r] for r in rel]
    ker = integer_kernel(transpose(cols))
    vecs = []
    for v in ker:
        x = [0] * a.dim
        for c, g in zip(v[: len(ga)], ga):
            if c:
                x = [s + c * t for s, t in zip(x, g)]
        vecs.append(x)
    return subgroup_from_generators(vecs, rel, a.dim)


def subgroup_order(sq: Subquotient):
    """Order of a subquotient (None if infinite)."""
    if sq.rank:
        return None
    out = 1
    for o in sq.orders:
        out *= o
    return out


def characters_vanishing_on(orders, vectors):
    """Quotient structure for characters killing given coordinate vectors.

    For the group with generators of the given orders (0 = infinite) and the
    subgroup generated by ``vectors`` (coordinate vectors), returns
    (U, invariant factors) such that characters of the quotient are exactly
    x_i = sum_j U[j][i] * chi_j with chi_j * d_j in Z (any rational if d_j = 0).
    """
    k = len(orders)
    rels = [[int(i == j) * o for i in range(k)] for j, o in enumerate(orders) if o]
    rels += [list(v) for v in vectors]
    if not k:
        return [], []
    if not rels:
        return identity(k), [0] * k
    U, D, V = smith_normal_form(transpose(rels))
    ds = [D[j][j] if j < len(D[0]) else 0 for j in range(k)]
    return U, ds
