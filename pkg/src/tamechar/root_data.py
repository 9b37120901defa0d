"""Root data with a metacyclic Galois action, root orbits and split ranks.

Characters (X^*) and cocharacters (X_*) are integer tuples in dual bases, so
the pairing is the dot product.  A matrix ``A`` acting on X^* (columns are
images of basis vectors) acts on X_* through ``(A^-1)^T``, which keeps the
pairing invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .abelian import identity, integer_inverse, matmul, matvec, rational_rank, transpose
from .errors import ValidationError
from .local_field import Subfield, TameTower


def pair(x, y) -> int:
    return sum(a * b for a, b in zip(x, y))


def neg(v):
    return tuple(-a for a in v)


def mat_key(a):
    return tuple(tuple(r) for r in a)


def mat_pow(a, k: int):
    n = len(a)
    out = identity(n)
    for _ in range(k):
        out = matmul(out, a)
    return out


def dual_action(a):
    """Matrix on X_* of the automorphism with matrix ``a`` on X^*."""
    return transpose(integer_inverse(a))


class RootDatum:
    """A reduced root datum (X^*, R, X_*, R^vee) with a chosen base.

    ``roots[i]`` and ``coroots[i]`` correspond; ``simple`` indexes the base.
    """

    def __init__(self, rank: int, roots, coroots, simple, name: str = ""):
        self.rank = rank
        self.roots = [tuple(r) for r in roots]
        self.coroots = [tuple(c) for c in coroots]
        self.simple = list(simple)
        self.name = name
        if len(self.roots) != len(self.coroots):
            raise ValidationError("roots and coroots have different lengths")
        self._index = {r: i for i, r in enumerate(self.roots)}
        for r, c in zip(self.roots, self.coroots):
            if len(r) != rank or len(c) != rank:
                raise ValidationError("root vector of the wrong length")
            if pair(r, c) != 2:
                raise ValidationError(f"<root, coroot> != 2 for {r}")
            if neg(r) not in self._index:
                raise ValidationError("root system is not closed under negation")
        for i in range(len(self.roots)):
            for j in range(len(self.roots)):
                if self.reflect_root(i, j) not in self._index:
                    raise ValidationError("root system is not closed under reflections")

    def __repr__(self):
        return f"RootDatum({self.name or 'custom'}, rank={self.rank}, |R|={len(self.roots)})"

    # constructors -----------------------------------------------------
    @classmethod
    def from_cartan(cls, cartan, lattice: str = "sc", name: str = "") -> "RootDatum":
        """Root datum of a semisimple group from its Cartan matrix.

        Convention: ``cartan[i][j] = <alpha_j, alpha_i^vee>``.  ``lattice`` is
        ``"sc"`` (X_* = coroot lattice) or ``"ad"`` (X^* = root lattice).
        """
        C = [list(r) for r in cartan]
        n = len(C)
        if any(C[i][i] != 2 for i in range(n)):
            raise ValidationError("Cartan matrix must have 2 on the diagonal")
        # roots in simple-root coordinates, coroots in simple-coroot coordinates
        simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        pairs_ = {(s, s) for s in simple}
        frontier = list(pairs_)
        while frontier:
            b, bc = frontier.pop()
            for i in range(n):
                ai = simple[i]
                bi = sum(b[j] * C[i][j] for j in range(n))  # <b, alpha_i^vee>
                ci = sum(bc[j] * C[j][i] for j in range(n))  # <alpha_i, bc>
                nb = tuple(b[j] - bi * ai[j] for j in range(n))
                nc = tuple(bc[j] - ci * ai[j] for j in range(n))
                if (nb, nc) not in pairs_:
                    pairs_.add((nb, nc))
                    frontier.append((nb, nc))
        # positive roots first, ordered by height
        rc = sorted(pairs_, key=lambda t: (-1 if all(x >= 0 for x in t[0]) else 1, abs(sum(t[0])), t[0]))
        if lattice == "sc":
            roots = [tuple(sum(b[j] * C[i][j] for j in range(n)) for i in range(n)) for b, _ in rc]
            coroots = [c for _, c in rc]
        elif lattice == "ad":
            roots = [b for b, _ in rc]
            coroots = [tuple(sum(c[j] * C[j][i] for j in range(n)) for i in range(n)) for _, c in rc]
        else:
            raise ValidationError(f"unknown lattice {lattice!r}; use 'sc' or 'ad'")
        simple_idx = [rc.index((s, s)) for s in simple]
        return cls(n, roots, coroots, simple_idx, name=name or f"cartan{n}-{lattice}")

    @classmethod
    def gl(cls, n: int) -> "RootDatum":
        roots, coroots = [], []
        for i in range(n):
            for j in range(n):
                if i != j:
                    v = tuple(int(k == i) - int(k == j) for k in range(n))
                    roots.append(v)
                    coroots.append(v)
        simple = [roots.index(tuple(int(k == i) - int(k == i + 1) for k in range(n))) for i in range(n - 1)]
        return cls(n, roots, coroots, simple, name=f"GL{n}")

    @classmethod
    def of_type(cls, typ: str, lattice: str = "sc") -> "RootDatum":
        typ = typ.upper()
        table = {
            "A1": [[2]],
            "A2": [[2, -1], [-1, 2]],
            "A3": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
            "C2": [[2, -2], [-1, 2]],
            "B2": [[2, -1], [-2, 2]],
            "G2": [[2, -3], [-1, 2]],
        }
        if typ.startswith("GL"):
            return cls.gl(int(typ[2:]))
        if typ == "SP4":
            typ, lattice = "C2", "sc"
        if typ not in table:
            raise ValidationError(f"unknown root system type {typ!r}")
        return cls.from_cartan(table[typ], lattice, name=f"{typ}-{lattice}")

    # basic structure --------------------------------------------------
    def index(self, root) -> int:
        try:
            return self._index[tuple(root)]
        except KeyError:
            raise ValidationError(f"{root} is not a root") from None

    def coroot(self, root):
        return self.coroots[self.index(root)]

    def reflect_root(self, i: int, j: int):
        """s_{roots[i]}(roots[j])."""
        a, ac, b = self.roots[i], self.coroots[i], self.roots[j]
        k = pair(b, ac)
        return tuple(x - k * y for x, y in zip(b, a))

    def reflection(self, i: int):
        """Matrix on X^* of the reflection in roots[i]."""
        a, ac = self.roots[i], self.coroots[i]
        n = self.rank
        return [[int(r == c) - a[r] * ac[c] for c in range(n)] for r in range(n)]

    @cached_property
    def positive(self) -> frozenset:
        """Positive roots for the chosen base."""
        return frozenset(i for i, r in enumerate(self.roots) if all(c >= 0 for c in self._simple_coords(r)))

    def _simple_coords(self, r):
        """Coordinates of a root in the base, via rational solve."""
        simple = [self.roots[i] for i in self.simple]
        k = len(simple)
        rows = [[Fraction(simple[j][i]) for j in range(k)] + [Fraction(r[i])] for i in range(self.rank)]
        piv_cols = []
        rix = 0
        for c in range(k):
            piv = next((i for i in range(rix, len(rows)) if rows[i][c] != 0), None)
            if piv is None:
                continue
            rows[rix], rows[piv] = rows[piv], rows[rix]
            pv = rows[rix][c]
            rows[rix] = [x / pv for x in rows[rix]]
            for i in range(len(rows)):
                if i != rix and rows[i][c] != 0:
                    kk = rows[i][c]
                    rows[i] = [x - kk * y for x, y in zip(rows[i], rows[rix])]
            piv_cols.append(c)
            rix += 1
        sol = [Fraction(0)] * k
        for i, c in enumerate(piv_cols):
            sol[c] = rows[i][k]
        return sol

    @cached_property
    def weyl_group(self) -> list:
        """All Weyl group elements as matrices on X^* (identity first)."""
        gens = [mat_key(self.reflection(i)) for i in self.simple]
        n = self.rank
        ident = mat_key(identity(n))
        seen = {ident: None}
        order = [ident]
        frontier = [ident]
        while frontier:
            nxt = []
            for w in frontier:
                for s in gens:
                    ws = mat_key(matmul(w, s))
                    if ws not in seen:
                        seen[ws] = None
                        order.append(ws)
                        nxt.append(ws)
            frontier = nxt
        return order

    def weyl_word(self, word) -> tuple:
        """Matrix of s_{i1} s_{i2} ... for a list of simple-reflection indices (0-based)."""
        out = identity(self.rank)
        for i in word:
            if not 0 <= i < len(self.simple):
                raise ValidationError(f"simple reflection index {i} out of range")
            out = matmul(out, self.reflection(self.simple[i]))
        return mat_key(out)

    def act(self, a, root):
        return tuple(matvec(a, root))

    def preserves_roots(self, a) -> bool:
        return all(self.act(a, r) in self._index for r in self.roots)

    def central_cocharacter_rank(self) -> int:
        """Dimension of the space of cocharacters orthogonal to all roots."""
        return self.rank - rational_rank(self.roots) if self.roots else self.rank

    def subsystem_weyl_group(self, idx) -> list:
        """Weyl group of a closed subsystem (root indices) as matrices on X^*."""
        idx = sorted(set(idx))
        n = self.rank
        ident = mat_key(identity(n))
        gens = [mat_key(self.reflection(i)) for i in idx]
        seen = {ident}
        order = [ident]
        frontier = [ident]
        while frontier:
            nxt = []
            for w in frontier:
                for s in gens:
                    ws = mat_key(matmul(w, s))
                    if ws not in seen:
                        seen.add(ws)
                        order.append(ws)
                        nxt.append(ws)
            frontier = nxt
        return order

    def is_pinned_automorphism(self, a) -> bool:
        """True if ``a`` permutes the base."""
        base = {self.roots[i] for i in self.simple}
        return {self.act(a, r) for r in base} == base


def levi_closure_check(rd: RootDatum, subset) -> bool:
    """True if ``subset`` (roots) equals R intersected with its rational span."""
    sub = {tuple(r) for r in subset}
    if not sub:
        return True
    base_rank = rational_rank(list(sub))
    for r in rd.roots:
        if r not in sub and rational_rank(list(sub) + [r]) == base_rank:
            return False
    return True


def kottwitz_sign(qs_rank: int, rank: int) -> int:
    """(-1)^(quasi-split rank - rank)."""
    return -1 if (qs_rank - rank) % 2 else 1


@dataclass(frozen=True)
class RootOrbitInfo:
    """One Gamma-orbit of roots with its fields of definition."""

    rep: tuple
    orbit: tuple
    stabilizer: frozenset  # Gamma_alpha
    pm_stabilizer: frozenset  # Gamma_{+-alpha}
    symmetric: bool
    ramified: bool
    e_alpha: int
    f_alpha: int
    e_pm: int
    f_pm: int
    fi: int | None

    @property
    def kind(self) -> str:
        if not self.symmetric:
            return "asymmetric"
        return "symmetric ramified" if self.ramified else "symmetric unramified"


class GaloisRootDatum:
    """A root datum with an action of Gal(E/F) of a tame tower.

    ``tau`` and ``phi`` are matrices on X^*; the group element tau^i phi^j
    acts as tau^i phi^j.  ``fi`` optionally assigns +-1 to symmetric orbits
    (keyed by any root of the orbit).
    """

    def __init__(self, rd: RootDatum, tower: TameTower, tau=None, phi=None, fi=None):
        n = rd.rank
        self.rd = rd
        self.tower = tower
        self.tau = mat_key(tau if tau is not None else identity(n))
        self.phi = mat_key(phi if phi is not None else identity(n))
        for name, a in (("tau", self.tau), ("phi", self.phi)):
            if len(a) != n or any(len(r) != n for r in a):
                raise ValidationError(f"{name} must be a {n}x{n} matrix")
            try:
                integer_inverse(a)
            except (ValidationError, StopIteration):
                raise ValidationError(f"{name} is not invertible over Z") from None
            if not rd.preserves_roots(a):
                raise ValidationError(f"{name} does not preserve the root system")
        e, f, q = tower.e, tower.f, tower.q
        ident = mat_key(identity(n))
        if mat_key(mat_pow(self.tau, e)) != ident:
            raise ValidationError(f"tau^e != 1 on X^* (e = {e})")
        if mat_key(mat_pow(self.phi, f)) != ident:
            raise ValidationError(f"phi^f != 1 on X^* (f = {f})")
        lhs = matmul(matmul(self.phi, self.tau), integer_inverse(self.phi))
        if mat_key(lhs) != mat_key(mat_pow(self.tau, q % e)):
            raise ValidationError("phi tau phi^-1 != tau^q on X^*")
        self._mats = {}
        for s in tower.galois_group:
            i, j = s
            self._mats[s] = mat_key(matmul(mat_pow(self.tau, i), mat_pow(self.phi, j)))
        self._dual = {s: mat_key(dual_action(m)) for s, m in self._mats.items()}
        self.fi = {}
        if fi:
            for r, v in fi.items():
                self.set_fi(tuple(r), v)

    def __repr__(self):
        return f"GaloisRootDatum({self.rd!r}, {self.tower!r})"

    def matrix(self, s):
        return self._mats[s]

    def dual_matrix(self, s):
        return self._dual[s]

    def act(self, s, x):
        return tuple(matvec(self._mats[s], x))

    def act_cochar(self, s, x):
        return tuple(matvec(self._dual[s], x))

    # orbits -----------------------------------------------------------
    def orbit(self, root):
        return tuple(sorted({self.act(s, root) for s in self.tower.galois_group}))

    def stabilizer(self, root) -> frozenset:
        return frozenset(s for s in self.tower.galois_group if self.act(s, root) == tuple(root))

    def pm_stabilizer(self, root) -> frozenset:
        r = tuple(root)
        return frozenset(s for s in self.tower.galois_group if self.act(s, r) in (r, neg(r)))

    def field_of(self, H) -> Subfield:
        return self.tower.subfield(H)

    def orbit_reps(self, roots=None):
        """One representative per Gamma x {+-1}-orbit, in root order."""
        roots = self.rd.roots if roots is None else roots
        seen = set()
        reps = []
        for r in roots:
            r = tuple(r)
            if r in seen:
                continue
            orb = set(self.orbit(r))
            orb |= {neg(x) for x in orb}
            seen |= orb
            reps.append(r)
        return reps

    def gamma_orbit_reps(self, roots=None):
        """One representative per Gamma-orbit."""
        roots = self.rd.roots if roots is None else roots
        seen = set()
        reps = []
        for r in roots:
            r = tuple(r)
            if r in seen:
                continue
            seen |= set(self.orbit(r))
            reps.append(r)
        return reps

    def info(self, root) -> RootOrbitInfo:
        r = tuple(root)
        st = self.stabilizer(r)
        pst = self.pm_stabilizer(r)
        Fa = self.tower.subfield(st)
        Fp = self.tower.subfield(pst)
        symmetric = len(pst) > len(st)
        ramified = symmetric and Fa.e == 2 * Fp.e
        fi = self.get_fi(r) if symmetric else None
        return RootOrbitInfo(r, self.orbit(r), st, pst, symmetric, ramified, Fa.e, Fa.f, Fp.e, Fp.f, fi)

    def classify_roots(self):
        return [self.info(r) for r in self.orbit_reps()]

    # toral invariants -------------------------------------------------
    def _orbit_key(self, root):
        orb = set(self.orbit(root)) | {neg(x) for x in self.orbit(root)}
        return min(orb)

    def set_fi(self, root, value: int):
        if value not in (1, -1):
            raise ValidationError("toral invariant must be +1 or -1")
        root = tuple(root)
        self.rd.index(root)
        if len(self.pm_stabilizer(root)) == len(self.stabilizer(root)):
            raise ValidationError(f"toral invariant given for the asymmetric root {root}")
        self.fi[self._orbit_key(root)] = value

    def get_fi(self, root) -> int:
        return self.fi.get(self._orbit_key(root), 1)

    def symmetric_reps(self):
        return [r for r in self.orbit_reps() if self.info(r).symmetric]

    # ranks ------------------------------------------------------------
    def invariant_cocharacter_rank(self) -> int:
        """dim of X_*^Gamma tensor Q."""
        n = self.rd.rank
        rows = []
        for s in (self.tower.tau, self.tower.phi):
            m = self._dual[s]
            rows.extend([[m[i][j] - (i == j) for j in range(n)] for i in range(n)])
        return n - rational_rank(rows)

    def is_elliptic(self) -> bool:
        """Every Gamma-invariant cocharacter is central."""
        n = self.rd.rank
        rows = []
        for s in (self.tower.tau, self.tower.phi):
            m = self._dual[s]
            rows.extend([[m[i][j] - (i == j) for j in range(n)] for i in range(n)])
        rows.extend([list(r) for r in self.rd.roots])
        fixed_and_central = n - rational_rank(rows)
        return fixed_and_central == self.invariant_cocharacter_rank()

    def inertia_positive_system(self, roots=None):
        """A positive system (set of roots) of the given subsystem preserved by inertia, or None."""
        roots = [tuple(r) for r in (self.rd.roots if roots is None else roots)]
        if not roots:
            return frozenset()
        tau = self.tower.tau
        # positive systems are cut out by generic linear functionals; try the
        # Weyl translates of the standard one
        for w in self.rd.weyl_group:
            pos = frozenset(r for r in roots if self.rd.index(tuple(matvec(integer_inverse(w), r))) in self.rd.positive)
            if len(pos) * 2 == len(roots) and all(self.act(tau, r) in pos for r in pos):
                return pos
        return None

    def restrict(self, roots) -> "GaloisRootDatum":
        """Same action on a Gamma-stable closed subsystem."""
        roots = [tuple(r) for r in roots]
        idx = [self.rd.index(r) for r in roots]
        simple = _base_of(self.rd, roots)
        sub = RootDatum(self.rd.rank, roots, [self.rd.coroots[i] for i in idx],
                        [roots.index(s) for s in simple], name=f"{self.rd.name}-sub")
        out = GaloisRootDatum.__new__(GaloisRootDatum)
        out.rd = sub
        out.tower = self.tower
        out.tau, out.phi = self.tau, self.phi
        out._mats, out._dual = self._mats, self._dual
        out.fi = {}
        for r in roots:
            if len(self.pm_stabilizer(r)) > len(self.stabilizer(r)):
                out.fi[out._orbit_key(r)] = self.get_fi(r)
        return out


def _base_of(rd: RootDatum, roots):
    """Simple roots of a closed subsystem, for the positive system induced by rd's base."""
    pos = [r for r in roots if rd.index(r) in rd.positive]
    posset = set(pos)
    simple = []
    for r in pos:
        decomposable = False
        for a in pos:
            b = tuple(x - y for x, y in zip(r, a))
            if b in posset:
                decomposable = True
                break
        if not decomposable:
            simple.append(r)
    return simple


def split_ranks(grd: GaloisRootDatum, qs: GaloisRootDatum | None = None, form_rank: int | None = None):
    """(r_G, r_S, r_T): split rank of the form, of the torus, and of the minimal Levi of the quasi-split form.

    ``qs`` carries the quasi-split (pinned) action; ``form_rank`` defaults to
    the quasi-split rank.
    """
    r_S = grd.invariant_cocharacter_rank()
    r_T = (qs or grd).invariant_cocharacter_rank()
    r_G = r_T if form_rank is None else form_rank
    return r_G, r_S, r_T


def fi_by_unitary_rule(grd: GaloisRootDatum) -> dict:
    """Toral invariants of a maximally unramified torus.

    A symmetric root gets -1 exactly when its Dynkin component (for an
    inertia-stable base) has type A_{2n} and the inertia stabilizer of the
    root acts on that component nontrivially; otherwise +1.
    """
    rd = grd.rd
    pos = grd.inertia_positive_system()
    if pos is None:
        raise ValidationError("torus is not maximally unramified: inertia preserves no positive system")
    simple = _base_of_positive(rd, pos)
    comps = _components(rd, simple)
    tower = grd.tower
    out = {}
    for r in grd.symmetric_reps():
        comp = next(c for c in comps if _in_span(rd, r, c))
        is_a2n = _is_type_a_even(rd, comp)
        inertia_stab = [s for s in grd.stabilizer(r) if tower.is_inertia(s)]
        nontrivial = any(any(grd.act(s, b) != b for b in comp) for s in inertia_stab)
        out[grd._orbit_key(r)] = -1 if (is_a2n and nontrivial) else 1
    return out


def _base_of_positive(rd: RootDatum, pos):
    posset = set(pos)
    simple = []
    for r in pos:
        if not any(tuple(x - y for x, y in zip(r, a)) in posset for a in pos):
            simple.append(r)
    return simple


def _components(rd: RootDatum, simple):
    simple = list(simple)
    adj = {s: [t for t in simple if t != s and pair(t, rd.coroot(s)) != 0] for s in simple}
    comps, seen = [], set()
    for s in simple:
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps


def _in_span(rd: RootDatum, r, comp) -> bool:
    return rational_rank(list(comp) + [r]) == rational_rank(list(comp))


def _is_type_a_even(rd: RootDatum, comp) -> bool:
    """Component is simply laced, a path, with an even number of nodes."""
    if len(comp) % 2:
        return False
    degree = {}
    for s in comp:
        d = 0
        for t in comp:
            if t != s:
                v = pair(t, rd.coroot(s))
                if v not in (0, -1) or pair(s, rd.coroot(t)) not in (0, -1):
                    return False
                d += v != 0
        degree[s] = d
    edges = sum(degree.values()) // 2
    return edges == len(comp) - 1 and max(degree.values(), default=0) <= 2
