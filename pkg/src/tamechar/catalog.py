"""Standard tori used by the corpus, the tests and the acceptance runners."""

from __future__ import annotations

from .abelian import identity, matmul, rational_rank
from .errors import ValidationError
from .local_field import TameTower
from .root_data import GaloisRootDatum, RootDatum, mat_key
from .tori import TameTorus


def matrix_order(a, bound: int = 64) -> int:
    ident = mat_key(identity(len(a)))
    cur = mat_key(a)
    for k in range(1, bound + 1):
        if cur == ident:
            return k
        cur = mat_key(matmul(cur, a))
    raise ValidationError("matrix has no finite order")


def torus(rd: RootDatum, q: int, e: int, f: int, N: int, tau=None, phi=None, fi=None, name: str = "") -> TameTorus:
    """Torus of ``rd`` with tau, phi acting on X^* (identity by default)."""
    tower = TameTower(q, e, f, N)
    grd = GaloisRootDatum(rd, tower, tau, phi, fi)
    return TameTorus.from_root_datum(grd, name or rd.name)


def unramified_torus(rd: RootDatum, w, q: int, N: int, name: str = "") -> TameTorus:
    """Unramified torus whose Frobenius acts on X^* by ``w``."""
    return torus(rd, q, 1, matrix_order(w), N, phi=w, name=name)


def sl2_unramified(q: int = 3, N: int = 2) -> TameTorus:
    """Norm-one torus of the unramified quadratic extension, in SL_2."""
    return torus(RootDatum.of_type("A1"), q, 1, 2, N, phi=[[-1]], name="SL2-unramified")


def sl2_ramified(q: int = 3, N: int = 3) -> TameTorus:
    """Norm-one torus of the ramified quadratic extension, in SL_2."""
    return torus(RootDatum.of_type("A1"), q, 2, 1, N, tau=[[-1]], name="SL2-ramified")


def _perm_matrix(tower: TameTower, s):
    """Permutation of Gal(E/F) by left multiplication, as a matrix on Z^{ef}."""
    G = tower.galois_group
    n = len(G)
    m = [[0] * n for _ in range(n)]
    for c, g in enumerate(G):
        m[G.index(tower.gal_mul(s, g))][c] = 1
    return m


def gl_induced(q: int, e: int, f: int, N: int) -> TameTorus:
    """Res_{E/F} G_m inside GL_{ef}: coordinates indexed by Gal(E/F)."""
    tower = TameTower(q, e, f, N)
    rd = RootDatum.gl(e * f)
    grd = GaloisRootDatum(rd, tower, tau=_perm_matrix(tower, tower.tau), phi=_perm_matrix(tower, tower.phi))
    return TameTorus.from_root_datum(grd, f"GL{e * f}-E{e}{f}")


def sp4_unramified(q: int = 3, N: int = 2, kind: str = "minus-one") -> TameTorus:
    """Unramified elliptic tori of Sp_4: Frobenius -1 or a Coxeter element."""
    rd = RootDatum.of_type("SP4")
    w = _sp4_weyl(rd, kind)
    return unramified_torus(rd, w, q, N, name=f"Sp4-{kind}")


def sp4_ramified(q: int = 3, N: int = 3) -> TameTorus:
    """Sp_4 torus on which inertia acts by -1."""
    rd = RootDatum.of_type("SP4")
    return torus(rd, q, 2, 1, N, tau=[[-1, 0], [0, -1]], name="Sp4-ramified")


def _sp4_weyl(rd: RootDatum, kind: str):
    if kind == "minus-one":
        return [[-1, 0], [0, -1]]
    if kind == "coxeter":
        s = [rd.reflection(i) for i in rd.simple]
        return matmul(s[0], s[1])
    raise ValidationError(f"unknown Sp4 torus kind {kind!r}")


def elliptic_unramified_elements(rd: RootDatum):
    """Weyl elements w with no nonzero fixed vector on X^* (tensor Q), up to equality."""
    out = []
    n = rd.rank
    for w in rd.weyl_group:
        rows = [[w[i][j] - (i == j) for j in range(n)] for i in range(n)]
        if rational_rank(rows) == n:
            out.append(w)
    return out


__all__ = [
    "elliptic_unramified_elements",
    "gl_induced",
    "matrix_order",
    "sl2_ramified",
    "sl2_unramified",
    "sp4_ramified",
    "sp4_unramified",
    "torus",
    "unramified_torus",
]
