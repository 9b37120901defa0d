"""The acceptance suite: one runner per criterion, each returning a pass/fail result with counts."""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from . import catalog
from .characters import (
    REAL_CONFIGS,
    char_depth_zero,
    char_real_compare,
    char_shallow,
    char_shallow_via_signs,
    dze_check,
    maximally_unramified_elliptic_tori,
    rational_weyl_group,
    shallow_data,
    shallow_elements,
    weyl_invariant_character,
)
from .cyclotomic import CycNum, gauss_sum, raw_gauss_sum
from .errors import TamecharError, ValidationError
from .factor_calculus import (
    cross_identity,
    is_regular,
    lift_independence,
    mod_a_from_theta,
    ord_x,
    ordx_sl2_oracle,
    random_a_data,
    random_b_data,
    random_chi_data,
    random_zeta_data,
    rescaling_identity,
    sl2_realization_info,
    split_identity,
    standard_sl2_realizations,
    toral_depth,
    valuation_split_ok,
    zeta_identity,
)
from .finite_field import GF
from .pairs import classify_pair, gln_equivalence, howe_factorize, refactorization_check, root_filtration, \
    tower_is_valid
from .root_data import RootDatum, levi_closure_check


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    seconds: float
    limit: float
    detail: dict = field(default_factory=dict)

    @property
    def in_time(self) -> bool:
        return self.seconds < self.limit

    @property
    def ok(self) -> bool:
        return self.passed and self.in_time

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = "" if self.in_time else f" (over the {self.limit:g}s limit)"
        return f"[{status}] {self.number:2d} {self.name}: {self.seconds:.1f}s{extra}"

    def to_json(self) -> dict:
        return {"criterion": self.number, "name": self.name, "passed": self.ok, "exact_checks_passed": self.passed,
                "seconds": round(self.seconds, 2), "limit_seconds": self.limit, "detail": self.detail}


def _run(number: int, name: str, limit: float, body) -> CriterionResult:
    t = time.perf_counter()
    passed, detail = body()
    return CriterionResult(number, name, passed, time.perf_counter() - t, limit, detail)


# 1 ---------------------------------------------------------------------------

def run_dze(seed: int = 0) -> CriterionResult:
    def body():
        n = bad = 0
        by_type = Counter()
        for name, grd in maximally_unramified_elliptic_tori():
            r = dze_check(grd, name=name)
            n += 1
            by_type[name.split()[0]] += 1
            bad += not r.ok
        return n >= 100 and bad == 0, {"tori": n, "mismatches": bad, "by_type": dict(sorted(by_type.items()))}

    return _run(1, "epsilon product equals (-1)^(r_S - r_T) on maximally unramified elliptic tori", 60, body)


# 2 ---------------------------------------------------------------------------

def cross_identity_tori():
    return [
        ("SL2 ramified q=5", catalog.sl2_ramified(5, 4)),
        ("SL2 ramified q=7", catalog.sl2_ramified(7, 4)),
        ("SL2 unramified q=3", catalog.sl2_unramified(3, 3)),
        ("SL2 unramified q=5", catalog.sl2_unramified(5, 3)),
        ("Sp4 unramified Coxeter q=5", catalog.sp4_unramified(5, 3, "coxeter")),
        ("Sp4 unramified -1 q=3", catalog.sp4_unramified(3, 3)),
        ("Sp4 ramified q=5", catalog.sp4_ramified(5, 4)),
    ]


def run_cross_identity(seed: int = 0, per_depth: int = 12, trials: int = 60) -> CriterionResult:
    depths = {Fraction(1, 2), Fraction(1), Fraction(3, 2)}

    def body():
        rng = random.Random(seed)
        counts = Counter()
        bad = 0
        for name, S in cross_identity_tori():
            e = S.tower.e
            for lvl in sorted(S.wild):
                r = Fraction(lvl, e)
                if r not in depths:
                    continue
                got = 0
                for _ in range(trials):
                    if got >= per_depth:
                        break
                    th = S.random_character(rng, depth_level=lvl)
                    try:
                        if toral_depth(S, th) != r:
                            continue
                    except ValidationError:
                        continue
                    g = S.random_point(rng, max_level=lvl - 1)
                    if not is_regular(g):
                        continue
                    try:
                        rep = cross_identity(S, th, g, rng=rng)
                    except ValidationError:
                        continue
                    got += 1
                    counts[(name, str(r))] += 1
                    bad += not rep.ok
                counts.setdefault((name, str(r)), 0)
        total = sum(counts.values())
        ram = sum(v for (n, _), v in counts.items() if "ramified" in n and "unramified" not in n)
        unram = total - ram
        per = {f"{n} r={r}": v for (n, r), v in sorted(counts.items())}
        ok = total >= 50 and ram > 0 and unram > 0 and bad == 0
        return ok, {"configurations": total, "ramified": ram, "unramified": unram, "failures": bad,
                    "per_torus_and_depth": per}

    return _run(2, "toral sign cross-identity on SL2 and Sp4", 120, body)


# 3 ---------------------------------------------------------------------------

def run_gln(seed: int = 0) -> CriterionResult:
    def body():
        reports = [gln_equivalence(q, e, f, 3) for q in (3, 5) for e, f in ((1, 2), (2, 1))]
        return all(r.ok for r in reports), {"shapes": [r.to_json() for r in reports]}

    return _run(3, "GL2 regular pairs equal admissible characters (exhaustive)", 300, body)


# 4 ---------------------------------------------------------------------------

def howe_tori():
    return [
        catalog.gl_induced(3, 1, 2, 3), catalog.gl_induced(3, 2, 1, 3), catalog.gl_induced(5, 2, 1, 3),
        catalog.gl_induced(5, 1, 2, 3), catalog.gl_induced(7, 3, 1, 3), catalog.gl_induced(5, 1, 3, 3),
        catalog.sp4_unramified(3, 3), catalog.sp4_unramified(3, 3, "coxeter"), catalog.sp4_ramified(3, 3),
    ]


def run_howe(seed: int = 0, per_torus: int = 25) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        n = 0
        fails = Counter()
        steps = Counter()
        for S in howe_tori():
            for _ in range(per_torus):
                th = S.random_character(rng)
                a = howe_factorize(S, th, seed=rng.randrange(10**6))
                b = howe_factorize(S, th, seed=rng.randrange(10**6))
                n += 1
                steps[a.d] += 1
                if a.product() != th or b.product() != th:
                    fails["product"] += 1
                if not (tower_is_valid(S, th, a) and tower_is_valid(S, th, b)):
                    fails["validity"] += 1
                if [x for x in a.depths[:a.d] if x > 0] != root_filtration(S, th).breaks:
                    fails["depths vs breaks"] += 1
                if not refactorization_check(S, a, b):
                    fails["refactorization"] += 1
        return n >= 200 and not fails, {"pairs": n, "failures": dict(fails),
                                        "steps_histogram": {str(k): v for k, v in sorted(steps.items())}}

    return _run(4, "Howe factorization: product, depths, refactorization", 120, body)


# 5 ---------------------------------------------------------------------------

def levi_tori():
    return [
        catalog.sl2_unramified(3, 3), catalog.sl2_ramified(5, 4), catalog.gl_induced(5, 1, 3, 3),
        catalog.gl_induced(7, 3, 1, 3), catalog.sp4_unramified(5, 3, "coxeter"), catalog.sp4_ramified(5, 4),
        catalog.torus(RootDatum.of_type("A2"), 5, 1, 2, 3, phi=[[-1, 0], [0, -1]], name="SL3-unitary"),
        catalog.torus(RootDatum.of_type("G2"), 5, 1, 2, 3, phi=[[-1, 0], [0, -1]], name="G2-minus-one"),
        catalog.torus(RootDatum.of_type("A3", "ad"), 5, 1, 2, 3, phi=[[-1, 0, 0], [0, -1, 0], [0, 0, -1]],
                      name="PGL4-minus-one"),
    ]


def run_levi(seed: int = 0, per_torus: int = 60) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        n = checked = bad = 0
        for S in levi_tori():
            rd = S.grd.rd
            e = S.tower.e
            for _ in range(per_torus):
                th = S.random_character(rng)
                rf = root_filtration(S, th)
                n += 1
                for k in range(0, S.tower.N + 1):
                    r = Fraction(k, e)
                    for sub in (rf.R_plus(r), rf.R(r)):
                        checked += 1
                        bad += not levi_closure_check(rd, sub)
        return n >= 500 and bad == 0, {"characters": n, "subsystems_checked": checked, "failures": bad}

    return _run(5, "every R_r is a Levi subsystem", 60, body)


# 6 ---------------------------------------------------------------------------

def delta_tori():
    return [
        catalog.sl2_ramified(5, 4), catalog.sl2_unramified(3, 3), catalog.sp4_unramified(5, 3),
        catalog.sp4_ramified(5, 4), catalog.gl_induced(3, 2, 1, 3), catalog.gl_induced(5, 1, 2, 3),
        catalog.sp4_unramified(3, 3, "coxeter"),
    ]


def run_delta(seed: int = 0, target: int = 200) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        count = Counter()
        bad = Counter()
        tori = delta_tori()
        rounds = 0
        while min(count[k] for k in ("rescaling", "twist", "split", "lift")) < target and rounds < 4000:
            S = tori[rounds % len(tori)]
            rounds += 1
            grd = S.grd
            th = S.random_character(rng)
            try:
                moda = mod_a_from_theta(S, th)
                moda.check_invariants()
            except ValidationError:
                moda = None
            a = random_a_data(grd, rng)
            chi = random_chi_data(S, moda.abar if moda else a, rng)
            chi.check_invariants(rng)
            g = S.random_point(rng)
            checks = [("rescaling", rescaling_identity(g, a, chi, random_b_data(grd, rng))),
                      ("twist", zeta_identity(g, a, chi, random_zeta_data(grd, rng)))]
            if moda is not None:
                checks.append(("lift", lift_independence(g, moda, chi, rng)))
            k0 = rng.choice(sorted(S.wild))
            lo, hi = g.split_at(k0)
            if valuation_split_ok(lo, hi, k0):
                checks.append(("split", split_identity(lo, hi, a, chi)))
            for name, (lhs, rhs) in checks:
                count[name] += 1
                bad[name] += lhs != rhs
        ok = all(count[k] >= target for k in ("rescaling", "twist", "split", "lift")) and not +bad
        return ok, {"instances": dict(sorted(count.items())), "failures": dict(sorted((+bad).items()))}

    return _run(6, "Delta_II^abs: rescaling, twisting, splitting, lift independence", 60, body)


# 7 ---------------------------------------------------------------------------

def run_real(seed: int = 0, samples: int = 100) -> CriterionResult:
    def body():
        dev = {k: char_real_compare(REAL_CONFIGS[k], samples, seed) for k in ("su2", "sl2r")}
        extra = {k: char_real_compare(c, samples, seed) for k, c in REAL_CONFIGS.items() if k not in dev}
        ok = all(v < 1e-9 for v in dev.values())
        fmt = {k: f"{v:.3e}" for k, v in {**dev, **extra}.items()}
        return ok, {"samples": samples, "max_deviation (float, real-compare only)": fmt,
                    "extra_configs_ok": all(v < 1e-9 for v in extra.values())}

    return _run(7, "real comparison with the Harish-Chandra formula", 10, body)


# 8 ---------------------------------------------------------------------------

def run_gauss(seed: int = 0) -> CriterionResult:
    def body():
        fails = []
        n = 0
        one = CycNum.one()
        for q in (3, 5, 7, 9, 11):
            for f in (1, 2, 3):
                Q = q**f
                p = GF.get(*_pp(Q)).p
                field = GF.get(p, _pp(Q)[1])
                sign = 1 if field.is_square(field.neg(1)) else -1
                for scale in (1, field.gen):
                    G = gauss_sum(Q, scale)
                    n += 1
                    if G**4 != one:
                        fails.append(f"G^4 != 1 for q={Q} scale={scale}")
                    if G**2 != CycNum.from_int(sign):
                        fails.append(f"G^2 != sgn(-1) for q={Q} scale={scale}")
                lifted = raw_gauss_sum(Q)
                base = raw_gauss_sum(q)
                if -lifted != (-base) ** f:
                    fails.append(f"Hasse-Davenport fails for q={q} f={f}")
        return not fails, {"cases": n, "failures": fails}

    return _run(8, "Gauss sums: fourth power, square, Hasse-Davenport", 10, body)


def _pp(q: int):
    from .local_field import prime_power

    return prime_power(q)


# 9 ---------------------------------------------------------------------------

def run_ordx(seed: int = 0) -> CriterionResult:
    def body():
        rows = []
        ok = True
        for real in standard_sl2_realizations():
            oracle = ordx_sl2_oracle(real)
            table = ord_x(sl2_realization_info(real), real.fi)
            rows.append({"realization": real.name, "oracle": str(oracle), "table": str(table)})
            ok &= oracle == table
        kinds = {r["table"] for r in rows}
        return ok and len(rows) >= 6 and len(kinds) == 3, {"realizations": rows}

    return _run(9, "ord_x table against the SL2 cocycle oracle", 10, body)


# 10 --------------------------------------------------------------------------

def engine_tori():
    return [
        catalog.sl2_unramified(5, 3), catalog.sl2_unramified(7, 2), catalog.sp4_unramified(5, 3),
        catalog.sp4_unramified(3, 3, "coxeter"), catalog.gl_induced(5, 1, 2, 3), catalog.gl_induced(7, 1, 3, 2),
        catalog.gl_induced(3, 2, 1, 3),
    ]


def run_engine(seed: int = 0, chars_per_torus: int = 8, elements_per_char: int = 4) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        c = Counter()
        bad = Counter()
        for S in engine_tori():
            els = shallow_elements(S, limit=40, lam_range=1)
            W = rational_weyl_group(S)
            done = 0
            for _ in range(12 * chars_per_torus):
                if done >= chars_per_torus:
                    break
                th = S.random_character(rng)
                if classify_pair(S, th).verdict == "not-a-valid-pair":
                    continue
                try:
                    data = shallow_data(S, th)
                except ValidationError:
                    continue
                done += 1
                delta = weyl_invariant_character(S, rng)
                data2 = shallow_data(S, th * delta)
                for g in rng.sample(els, min(elements_per_char, len(els))):
                    row = char_shallow(S, th, g, data=data)
                    w0 = rng.choice(W)
                    checks = [
                        ("weyl", char_shallow(S, th, g.weyl(w0), data=data).total == row.total),
                        ("twist", char_shallow(S, th * delta, g, data=data2).total == row.total * delta(g).as_cyc()),
                    ]
                    if data.toral:
                        checks.append(("pipelines", char_shallow_via_signs(S, th, g, data=data) == row.total))
                    if th.depth_level == 0:
                        checks.append(("depth-zero", char_depth_zero(S, th, g) == row.total))
                    for name, good in checks:
                        c[name] += 1
                        bad[name] += not good
        ok = c["weyl"] >= 100 and c["twist"] >= 100 and c["pipelines"] > 0 and not +bad
        return ok, {"instances": dict(sorted(c.items())), "failures": dict(sorted((+bad).items()))}

    return _run(10, "character engine: Weyl invariance, twisting, pipeline agreement", 120, body)


RUNNERS = {
    1: run_dze, 2: run_cross_identity, 3: run_gln, 4: run_howe, 5: run_levi,
    6: run_delta, 7: run_real, 8: run_gauss, 9: run_ordx, 10: run_engine,
}


def run_all(seed: int = 0, only=None, on_result=None) -> list:
    out = []
    for k, fn in RUNNERS.items():
        if only and k not in only:
            continue
        try:
            res = fn(seed=seed)
        except TamecharError as ex:
            res = CriterionResult(k, fn.__name__, False, 0.0, 0.0, {"error": f"{type(ex).__name__}: {ex}"})
        out.append(res)
        if on_result:
            on_result(res)
    return out


__all__ = ["CriterionResult", "RUNNERS", "run_all"] + [f.__name__ for f in RUNNERS.values()]
