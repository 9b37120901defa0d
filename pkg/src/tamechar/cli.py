"""Command-line interface: load a config, run one computation, emit a deterministic report."""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import jsonschema

from . import __version__
from .config import ElementSpec, RunConfig, schema
from .errors import InvariantViolation, TamecharError, ValidationError

FORMATS = ("json", "csv", "table")
FLOAT_TAG = "float (real-compare only)"


# rendering -----------------------------------------------------------------------

def stamp(command: str) -> dict:
    return {"tamechar_version": __version__, "command": command}


def render(report: dict, fmt: str) -> str:
    """JSON is the source of truth; csv and table are derived from it."""
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return _render_csv(report)
    return _render_table(report)


def _scalar(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return str(v)


def _render_csv(report: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# tamechar {report.get('tamechar_version')} {report.get('command')}"
              + (f" N={report['N']}" if "N" in report else "")
              + (f" normalization={report['normalization']}" if "normalization" in report else "") + "\n")
    w = csv.writer(buf, lineterminator="\n")
    rows = report.get("rows")
    if rows:
        cols = list(rows[0].keys())
        w.writerow(cols)
        for r in rows:
            w.writerow([_scalar(r.get(c, "")) for c in cols])
    else:
        w.writerow(["key", "value"])
        for k in sorted(report):
            if k != "summary":
                w.writerow([k, _scalar(report[k])])
    return buf.getvalue()


def _render_table(report: dict) -> str:
    out = [f"# tamechar {report.get('tamechar_version')} {report.get('command')}"
           + (f" N={report['N']}" if "N" in report else "")]
    out += list(report.get("summary", []))
    skip = {"summary", "rows", "tamechar_version", "command", "N"}
    for k in sorted(report):
        if k not in skip:
            out.append(f"{k}: {_scalar(report[k])}")
    rows = report.get("rows")
    if rows:
        cols = list(rows[0].keys())
        cells = [[_scalar(r.get(c, "")) for c in cols] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        out.append("  ".join(c.ljust(wd) for c, wd in zip(cols, widths)).rstrip())
        out.append("  ".join("-" * wd for wd in widths))
        out += ["  ".join(x.ljust(wd) for x, wd in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(out) + "\n"


# helpers -------------------------------------------------------------------------

def _load(args) -> RunConfig:
    return RunConfig.load(args.config)


def _torus_and_character(args, cfg: RunConfig):
    S = cfg.build_torus(args.trunc_override)
    theta = cfg.build_character(S, seed=args.seed)
    return S, theta


def _elements(args, cfg: RunConfig, S) -> list:
    """Elements from --gamma (an index into the config's list or an element JSON), else the whole list."""
    if args.gamma is None:
        els = cfg.build_elements(S)
        if not els:
            raise ValidationError("no elements: give --gamma or an 'elements' list in the config")
        return els
    if args.gamma.strip().lstrip("-").isdigit():
        els = cfg.build_elements(S)
        i = int(args.gamma)
        if not 0 <= i < len(els):
            raise ValidationError(f"--gamma index {i} out of range (config has {len(els)} elements)")
        return [els[i]]
    try:
        spec = json.loads(args.gamma)
    except json.JSONDecodeError:
        raise ValidationError("--gamma must be an element index or a JSON object like {\"tame\": [1]}") from None
    try:
        jsonschema.validate(spec, {"$defs": schema()["$defs"], "$ref": "#/$defs/element"})
    except jsonschema.ValidationError as ex:
        raise ValidationError(f"--gamma: {ex.message}") from None
    wild = tuple(sorted((int(k), tuple(v)) for k, v in spec.get("wild", {}).items()))
    return [ElementSpec(tuple(spec["tame"]), wild).build(S)]


def _pmap(fn, items, threads: int) -> list:
    """Ordered map; threads only change scheduling, never the output."""
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _depth_for_signs(args, S, theta) -> Fraction:
    from .factor_calculus import toral_depth

    if args.depth is not None:
        return Fraction(args.depth)
    try:
        return toral_depth(S, theta)
    except ValidationError:
        return theta.depth


# commands --------------------------------------------------------------------------

def cmd_classify(args) -> dict:
    from .pairs import classify_pair

    cfg = _load(args)
    S, theta = _torus_and_character(args, cfg)
    rep = classify_pair(S, theta)
    out = stamp("classify") | {"config": cfg.name, "N": S.tower.N, "theta": theta.to_json(),
                               "depth": str(theta.depth)} | rep.to_json()
    out["summary"] = [f"verdict: {rep.verdict}"] + [f"reason: {r}" for r in rep.reasons]
    return out


def cmd_factorize(args) -> dict:
    from .pairs import howe_factorize, refactorization_check, tower_is_valid

    cfg = _load(args)
    S, theta = _torus_and_character(args, cfg)
    tower = howe_factorize(S, theta, seed=args.seed)
    exact = tower.product() == theta
    if not exact:
        raise InvariantViolation("product of the Howe factors differs from theta")
    valid = tower_is_valid(S, theta, tower)
    if not valid:
        raise InvariantViolation("Howe tower fails its depth or genericity conditions")
    other = howe_factorize(S, theta, seed=(args.seed or 0) + 1)
    refac = refactorization_check(S, tower, other)
    rows = []
    for i in range(-1, tower.d + 1):
        ph = tower.phi(i)
        rows.append({"i": i, "depth": str(tower.depths[i]) if i >= 0 else "",
                     "levi_roots": len(tower.levis[i]) if i >= 0 else len(tower.levis[0]),
                     "phi_tame": ",".join(str(x) for x in ph.tame), "phi_wild": _scalar(ph.to_json()["wild"])})
    out = stamp("factorize") | {"config": cfg.name, "N": S.tower.N, "theta": theta.to_json(),
                                "tower": tower.to_json(), "valid": valid, "refactorization_check": refac,
                                "rows": rows}
    out["summary"] = [f"d = {tower.d}", "depths: " + " ".join(str(r) for r in tower.depths),
                      "product check: exact", f"tower valid: {valid}",
                      f"refactorization against a reseeded tower: {'ok' if refac else 'FAILED'}"]
    return out


def cmd_signs(args) -> dict:
    from .factor_calculus import cross_identity, mod_a_from_theta, sign_bundle

    cfg = _load(args)
    S, theta = _torus_and_character(args, cfg)
    r = _depth_for_signs(args, S, theta)
    moda = mod_a_from_theta(S, theta, cfg.scale)
    moda.check_invariants()
    els = _elements(args, cfg, S)

    def row(g):
        b = sign_bundle(g, r, moda.abar, scale=cfg.scale)
        d = {"element": str(g)} | b.to_json()
        try:
            rep = cross_identity(S, theta, g, cfg.scale)
            d["cross_identity"] = rep.to_json()
        except ValidationError as ex:
            d["cross_identity"] = f"n/a: {ex}"
        return d

    rows = _pmap(row, els, args.threads)
    out = stamp("signs") | {"config": cfg.name, "N": S.tower.N, "r": str(r), "theta": theta.to_json(),
                            "mod_a": moda.to_json(), "rows": rows}
    out["summary"] = [f"r = {r}"] + [f"{x['element']}: eps_sr={x['eps_sr']} eps_r={x['eps_r']} "
                                     f"e~={x['e_tilde']} eps_fr={x['eps_fr']}" for x in rows]
    return out


def cmd_delta2(args) -> dict:
    from .factor_calculus import chi_data, delta_II_abs, mod_a_from_theta

    cfg = _load(args)
    S, theta = _torus_and_character(args, cfg)
    moda = mod_a_from_theta(S, theta, cfg.scale)
    moda.check_invariants()
    chi = chi_data(S, moda, args.variant, cfg.scale)
    els = _elements(args, cfg, S)

    def row(g):
        val, parts = delta_II_abs(g, moda.abar, chi, breakdown=True)
        return {"element": str(g), "delta": str(val),
                "orbits": [{"root": list(rt), "factor": str(v)} for rt, v in parts]}

    rows = _pmap(row, els, args.threads)
    out = stamp("delta2") | {"config": cfg.name, "N": S.tower.N, "variant": args.variant,
                             "chi_kinds": {",".join(map(str, k)): v for k, v in sorted(chi.kinds.items())},
                             "rows": rows}
    out["summary"] = [f"{x['element']}: Delta_II^abs = {x['delta']}" for x in rows]
    return out


def cmd_char_table(args) -> dict:
    from .characters import char_shallow, shallow_data, shallow_elements

    cfg = _load(args)
    S, theta = _torus_and_character(args, cfg)
    data = shallow_data(S, theta, cfg.scale)
    if args.elements == "all-shallow":
        els = shallow_elements(S, limit=args.limit)
    else:
        els = _elements(args, cfg, S)

    def row(g):
        r = char_shallow(S, theta, g, cfg.scale, data)
        return {"element": r.element,
                "terms": ";".join(f"{_wstr(t.weyl)}:{t.product}" for t in r.terms),
                "theta": str(theta(g)), "theta_prime": str(data.theta_prime(g)),
                "total": str(r.total), "total_float": r.to_json()["total_float"]}

    rows = _pmap(row, els, args.threads)
    out = stamp("char-table") | {"config": cfg.name, "N": S.tower.N, "theta": theta.to_json(),
                                 "constant": str(data.constant), "toral": data.toral,
                                 "normalization": "Phi (|D|^(1/2) omitted)", "rows": rows}
    out["summary"] = [f"{len(rows)} elements, constant {data.constant}"]
    return out


def _wstr(w) -> str:
    return "[" + ",".join("[" + ",".join(map(str, r)) + "]" for r in w) + "]"


def cmd_real_compare(args) -> dict:
    import math

    from .characters import real_character_values

    cfg = _load(args)
    if cfg.real is None:
        raise ValidationError(f"config {cfg.name!r} has no 'real' section")
    rng = random.Random(args.seed or 0)
    rows = []
    worst = 0.0
    while len(rows) < cfg.samples:
        ang = [rng.uniform(0, 2 * math.pi) for _ in range(cfg.real.rd.rank)]
        try:
            a, b = real_character_values(cfg.real, ang)
        except ValidationError:
            continue
        worst = max(worst, abs(a - b))
        rows.append({"angles": " ".join(f"{x:.12f}" for x in ang), "padic_shape": _c(a), "harish_chandra": _c(b),
                     "deviation": f"{abs(a - b):.3e}"})
    ok = worst < 1e-9
    out = stamp("real-compare") | {"config": cfg.name, "samples": len(rows), "values": FLOAT_TAG,
                                   "max_deviation": f"{worst:.3e}", "tolerance": "1e-09", "ok": ok, "rows": rows}
    out["summary"] = [f"max deviation {worst:.3e} over {len(rows)} angles: {'OK' if ok else 'FAIL'}"]
    if not ok:
        raise _Failed(out)
    return out


def _c(z: complex) -> str:
    return f"{z.real:.12f}{'+' if z.imag >= 0 else '-'}{abs(z.imag):.12f}i"


def cmd_dze_check(args) -> dict:
    from .characters import dze_check

    cfg = _load(args)
    grd = cfg.build_grd(args.trunc_override)
    res = dze_check(grd, cfg.scale, cfg.name)
    out = stamp("dze-check") | {"config": cfg.name, "N": grd.tower.N, "lhs": str(res.lhs), "rhs": str(res.rhs),
                                "r_S": res.r_S, "r_T": res.r_T, "ok": res.ok, "summary": [res.line()]}
    if not res.ok:
        raise InvariantViolation(res.line())
    return out


def cmd_gln_oracle(args) -> dict:
    from .pairs import GLNAdmissibilityOracle, classify_pair, gln_equivalence

    cfg = _load(args)
    if not cfg.torus.induced:
        raise ValidationError("gln-oracle needs an induced GL_n torus ('torus': {'induced': true})")
    S = cfg.build_torus(args.trunc_override)
    T = S.tower
    out = stamp("gln-oracle") | {"config": cfg.name, "N": T.N}
    summary = []
    if cfg.character is not None and not args.exhaustive:
        theta = cfg.build_character(S, seed=args.seed)
        oracle = GLNAdmissibilityOracle(T, T.N)
        G = T.galois_group
        cache = {}

        def exp(x):
            if x not in cache:
                cache[x] = S.point_from_field([x.galois(g) for g in G])
            return theta.exponent(cache[x])

        adm = oracle.verdict(exp)
        reg = classify_pair(S, theta).verdict
        agree = (adm == "admissible") == (reg != "not-a-valid-pair")
        out |= {"theta": theta.to_json(), "oracle": adm, "classifier": reg, "agree": agree}
        summary.append(f"oracle: {adm}; classifier: {reg}; {'agree' if agree else 'DISAGREE'}")
        if not agree:
            raise InvariantViolation(summary[-1])
    else:
        rep = gln_equivalence(T.q, T.e, T.f, T.N)
        out |= rep.to_json()
        summary.append(f"{rep.total} characters: {rep.regular} regular, {rep.admissible} admissible, "
                       f"{len(rep.mismatches)} mismatches")
        if not rep.ok:
            raise InvariantViolation(summary[-1])
    out["summary"] = summary
    return out


def cmd_verify_all(args) -> dict:
    from .acceptance import run_all

    only = {int(x) for x in args.only.split(",")} if args.only else None
    stream = args.format == "table"

    def progress(res):
        if stream:
            print(res.line(), flush=True)

    results = run_all(seed=args.seed or 0, only=only, on_result=progress)
    ok = all(r.ok for r in results)
    out = stamp("verify-all") | {"passed": sum(r.ok for r in results), "total": len(results), "ok": ok,
                                 "rows": [{"criterion": r.number, "status": "PASS" if r.ok else "FAIL",
                                           "name": r.name} for r in results],
                                 "details": [r.to_json() for r in results]}
    out["summary"] = [f"{out['passed']}/{out['total']} criteria passed"]
    if stream:
        out["_streamed"] = True
    if not ok:
        raise _Failed(out)
    return out


class _Failed(Exception):
    """A completed run whose check failed: the report is still printed, exit status 1."""

    def __init__(self, report: dict):
        super().__init__("check failed")
        self.report = report


# parser ---------------------------------------------------------------------------

def _common(defaults: bool) -> argparse.ArgumentParser:
    """Global flags; accepted before or after the command name."""
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=d(None),
                        help="output format (default: table; csv for char-table)")
    common.add_argument("--threads", type=int, default=d(1), help="worker threads for independent rows")
    common.add_argument("--trunc-override", type=int, default=d(None), metavar="N", help="replace the tower's N")
    common.add_argument("--seed", type=int, default=d(None), help="seed for randomized choices")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common(False)
    ap = argparse.ArgumentParser(prog="tamechar", description=__doc__, parents=[_common(True)])
    ap.add_argument("--version", action="version", version=f"tamechar {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, config=True):
        p = sub.add_parser(name, help=help_, parents=[common])
        if config:
            p.add_argument("config", help="JSON config (a path, or a file name from the shipped corpus)")
        p.set_defaults(func=fn)
        return p

    add("classify", cmd_classify, "tame elliptic regularity of the configured pair")
    add("factorize", cmd_factorize, "Howe factorization with the product check")
    p = add("signs", cmd_signs, "eps_sr, eps_r, e~ and eps_fr with per-orbit breakdown")
    p.add_argument("--gamma", default=None, help="element index or JSON element (default: all config elements)")
    p.add_argument("--depth", default=None, help="depth r (default: the character's depth)")
    p = add("delta2", cmd_delta2, "Delta_II^abs with its orbit factors")
    p.add_argument("--gamma", default=None, help="element index or JSON element (default: all config elements)")
    p.add_argument("--variant", choices=("chi'", "chi"), default="chi'")
    p = add("char-table", cmd_char_table, "character values at shallow elements")
    p.add_argument("--elements", choices=("list", "all-shallow"), default="list")
    p.add_argument("--gamma", default=None, help="restrict the list to one element")
    p.add_argument("--limit", type=int, default=None, help="cap on all-shallow elements")
    add("real-compare", cmd_real_compare, "real comparison against the Harish-Chandra formula")
    add("dze-check", cmd_dze_check, "epsilon product against (-1)^(r_S - r_T)")
    p = add("gln-oracle", cmd_gln_oracle, "GL_n admissibility oracle against the classifier")
    p.add_argument("--exhaustive", action="store_true", help="enumerate every character of the window")
    p = add("verify-all", cmd_verify_all, "run the acceptance suite", config=False)
    p.add_argument("--only", default=None, help="comma-separated criterion numbers")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    fmt = args.format or ("csv" if args.command == "char-table" else "table")
    args.format = fmt
    if args.threads < 1:
        print("tamechar: error: --threads must be positive", file=sys.stderr)
        return 2
    try:
        report = args.func(args)
        status = 0
    except _Failed as ex:
        report, status = ex.report, 1
    except TamecharError as ex:
        print(f"tamechar: {type(ex).__name__}: {ex}", file=sys.stderr)
        return ex.exit_code
    if report.pop("_streamed", False):
        # criterion lines were printed as they finished
        text = "\n".join(report["summary"]) + "\n"
    else:
        text = render(report, fmt)
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
