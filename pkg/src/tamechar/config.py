"""Run configurations: JSON files validated against the shipped schema, then typed."""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from .catalog import gl_induced
from .characters import RealConfig
from .errors import TruncationError, ValidationError
from .local_field import TameTower
from .root_data import GaloisRootDatum, RootDatum, fi_by_unitary_rule
from .tori import TameTorus, TorusCharacter, TorusPoint

SCHEMA_VERSION = 1
EXAMPLES_ENV = "TAMECHAR_EXAMPLES"


@lru_cache(maxsize=1)
def schema() -> dict:
    return json.loads(resources.files("tamechar").joinpath("schema.json").read_text())


def corpus_dir() -> Path:
    """Directory of the shipped example configurations, overridable by TAMECHAR_EXAMPLES."""
    env = os.environ.get(EXAMPLES_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("tamechar").joinpath("corpus")))


def resolve_path(path: str | os.PathLike) -> Path:
    """``path`` itself if it exists, else its basename inside the corpus directory."""
    p = Path(path)
    if p.exists():
        return p
    for base in (corpus_dir(), Path(str(resources.files("tamechar").joinpath("corpus")))):
        cand = base / p.name
        if cand.exists():
            return cand
    raise ValidationError(f"configuration file {str(path)!r} not found (also looked in {corpus_dir()})")


def validate(data) -> None:
    """Schema check; the message names the failing field."""
    errors = list(jsonschema.Draft202012Validator(schema()).iter_errors(data))
    direct = [e for e in errors if e.validator not in ("anyOf", "oneOf")]
    err = jsonschema.exceptions.best_match(direct or errors)
    if err is not None:
        while err.context:
            err = jsonschema.exceptions.best_match(err.context)
        where = "/".join(str(x) for x in err.absolute_path) or "<root>"
        raise ValidationError(f"config field {where}: {err.message}")


@dataclass(frozen=True)
class TowerSpec:
    q: int
    e: int
    f: int
    N: int

    def build(self, trunc_override: int | None = None) -> TameTower:
        return TameTower(self.q, self.e, self.f, trunc_override or self.N)


@dataclass(frozen=True)
class RootDatumSpec:
    type: str | None = None
    cartan: tuple | None = None
    lattice: str = "sc"

    def build(self) -> RootDatum:
        if self.cartan is not None:
            return RootDatum.from_cartan([list(r) for r in self.cartan], self.lattice)
        return RootDatum.of_type(self.type, self.lattice)


@dataclass(frozen=True)
class TorusSpec:
    induced: bool = False
    tau: tuple | None = None
    phi: tuple | None = None
    fi_rule: str = "given"
    fi: tuple = ()  # ((root, value), ...)


@dataclass(frozen=True)
class CharacterSpec:
    tame: tuple | None = None
    wild: tuple = ()  # ((level, values), ...)
    seed: int | None = None
    depth_level: int | None = None

    @property
    def is_random(self) -> bool:
        return self.tame is None


@dataclass(frozen=True)
class ElementSpec:
    tame: tuple
    wild: tuple = ()

    def build(self, S: TameTorus) -> TorusPoint:
        _check_window(S, self.wild, "element")
        if len(self.tame) != len(S.tame.orders):
            raise ValidationError(f"element needs {len(S.tame.orders)} tame coordinates, got {len(self.tame)}")
        wild = {}
        for k, v in self.wild:
            if k not in S.wild:
                if any(v):
                    raise ValidationError(f"no rational points at level {k}")
                continue
            if len(v) != S.wild[k].dim:
                raise ValidationError(f"element level {k} needs {S.wild[k].dim} coordinates")
            wild[k] = list(v)
        return S.point_from_coords(list(self.tame), wild)


@dataclass(frozen=True)
class RunConfig:
    name: str
    tower: TowerSpec | None = None
    root_datum: RootDatumSpec | None = None
    torus: TorusSpec = field(default_factory=TorusSpec)
    character: CharacterSpec | None = None
    elements: tuple = ()
    scale: int = 1
    form_rank: int | None = None
    real: RealConfig | None = None
    samples: int = 100
    description: str = ""

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        validate(data)
        tower = TowerSpec(**data["tower"]) if "tower" in data else None
        rds = None
        if "root_datum" in data:
            r = data["root_datum"]
            cartan = tuple(tuple(row) for row in r["cartan"]) if "cartan" in r else None
            rds = RootDatumSpec(r.get("type"), cartan, r.get("lattice", "sc"))
        t = data.get("torus", {})
        torus = TorusSpec(
            induced=t.get("induced", False),
            tau=_mat(t.get("tau")),
            phi=_mat(t.get("phi")),
            fi_rule=t.get("fi_rule", "given"),
            fi=tuple((tuple(x["root"]), x["value"]) for x in t.get("fi", [])),
        )
        ch = None
        if "character" in data:
            c = data["character"]
            if "random" in c:
                ch = CharacterSpec(seed=c["random"].get("seed", 0), depth_level=c["random"].get("depth_level"))
            else:
                ch = CharacterSpec(tuple(Fraction(x) for x in c["tame"]),
                                   tuple(sorted((int(k), tuple(v)) for k, v in c.get("wild", {}).items())))
        elements = tuple(ElementSpec(tuple(x["tame"]), tuple(sorted((int(k), tuple(v))
                                                                    for k, v in x.get("wild", {}).items())))
                         for x in data.get("elements", []))
        real = None
        samples = 100
        if "real" in data:
            r = data["real"]
            real = RealConfig(data["name"], r["type"], r.get("lattice", "sc"), tuple(r["weight"]),
                              tuple(tuple(x) for x in r.get("noncompact", [])))
            samples = r.get("samples", 100)
        if tower is None and real is None:
            raise ValidationError("config needs a tower or a real section")
        if tower is not None and rds is None and not torus.induced:
            raise ValidationError("config needs a root_datum unless the torus is induced")
        return cls(data["name"], tower, rds, torus, ch, elements, data.get("scale", 1), data.get("form_rank"),
                   real, samples, data.get("description", ""))

    @classmethod
    def load(cls, path) -> "RunConfig":
        p = resolve_path(path)
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as ex:
            raise ValidationError(f"{p.name}: not valid JSON ({ex.msg} at line {ex.lineno})") from None
        return cls.from_json(data)

    # builders ----------------------------------------------------------
    def require_torus(self) -> None:
        if self.tower is None:
            raise ValidationError(f"config {self.name!r} has no p-adic torus")

    def build_grd(self, trunc_override: int | None = None) -> GaloisRootDatum:
        return self.build_torus(trunc_override).grd

    def build_torus(self, trunc_override: int | None = None) -> TameTorus:
        self.require_torus()
        tw = self.tower
        N = trunc_override or tw.N
        if self.torus.induced:
            return gl_induced(tw.q, tw.e, tw.f, N)
        rd = self.root_datum.build()
        grd = GaloisRootDatum(rd, tw.build(trunc_override), _lists(self.torus.tau), _lists(self.torus.phi),
                              {r: v for r, v in self.torus.fi})
        if self.torus.fi_rule == "unitary":
            grd.fi.update(fi_by_unitary_rule(grd))
        return TameTorus.from_root_datum(grd, self.name)

    def build_character(self, S: TameTorus, seed: int | None = None) -> TorusCharacter:
        ch = self.character
        if ch is None:
            raise ValidationError(f"config {self.name!r} has no character")
        if ch.is_random:
            rng = random.Random(ch.seed if seed is None else seed)
            return S.random_character(rng, depth_level=ch.depth_level)
        _check_window(S, ch.wild, "character")
        return S.character(list(ch.tame), {k: list(v) for k, v in ch.wild})

    def build_elements(self, S: TameTorus) -> list:
        return [x.build(S) for x in self.elements]


def _check_window(S: TameTorus, wild, what: str) -> None:
    top = max((k for k, v in wild if any(v)), default=0)
    if top >= S.tower.N:
        raise TruncationError(f"{what} has data at level {top}, outside the window of levels below N = {S.tower.N}",
                              required_n=top + 1)


def _mat(m):
    return None if m is None else tuple(tuple(r) for r in m)


def _lists(m):
    return None if m is None else [list(r) for r in m]


__all__ = [
    "CharacterSpec", "ElementSpec", "RootDatumSpec", "RunConfig", "TorusSpec", "TowerSpec", "corpus_dir",
    "resolve_path", "schema", "validate",
]
