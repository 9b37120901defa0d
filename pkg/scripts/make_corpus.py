"""Regenerate the shipped example configurations in src/tamechar/corpus.

Each entry is a dataclass; the character and the element list are either
given or drawn from a seeded search for a valid pair and shallow elements.
"""

from __future__ import annotations

import argparse
import json
import random
from fractions import Fraction
from dataclasses import dataclass, field
from pathlib import Path

from tamechar.characters import is_shallow, shallow_elements
from tamechar.config import RunConfig
from tamechar.factor_calculus import is_regular
from tamechar.pairs import classify_pair

CORPUS = Path(__file__).resolve().parents[1] / "src" / "tamechar" / "corpus"


@dataclass
class CorpusEntry:
    name: str
    description: str
    tower: dict | None = None
    root_datum: dict | None = None
    torus: dict = field(default_factory=dict)
    depth_level: int | None = None  # search for a valid pair of this depth level
    character: dict | None = None
    n_elements: int = 4
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def base(self) -> dict:
        out = {"version": 1, "name": self.name, "description": self.description}
        if self.tower:
            out["tower"] = self.tower
        if self.root_datum:
            out["root_datum"] = self.root_datum
        if self.torus:
            out["torus"] = self.torus
        out.update(self.extra)
        return out

    def render(self) -> dict:
        data = self.base()
        if self.tower is None:
            return data
        S = RunConfig.from_json(data).build_torus()
        rng = random.Random(self.seed)
        if self.character is not None:
            data["character"] = self.character
        elif self.depth_level is not None:
            for _ in range(500):
                th = S.random_character(rng, depth_level=self.depth_level)
                if th.depth_level == self.depth_level and classify_pair(S, th).verdict != "not-a-valid-pair":
                    data["character"] = th.to_json()
                    break
            else:
                raise SystemExit(f"{self.name}: no valid pair found")
        els = [g for g in shallow_elements(S, lam_range=1) if is_shallow(g)]
        rng.shuffle(els)
        if not els and self.depth_level:
            # no regular tame elements: use regular elements of smaller depth instead
            th = S.character([Fraction(x) for x in data["character"]["tame"]],
                             {int(k): v for k, v in data["character"].get("wild", {}).items()})
            for _ in range(200):
                g = S.random_point(rng, max_level=max(th.depth_level - 1, 0))
                if is_regular(g) and g not in els:
                    els.append(g)
        data["elements"] = [_element_json(S, g) for g in els[: self.n_elements]]
        return data


def _element_json(S, g) -> dict:
    out = {"tame": [int(x) for x in g.tame_coords()]}
    wild = {str(k): [int(x) for x in g.wild_coords(k)] for k, _ in g.wild}
    if wild:
        out["wild"] = wild
    return out


ENTRIES = [
    CorpusEntry("sl2-unram", "SL2, norm-one torus of the unramified quadratic extension, depth-one pair",
                {"q": 3, "e": 1, "f": 2, "N": 3}, {"type": "A1", "lattice": "sc"}, {"phi": [[-1]]}, depth_level=1),
    CorpusEntry("sl2-unram-q5", "SL2 unramified elliptic torus over F_5, depth-zero pair",
                {"q": 5, "e": 1, "f": 2, "N": 3}, {"type": "A1", "lattice": "sc"}, {"phi": [[-1]]}, depth_level=0,
                seed=3),
    CorpusEntry("sl2-ram", "SL2, norm-one torus of a ramified quadratic extension, depth-3/2 pair",
                {"q": 5, "e": 2, "f": 1, "N": 4}, {"type": "A1", "lattice": "sc"}, {"tau": [[-1]]}, depth_level=3),
    CorpusEntry("gl2-depth1", "GL2, unramified quadratic induced torus, depth-one character",
                {"q": 3, "e": 1, "f": 2, "N": 3}, None, {"induced": True}, depth_level=1),
    CorpusEntry("gl2-ram", "GL2, ramified quadratic induced torus",
                {"q": 3, "e": 2, "f": 1, "N": 3}, None, {"induced": True}, depth_level=1),
    CorpusEntry("sp4-toral", "Sp4, Coxeter unramified torus, toral pair of depth one",
                {"q": 5, "e": 1, "f": 4, "N": 3}, {"type": "C2", "lattice": "sc"},
                {"phi": [[-1, -2], [1, 1]]}, depth_level=1, n_elements=6),
    CorpusEntry("sp4-ram", "Sp4, torus on which inertia acts by -1",
                {"q": 5, "e": 2, "f": 1, "N": 4}, {"type": "C2", "lattice": "sc"},
                {"tau": [[-1, 0], [0, -1]]}, depth_level=3),
    CorpusEntry("su3-unram", "SL3, unramified elliptic torus with Frobenius -1, signs from the unitary rule",
                {"q": 3, "e": 1, "f": 2, "N": 2}, {"type": "A2", "lattice": "sc"},
                {"phi": [[-1, 0], [0, -1]], "fi_rule": "unitary"}, depth_level=1),
    CorpusEntry("su2", "compact SU(2), theta of weight 3",
                extra={"real": {"type": "A1", "weight": [3], "samples": 100}}),
    CorpusEntry("sl2r", "SL2(R), discrete series with compact torus, weight 3",
                extra={"real": {"type": "A1", "weight": [3], "noncompact": [[2]], "samples": 100}}),
    CorpusEntry("su21", "SU(2,1), compact torus with one noncompact root pair",
                extra={"real": {"type": "A2", "weight": [2, 1], "noncompact": [[1, 1]], "samples": 100}}),
]


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=CORPUS)
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    for entry in ENTRIES:
        data = entry.render()
        RunConfig.from_json(data)
        (args.out / f"{entry.name}.json").write_text(json.dumps(data, indent=2) + "\n")
        print(entry.name, len(data.get("elements", [])), "elements")


if __name__ == "__main__":
    main()
