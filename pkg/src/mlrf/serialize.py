"""JSON verdict documents.  Rationals are written as ``"p/q"`` strings so a
document reads back exactly."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from . import __version__
from .analysis import Analysis
from .engine import MLRF, RecurrentSet
from .polyhedron import AffineFunc, Polyhedron

SCHEMA = "mlrf-verdict/1"
TOOL = "mlrf"


def q(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def unq(s) -> Fraction:
    if not isinstance(s, str):
        raise ValueError(f"expected a rational string, got {s!r}")
    return Fraction(s)


def poly_to_json(P: Polyhedron) -> dict:
    return {
        "dim": P.dim,
        "ineqs": [[q(v) for v in a] + [q(b)] for a, b in P.ineqs],
        "eqs": [[q(v) for v in a] + [q(b)] for a, b in P.eqs],
    }


def poly_from_json(d: dict) -> Polyhedron:
    dim = d["dim"]

    def rows(key):
        out = []
        for r in d[key]:
            if len(r) != dim + 1:
                raise ValueError(f"row of length {len(r)} in a {dim}-dimensional polyhedron")
            vals = [unq(s) for s in r]
            out.append((tuple(vals[:-1]), vals[-1]))
        return out

    return Polyhedron(dim, rows("ineqs"), rows("eqs"))


@dataclass
class VerdictDocument:
    kind: str
    names: list
    mode: str = "rational"
    engine: str = "both"
    depth_bound: Optional[int] = None
    max_iterations: Optional[int] = None
    depth: Optional[int] = None
    reason: Optional[str] = None
    iterations: int = 0
    stable_index: Optional[int] = None
    mlrf: Optional[list] = None  # [{"coeffs": [...], "const": "p/q"}]
    recurrent: Optional[dict] = None  # {"transitions": poly, "states": poly}
    integer_witness: Optional[list] = None
    trace: list = field(default_factory=list)
    depth_profile: Optional[list] = None
    cross_check: Optional[bool] = None
    checks: dict = field(default_factory=dict)
    source: Optional[str] = None
    seed: Optional[int] = None
    schema: str = SCHEMA
    tool: str = TOOL
    version: str = __version__

    @classmethod
    def from_analysis(cls, a: Analysis, source: Optional[str] = None, seed: Optional[int] = None) -> "VerdictDocument":
        v = a.verdict
        doc = cls(
            kind=v.kind,
            names=list(a.loop.names),
            mode=a.mode,
            engine=a.engine,
            depth_bound=a.limits.depth_bound,
            max_iterations=a.limits.max_iterations,
            depth=v.depth,
            reason=v.reason,
            iterations=v.iterations,
            stable_index=v.stable_index,
            trace=[asdict(t) for t in v.trace],
            depth_profile=a.depth_profile,
            cross_check=a.cross_check,
            checks=dict(a.checks),
            source=source,
            seed=seed,
        )
        if v.mlrf is not None:
            doc.mlrf = [{"coeffs": [q(c) for c in f.coeffs], "const": q(f.const)} for f in v.mlrf.components]
        if v.recurrent is not None:
            doc.recurrent = {
                "transitions": poly_to_json(v.recurrent.transitions),
                "states": poly_to_json(v.recurrent.states),
            }
        if v.integer_witness is not None:
            doc.integer_witness = [q(x) for x in v.integer_witness]
        return doc

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "VerdictDocument":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {d.get('schema')!r}")
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown fields: {', '.join(sorted(unknown))}")
        doc = cls(**d)
        # validate the witnesses parse
        doc.mlrf_value()
        doc.recurrent_value()
        return doc

    @classmethod
    def from_json(cls, text: str) -> "VerdictDocument":
        return cls.from_dict(json.loads(text))

    def mlrf_value(self) -> Optional[MLRF]:
        if self.mlrf is None:
            return None
        comps = []
        for c in self.mlrf:
            coeffs = tuple(unq(s) for s in c["coeffs"])
            if len(coeffs) != len(self.names):
                raise ValueError("ranking function component has the wrong dimension")
            comps.append(AffineFunc(coeffs, unq(c["const"])))
        return MLRF(tuple(comps))

    def recurrent_value(self) -> Optional[RecurrentSet]:
        if self.recurrent is None:
            return None
        S = poly_from_json(self.recurrent["transitions"])
        states = poly_from_json(self.recurrent["states"])
        n = len(self.names)
        if S.dim != 2 * n or states.dim != n:
            raise ValueError("recurrent set has the wrong dimension")
        return RecurrentSet(S, states)
