"""Verification reports and their JSON/CSV serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from . import __version__ as BUILD_ID


@dataclass
class RelationRow:
    relation: str
    tag: str
    residual: float
    tolerance: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        # a zero tolerance demands an exact result
        if self.tolerance == 0:
            return self.residual == 0
        return math.isfinite(self.residual) and self.residual < self.tolerance

    def as_dict(self, seed=None) -> dict:
        d = {
            "relation": self.relation,
            "equation": self.tag,
            "point_seed": seed,
            "residual_max": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        d.update(self.extra)
        return d


@dataclass
class VerificationReport:
    suite: str
    rows: list[RelationRow]
    seed: int | None = None
    wall_time: float | None = None
    notes: dict = field(default_factory=dict)

    @classmethod
    def single(cls, relation, residual, tolerance, seed=None, tag=""):
        return cls(relation, [RelationRow(relation, tag, residual, tolerance)], seed)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def residual_max(self) -> float:
        return max((r.residual for r in self.rows), default=0.0)

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        self.rows.extend(other.rows)
        self.notes.update(other.notes)
        return self

    def to_dict(self, include_time: bool = True) -> dict:
        d = {
            "suite": self.suite,
            "pass": self.passed,
            "seed": self.seed,
            "build_id": BUILD_ID,
            "rows": [r.as_dict(self.seed) for r in self.rows],
        }
        if self.notes:
            d["notes"] = self.notes
        if include_time and self.wall_time is not None:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, include_time: bool = True) -> str:
        return json.dumps(self.to_dict(include_time), indent=2, sort_keys=True, default=_jsonable)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["relation", "equation", "point_seed", "residual_max", "tolerance", "pass"])
        for r in self.rows:
            w.writerow([r.relation, r.tag, self.seed, repr(r.residual), repr(r.tolerance), r.passed])
        return buf.getvalue()


def _jsonable(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o)}")
