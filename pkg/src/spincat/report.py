"""Outcome records for relation and property suites."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    suite: str
    relation: str
    n: int
    eps: int
    ok: bool
    r: int | None = None
    witness: str | None = None

    def record(self) -> dict:
        out = {"suite": self.suite, "relation": self.relation, "N": self.n,
               "eps": self.eps, "pass": self.ok}
        if self.r is not None:
            out["r"] = self.r
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, check: Check) -> None:
        self.checks.append(check)

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)

    def all_ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def to_json_lines(self) -> str:
        return "\n".join(json.dumps(c.record(), sort_keys=True) for c in self.checks)

    def summary(self) -> str:
        bad = len(self.failures())
        return f"{len(self.checks) - bad}/{len(self.checks)} checks passed"


def mat_witness(name: str, lhs, rhs, row_labels=None, col_labels=None) -> str | None:
    """First differing entry of two matrices, with labels when available."""
    if lhs.rows != rhs.rows or lhs.cols != rhs.cols:
        return f"{name}: shape {lhs.rows}x{lhs.cols} vs {rhs.rows}x{rhs.cols}"
    for i in range(lhs.rows):
        a = lhs.data.get(i, {})
        b = rhs.data.get(i, {})
        for j in sorted(set(a) | set(b)):
            va = a.get(j)
            vb = b.get(j)
            if va != vb:
                rl = row_labels[i] if row_labels else str(i)
                cl = col_labels[j] if col_labels else str(j)
                from . import scalars
                sa = scalars.render_scalar(va) if va is not None else "0"
                sb = scalars.render_scalar(vb) if vb is not None else "0"
                return f"{name}: entry[{rl} ; {cl}] lhs={sa} rhs={sb}"
    return None
