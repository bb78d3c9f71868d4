"""Residual tables returned by the verification suites."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ResidualRow:
    identity: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tolerance)

    def as_dict(self) -> dict:
        return {"identity": self.identity, "max_residual": self.residual,
                "tolerance": self.tolerance, "pass": self.passed}


@dataclass
class Report:
    rows: list = field(default_factory=list)

    def add(self, identity: str, residual: float, tolerance: float) -> ResidualRow:
        row = ResidualRow(identity, float(residual), float(tolerance))
        self.rows.append(row)
        return row

    def extend(self, other: "Report", prefix: str = "") -> None:
        for row in other.rows:
            self.rows.append(ResidualRow(prefix + row.identity, row.residual, row.tolerance))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list:
        return [r for r in self.rows if not r.passed]

    def row(self, identity: str) -> ResidualRow:
        for r in self.rows:
            if r.identity == identity:
                return r
        raise KeyError(identity)

    def as_dict(self) -> dict:
        return {"pass": self.passed, "rows": [r.as_dict() for r in self.rows]}
