"""Check reports: per-identity residual records with pass/fail verdicts."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .gradedpoly import Poly

ENGINE_CONVENTION = "pair-signs {p,x}=-1 {xi_,xi^}=-1 {th_,th^}=+1"


def render_residual(value) -> str | None:
    """Canonical text of a residual; None when it vanishes."""
    if value is None:
        return None
    if isinstance(value, Poly):
        return None if value.is_zero else value.render()
    if isinstance(value, (list, tuple)):
        parts = []
        for i, v in enumerate(value):
            if isinstance(v, Poly):
                if not v.is_zero:
                    parts.append(f"[{i + 1}] {v.render()}")
            elif v:
                parts.append(f"[{i + 1}] {v}")
        return "; ".join(parts) if parts else None
    return None if not value else str(value)


@dataclass
class CheckRecord:
    check_id: str
    law: str
    passed: bool
    residual: str | None = None

    def to_dict(self):
        d = {"id": self.check_id, "law": self.law, "passed": self.passed}
        if self.residual is not None:
            d["residual"] = self.residual
        return d


@dataclass
class CheckReport:
    title: str
    records: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self):
        return [r for r in self.records if not r.passed]

    def add(self, check_id: str, law: str, residual) -> bool:
        text = render_residual(residual)
        ok = text is None
        self.records.append(CheckRecord(check_id, law, ok, text))
        return ok

    def add_flag(self, check_id: str, law: str, ok: bool, detail: str | None = None):
        self.records.append(CheckRecord(check_id, law, ok, None if ok else detail))
        return ok

    def extend(self, other: "CheckReport"):
        self.records.extend(other.records)
        for k, v in other.meta.items():
            self.meta.setdefault(k, v)
        return self

    def summary(self):
        total = len(self.records)
        good = sum(1 for r in self.records if r.passed)
        return {"total": total, "passed": good, "failed": total - good}

    def to_dict(self):
        return {
            "title": self.title,
            "engine": {"bracket_convention": ENGINE_CONVENTION},
            "meta": self.meta,
            "checks": [r.to_dict() for r in self.records],
            "summary": self.summary(),
        }

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False)


def digest(obj) -> str:
    """Stable short digest of any JSON-serializable input description."""
    blob = json.dumps(obj, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
