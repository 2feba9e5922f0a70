from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Verdict:
    """Outcome of a check.  ``details`` holds JSON-friendly diagnostics."""

    ok: bool
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {"verdict": "pass" if self.ok else "fail", **self.details}
