"""Deterministic command reports, rendered as text or JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


@dataclass
class Report:
    command: list[str]
    verdict: str
    status: int
    witnesses: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    # deterministic work counters; wall-clock time only when explicitly asked for
    timing: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status == EXIT_FAIL and not self.witnesses:
            raise ValueError(f"failing report for {' '.join(self.command)} has no witness")

    def as_dict(self) -> dict:
        return {
            "command": list(self.command),
            "verdict": self.verdict,
            "status": self.status,
            "witnesses": list(self.witnesses),
            "details": self.details,
            "timing": self.timing,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [f"command: {' '.join(self.command)}", f"verdict: {self.verdict}"]
        for key in sorted(self.details):
            lines.extend(_text_field(key, self.details[key]))
        lines.extend(f"witness: {w}" for w in self.witnesses)
        for key in sorted(self.timing):
            lines.append(f"timing.{key}: {self.timing[key]}")
        lines.append(f"status: {self.status}")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_text()


def _text_field(key: str, value) -> list[str]:
    if isinstance(value, dict):
        return [f"{key}.{k}: {_scalar(value[k])}" for k in sorted(value)]
    if isinstance(value, list) and value and isinstance(value[0], str) and "\n" in "".join(value):
        out = [f"{key}:"]
        for item in value:
            out.extend(f"  {line}" for line in item.splitlines())
        return out
    return [f"{key}: {_scalar(value)}"]


def _scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return " ".join(_scalar(v) for v in value)
    if isinstance(value, dict):
        return " ".join(f"{k}={_scalar(value[k])}" for k in sorted(value))
    return str(value)
