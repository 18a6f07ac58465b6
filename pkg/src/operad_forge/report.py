"""Check results and the stable text report format."""
from __future__ import annotations

from dataclasses import dataclass, field

HEADER = "operad-forge report v1"


@dataclass
class CheckReport:
    title: str
    items: list = field(default_factory=list)  # (condition, ok, detail)

    def add(self, condition: str, ok: bool, detail: str = "") -> bool:
        self.items.append((condition, bool(ok), detail))
        return ok

    def extend(self, other: "CheckReport", prefix: str = "") -> None:
        for cond, ok, detail in other.items:
            self.items.append((prefix + cond, ok, detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.items)

    def failures(self) -> list[str]:
        return [cond for cond, ok, _ in self.items if not ok]


@dataclass
class TextReport:
    command: str
    subject: str
    params: list = field(default_factory=list)
    sections: list = field(default_factory=list)  # (title, [lines])
    verdict: str = "pass"

    def section(self, title: str, lines=None) -> list:
        body = list(lines or [])
        self.sections.append((title, body))
        return body

    def add_check(self, report: CheckReport) -> None:
        lines = self.section(report.title)
        for cond, ok, detail in report.items:
            mark = "ok  " if ok else "FAIL"
            lines.append(f"{mark} {cond}" + (f"  [{detail}]" if detail else ""))

    def render(self) -> str:
        out = [HEADER, f"command: {self.command}", f"subject: {self.subject}"]
        for key, value in self.params:
            out.append(f"{key}: {value}")
        for title, lines in self.sections:
            out.append("")
            out.append(f"== {title}")
            out.extend(lines)
        out.append("")
        out.append(f"verdict: {self.verdict}")
        return "\n".join(out) + "\n"
