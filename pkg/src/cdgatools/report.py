"""Uniform result reporting for the command line.

A report is a flat record: the command that ran, an overall status, a
list of named findings (each carrying a witness when it failed), and any
number of degree-indexed tables.  Two renderings exist, a pipe-delimited
text form and JSON; both are fully deterministic, so repeated runs on the
same input are byte-identical.  Figures are an optional extra: each table
can be drawn as a bar chart into a directory the caller names.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

OK = "ok"
INVARIANT_FAILURE = "invariant-failure"
INPUT_ERROR = "input-error"

EXIT_CODE = {OK: 0, INVARIANT_FAILURE: 1, INPUT_ERROR: 2}


@dataclass
class Finding:
    """One named check.  Non-gating findings inform but never fail a run."""

    name: str
    ok: bool
    witness: str = ""
    gating: bool = True


@dataclass
class Report:
    command: str
    findings: list[Finding] = field(default_factory=list)
    tables: dict[str, dict[int, int]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    parse_failure: str = ""

    def add(self, name: str, ok: bool, witness: str = "",
            gating: bool = True) -> bool:
        self.findings.append(Finding(name, ok, witness, gating))
        return ok

    def table(self, name: str, dims: dict[int, int]):
        self.tables[name] = dict(sorted(dims.items()))

    @property
    def status(self) -> str:
        if self.parse_failure:
            return INPUT_ERROR
        if any(not f.ok and f.gating for f in self.findings):
            return INVARIANT_FAILURE
        return OK

    @property
    def exit_code(self) -> int:
        return EXIT_CODE[self.status]


def to_text(r: Report) -> str:
    lines = [f"command: {r.command}", f"status: {r.status}"]
    if r.parse_failure:
        lines.append(f"error: {r.parse_failure}")
    if r.findings:
        lines.append("check | result | witness")
        for f in r.findings:
            word = "pass" if f.ok else ("fail" if f.gating else "no")
            lines.append(f"{f.name} | {word} | {f.witness}".rstrip())
    for note in r.notes:
        lines.append(f"note: {note}")
    for name, dims in r.tables.items():
        lines.append(f"table: {name}")
        lines.append("degree | dim")
        for p, d in dims.items():
            lines.append(f"{p} | {d}")
    return "\n".join(lines) + "\n"


def to_json(r: Report) -> str:
    doc = {
        "command": r.command,
        "status": r.status,
        "findings": [
            {"check": f.name, "ok": f.ok, "witness": f.witness,
             "gating": f.gating}
            for f in r.findings
        ],
        "tables": {
            name: {str(p): d for p, d in dims.items()}
            for name, dims in r.tables.items()
        },
        "notes": list(r.notes),
    }
    if r.parse_failure:
        doc["error"] = r.parse_failure
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_figures(r: Report, directory: str) -> list[str]:
    """Draw every table as a bar chart; returns the files written."""
    import os

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(directory, exist_ok=True)
    written = []
    for name, dims in r.tables.items():
        if not dims:
            continue
        degrees = list(dims)
        values = [dims[p] for p in degrees]
        fig, ax = plt.subplots(figsize=(max(3.0, 0.6 * len(degrees) + 1), 2.8))
        ax.bar(degrees, values, color="#4878a8")
        ax.set_xlabel("degree")
        ax.set_ylabel("dim")
        ax.set_title(f"{r.command}: {name}")
        ax.set_xticks(degrees)
        yticks = range(0, max(values) + 1)
        ax.set_yticks(list(yticks))
        fig.tight_layout()
        slug = name.replace(" ", "-").replace("/", "-")
        path = os.path.join(directory, f"{r.command}-{slug}.png")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written
