"""Cohomology reports and their table, JSON and CSV renderings."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List

import pandas as pd

OUTPUT_FORMATS = ("table", "json", "csv")
ENTRY_COLUMNS = ["n", "d", "dim_space", "dim_kernel", "dim_ker_delta", "dim_im_delta", "cohomology"]


@dataclass(frozen=True)
class CellRecord:
    n: int
    d: int
    dim_space: int
    dim_kernel: int
    dim_ker_delta: int
    dim_im_delta: int
    cohomology: int

    def as_dict(self) -> Dict[str, int]:
        return asdict(self)


@dataclass
class CohomologyReport:
    """Per-(n,d) cohomology dimensions together with the window they were computed in."""

    family: str
    n_max: int
    deg_max: int
    entries: List[CellRecord] = field(default_factory=list)
    settings: Dict[str, object] = field(default_factory=dict)

    @property
    def totals(self) -> Dict[int, int]:
        totals = {n: 0 for n in range(1, self.n_max + 1)}
        for cell in self.entries:
            totals[cell.n] = totals.get(cell.n, 0) + cell.cohomology
        return totals

    def as_dict(self) -> Dict[str, object]:
        return {
            "family": self.family,
            "caps": {"n_max": self.n_max, "deg_max": self.deg_max},
            "entries": [cell.as_dict() for cell in self.entries],
            "totals": {str(n): total for n, total in self.totals.items()},
        }

    def nonzero_cells(self) -> List[CellRecord]:
        return [cell for cell in self.entries if cell.cohomology]


def report_frame(report: CohomologyReport) -> pd.DataFrame:
    rows = [cell.as_dict() for cell in report.entries]
    return pd.DataFrame(rows, columns=ENTRY_COLUMNS)


def diff_reports(left: CohomologyReport, right: CohomologyReport) -> List[str]:
    """Human-readable differences between two reports over the same window."""
    problems: List[str] = []
    right_cells = {(c.n, c.d): c for c in right.entries}
    for cell in left.entries:
        other = right_cells.pop((cell.n, cell.d), None)
        if other is None:
            problems.append(f"(n={cell.n}, d={cell.d}) missing on the right")
        elif other != cell:
            problems.append(f"(n={cell.n}, d={cell.d}): {cell.as_dict()} != {other.as_dict()}")
    for n, d in sorted(right_cells):
        problems.append(f"(n={n}, d={d}) missing on the left")
    return problems


def render(report: CohomologyReport, fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps(report.as_dict(), indent=2) + "\n"
    if fmt == "csv":
        return report_frame(report).to_csv(index=False)
    if fmt != "table":
        raise ValueError(f"unknown output format {fmt!r}")
    frame = report_frame(report)
    lines = [
        f"{report.family}: cohomology for n <= {report.n_max}, d <= {report.deg_max}",
        frame.to_string(index=False) if not frame.empty else "(no cells)",
        "",
        "totals: " + ", ".join(f"H^{n}={t}" for n, t in report.totals.items()),
    ]
    nonzero = report.nonzero_cells()
    if nonzero:
        lines.append("classes at: " + ", ".join(f"(n={c.n}, d={c.d}) x{c.cohomology}" for c in nonzero))
    lines.append(f"vanishing claims hold for d <= {report.deg_max} only")
    return "\n".join(lines) + "\n"


def write_report(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
