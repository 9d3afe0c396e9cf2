"""Render cross-region results as Markdown and CSV tables.

Row order is fixed: the two regions first, then "Combined", each against
test regions in first-seen order. Percentages print with 2 decimals.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from roofstock.errors import ValidationError
from roofstock.evaluation.cross_country import CrossCountryCell
from roofstock.evaluation.metrics import MetricBundle

CSV_COLUMNS = ("task", "train_source", "test_source", "f1", "precision", "recall", "accuracy", "missing_classes")


def _ordered(cells: list[CrossCountryCell]) -> list[CrossCountryCell]:
    train_order: list[str] = []
    test_order: list[str] = []
    for cell in cells:
        if cell.train_source not in train_order:
            train_order.append(cell.train_source)
        if cell.test_source not in test_order:
            test_order.append(cell.test_source)
    if "Combined" in train_order:  # Combined renders last regardless of arrival order
        train_order = [t for t in train_order if t != "Combined"] + ["Combined"]
    return sorted(cells, key=lambda c: (train_order.index(c.train_source), test_order.index(c.test_source)))


def render_markdown(cells: list[CrossCountryCell], task: str) -> str:
    rows = _ordered([c for c in cells if c.task == task])
    if not rows:
        return ""
    lines = [
        f"## {task.replace('_', ' ').title()}",
        "",
        "| Training Data | Test Data | F1 score | Precision | Recall | Accuracy |",
        "|---|---|---|---|---|---|",
    ]
    for c in rows:
        m = c.metrics
        note = f" *(missing: {', '.join(c.missing_classes)})*" if c.missing_classes else ""
        lines.append(
            f"| {c.train_source} | {c.test_source}{note} | {m.f1:.2f} | {m.precision:.2f} "
            f"| {m.recall:.2f} | {m.accuracy:.2f} |"
        )
    lines.append("")
    return "\n".join(lines)


def render_csv(cells: list[CrossCountryCell], task: str) -> str:
    rows = _ordered([c for c in cells if c.task == task])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for c in rows:
        m = c.metrics
        writer.writerow(
            [c.task, c.train_source, c.test_source, f"{m.f1:.2f}", f"{m.precision:.2f}",
             f"{m.recall:.2f}", f"{m.accuracy:.2f}", ";".join(c.missing_classes)]
        )
    return buf.getvalue()


def emit_report(cells: list[CrossCountryCell], out_dir: str | Path) -> dict[str, list[Path]]:
    """Write `report_<task>.md` and `report_<task>.csv` per task present."""
    if not cells:
        raise ValidationError("no cells to report")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: dict[str, list[Path]] = {}
    for task in dict.fromkeys(c.task for c in cells):  # preserve order, skip empty sections
        md_path = out_dir / f"report_{task}.md"
        csv_path = out_dir / f"report_{task}.csv"
        md_path.write_text(render_markdown(cells, task), encoding="utf-8")
        csv_path.write_text(render_csv(cells, task), encoding="utf-8")
        written[task] = [md_path, csv_path]
    return written


def parse_report_csv(path: str | Path) -> list[CrossCountryCell]:
    """Inverse of render_csv (metrics were rounded to 2 decimals already)."""
    cells = []
    with open(path, encoding="utf-8", newline="") as fh:
        for record in csv.DictReader(fh):
            cells.append(
                CrossCountryCell(
                    train_source=record["train_source"],
                    test_source=record["test_source"],
                    task=record["task"],
                    metrics=MetricBundle(
                        f1=float(record["f1"]),
                        precision=float(record["precision"]),
                        recall=float(record["recall"]),
                        accuracy=float(record["accuracy"]),
                    ),
                    missing_classes=tuple(record["missing_classes"].split(";")) if record["missing_classes"] else (),
                )
            )
    return cells
