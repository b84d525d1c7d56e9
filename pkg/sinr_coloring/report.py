"""
Sweep summary formatting and output helpers.
"""

from decimal import Decimal
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

from .harness import SweepTables


def _table(
    lines: list,
    title: str,
    tables: SweepTables,
    values: Dict[Tuple[int, Decimal], Optional[float]],
    fmt: Callable[[float], str],
) -> None:
    lines.append(f"## {title}")
    lines.append("")
    header = ["|N| \\ d (km)"] + [str(d) for d in tables.sides_km]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for n in tables.node_counts:
        row = [str(n)]
        for d in tables.sides_km:
            v = values.get((n, d))
            row.append("" if v is None else fmt(v))
        lines.append("| " + " | ".join(row) + " |")
    lines.append("")


def render_sweep_markdown(tables: SweepTables, trend: Optional[float] = None) -> str:
    """The three sweep tables as Markdown; undefined cells stay blank."""
    lines: list[str] = ["# Sweep summary", ""]

    _table(lines, "Instances with a strict improvement (%)", tables, tables.pct_strict, lambda v: f"{v:.1f}")
    _table(lines, "Mean capacity ratio (strict instances)", tables, tables.mean_ratio, lambda v: f"{v:.4f}")
    _table(lines, "95% confidence halfwidth / mean", tables, tables.ci95_rel, lambda v: f"{v:.4f}")

    if trend is not None:
        lines.append(f"Spearman correlation of node density and strict percentage: {trend:.3f}")
        lines.append("")

    return "\n".join(lines)


def write_sweep_markdown(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
