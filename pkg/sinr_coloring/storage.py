"""
Storage helpers for network, family, result, schedule and sweep files.

JSON documents go through the pydantic models; text formats allow ``#``
comment lines on read. Every parse problem surfaces as FileFormatError.
"""

import csv
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from pydantic import ValidationError

from .errors import FileFormatError, InvalidArgumentError
from .matchenum import MatchingFamily, family_from_explicit_list, links_of
from .models import CellStats, InstanceRecord, NetworkDocument, Provenance, ResultDocument, format_rational
from .netmodel import Network, network_from_document, network_to_document
from .scheduler import Schedule, format_schedule, parse_schedule

logger = logging.getLogger(__name__)


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise FileFormatError(f"cannot read {path}: {e}") from e


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _provenance_comments(provenance: Optional[Provenance]) -> List[str]:
    if provenance is None:
        return []
    out = [f"{provenance.tool} {provenance.version}"]
    if provenance.argv:
        out.append("argv: " + " ".join(provenance.argv))
    if provenance.seed is not None:
        out.append(f"seed: {provenance.seed}")
    return out


# ---------------------------------------------------------------------------
# Networks
# ---------------------------------------------------------------------------


def load_network(path: Path) -> Network:
    try:
        doc = NetworkDocument.model_validate_json(_read_text(path))
        return network_from_document(doc)
    except ValidationError as e:
        raise FileFormatError(f"{path}: {e}") from e
    except InvalidArgumentError as e:
        raise FileFormatError(f"{path}: {e}") from e


def save_network(path: Path, net: Network, provenance: Optional[Provenance] = None) -> None:
    doc = network_to_document(net, provenance)
    _write_text(path, doc.model_dump_json(indent=2))


# ---------------------------------------------------------------------------
# Matching families
# ---------------------------------------------------------------------------


def parse_family(text: str) -> MatchingFamily:
    """Header ``n_links <k>``, then one matching per line as link ids."""
    n_links: Optional[int] = None
    sets: List[List[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if n_links is None:
                if len(parts) != 2 or parts[0] != "n_links":
                    raise FileFormatError(f"line {lineno}: expected 'n_links <k>'")
                n_links = int(parts[1])
                continue
            sets.append([int(p) for p in parts])
        except ValueError as e:
            raise FileFormatError(f"line {lineno}: {e}") from e
    if n_links is None:
        raise FileFormatError("family file has no 'n_links <k>' header")
    try:
        return family_from_explicit_list(n_links, sets)
    except InvalidArgumentError as e:
        raise FileFormatError(str(e)) from e


def format_family(family: MatchingFamily, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"n_links {family.n_links}")
    for mask in family.masks:
        lines.append(" ".join(str(e) for e in links_of(mask)))
    return "\n".join(lines) + "\n"


def load_family(path: Path) -> MatchingFamily:
    return parse_family(_read_text(path))


def save_family(path: Path, family: MatchingFamily, provenance: Optional[Provenance] = None) -> None:
    _write_text(path, format_family(family, _provenance_comments(provenance)))


# ---------------------------------------------------------------------------
# Results and schedules
# ---------------------------------------------------------------------------


def save_result(path: Path, doc: ResultDocument) -> None:
    _write_text(path, doc.model_dump_json(indent=2))


def load_result(path: Path) -> ResultDocument:
    try:
        return ResultDocument.model_validate_json(_read_text(path))
    except ValidationError as e:
        raise FileFormatError(f"{path}: {e}") from e


def save_schedule(path: Path, schedule: Schedule, provenance: Optional[Provenance] = None) -> None:
    _write_text(path, format_schedule(schedule, _provenance_comments(provenance)))


def load_schedule(path: Path, n_links: int) -> Schedule:
    return parse_schedule(_read_text(path), n_links)


# ---------------------------------------------------------------------------
# Sweep CSVs
# ---------------------------------------------------------------------------

SWEEP_COLUMNS = [
    "n_nodes",
    "side_km",
    "n_instances",
    "n_pass",
    "n_fail_empty",
    "n_fail_links",
    "n_fail_matchings",
    "n_budget_exceeded",
    "n_strict",
    "pct_strict",
    "mean_ratio",
    "ci95_rel",
    "mean_enum_ms",
    "mean_lp_ms",
    "mean_ilp_ms",
]

INSTANCE_COLUMNS = [
    "n_nodes",
    "side_km",
    "index",
    "seed",
    "outcome",
    "n_links",
    "n_matchings",
    "chi_star",
    "chi_int",
    "verdict",
    "approximate_feasibility",
]


def _fmt(v: Optional[float], digits: int = 6) -> str:
    return "" if v is None else f"{v:.{digits}f}"


def sweep_row(cell: CellStats) -> List[str]:
    pct = None if cell.n_pass == 0 else 100.0 * cell.n_strict / cell.n_pass
    rel = None
    if cell.ci95_halfwidth is not None and cell.mean_ratio:
        rel = cell.ci95_halfwidth / cell.mean_ratio
    return [
        str(cell.n_nodes),
        str(cell.side_km),
        str(cell.n_instances),
        str(cell.n_pass),
        str(cell.n_fail_empty),
        str(cell.n_fail_links),
        str(cell.n_fail_matchings),
        str(cell.n_budget_exceeded),
        str(cell.n_strict),
        _fmt(pct, 2),
        _fmt(cell.mean_ratio),
        _fmt(rel),
        _fmt(cell.mean_enum_ms, 3),
        _fmt(cell.mean_lp_ms, 3),
        _fmt(cell.mean_ilp_ms, 3),
    ]


def write_sweep_csv(path: Path, cells: Iterable[CellStats]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for cell in cells:
            writer.writerow(sweep_row(cell))
    logger.info("Wrote %s", path)


def write_instances_csv(path: Path, rows: Iterable[tuple]) -> None:
    """Rows are ``(n_nodes, side_km, InstanceRecord)`` triples."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(INSTANCE_COLUMNS)
        for n_nodes, side_km, rec in rows:
            rec: InstanceRecord
            writer.writerow(
                [
                    n_nodes,
                    side_km,
                    rec.index,
                    rec.seed,
                    rec.outcome.value,
                    rec.n_links,
                    "" if rec.n_matchings is None else rec.n_matchings,
                    "" if rec.chi_star is None else format_rational(rec.chi_star),
                    "" if rec.chi_int is None else rec.chi_int,
                    "" if rec.verdict is None else rec.verdict.value,
                    "1" if rec.approximate_feasibility else "0",
                ]
            )
    logger.info("Wrote %s", path)


def read_sweep_csv(path: Path) -> List[dict]:
    with path.open("r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
