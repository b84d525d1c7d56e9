"""
Parameter sweeps over (|N|, d) cells.

Each instance of a cell runs the pipeline generate -> instance filter ->
classify under its own wall-clock budget. Instance seeds derive from the
master seed, the cell and the instance index, so results do not depend on
how instances are spread over worker processes.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from functools import partial
import logging
import math
import time
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import spearmanr

from .chromatic import classify
from .errors import BudgetExceeded, Deadline, InvalidArgumentError
from .models import (
    CellStats,
    FilterReason,
    InstanceOutcome,
    InstanceRecord,
    SweepConfig,
    Verdict,
)
from .netmodel import STREAM_SWEEP, classify_instance, generate_network

logger = logging.getLogger(__name__)

FULL_GRID_NODES = list(range(10, 101, 10))
FULL_GRID_SIDES_KM = [Decimal(d) for d in range(1, 11)]
FULL_GRID_INSTANCES = 1000

DESK_NODES = [10, 20]
DESK_SIDES_KM = [Decimal(1), Decimal(2)]

CI_Z = 1.96

_FILTER_OUTCOME = {
    FilterReason.EMPTY: InstanceOutcome.FAIL_EMPTY,
    FilterReason.TOO_MANY_LINKS: InstanceOutcome.FAIL_LINKS,
    FilterReason.TOO_MANY_MATCHINGS: InstanceOutcome.FAIL_MATCHINGS,
}

CellKey = Tuple[int, Decimal]


def side_m_of(side_km: Decimal) -> Fraction:
    return Fraction(side_km) * 1000


def instance_seed(master_seed: int, n_nodes: int, side_km: Decimal, index: int, coord_digits: int = 6) -> int:
    """64-bit generation seed of one instance of one cell."""
    ticks = side_m_of(side_km) * 10**coord_digits
    if ticks.denominator != 1:
        raise InvalidArgumentError(f"side {side_km} km is not a multiple of 1e-{coord_digits} m")
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(STREAM_SWEEP, n_nodes, int(ticks), index))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _ms_since(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


def run_instance(n_nodes: int, side_km: Decimal, index: int, config: SweepConfig) -> InstanceRecord:
    """One pipeline run; budget exhaustion becomes an outcome, not an error."""
    seed = instance_seed(config.master_seed, n_nodes, side_km, index, config.coord_digits)
    deadline = Deadline(config.budget_s)
    timed = config.record_timings
    approx = not config.params.alpha_is_even
    n_links = 0
    try:
        net = generate_network(n_nodes, side_m_of(side_km), config.params, seed, config.coord_digits)
        n_links = net.n_links

        start = time.perf_counter()
        verdict = classify_instance(net, config.limits, deadline=deadline)
        enum_ms = _ms_since(start) if timed else None
        if not verdict.passed:
            return InstanceRecord(
                index=index,
                seed=seed,
                approximate_feasibility=approx,
                outcome=_FILTER_OUTCOME[verdict.reason],
                n_links=n_links,
                enum_ms=enum_ms,
            )

        result = classify(verdict.family, deadline=deadline)
    except BudgetExceeded as e:
        logger.warning("Instance %d of (%d, %s km) aborted: %s", index, n_nodes, side_km, e)
        return InstanceRecord(
            index=index,
            seed=seed,
            approximate_feasibility=approx,
            outcome=InstanceOutcome.BUDGET_EXCEEDED,
            n_links=n_links,
        )

    # an all-unit LP vertex is already an optimal partition
    chi_int = result.chi_int if result.chi_int is not None else int(result.chi_star)
    return InstanceRecord(
        index=index,
        seed=seed,
        approximate_feasibility=approx,
        outcome=InstanceOutcome.PASS,
        n_links=n_links,
        n_matchings=len(verdict.family),
        chi_star=result.chi_star,
        chi_int=chi_int,
        verdict=result.verdict,
        enum_ms=enum_ms,
        lp_ms=result.timings_ms.get("lp") if timed else None,
        ilp_ms=result.timings_ms.get("ilp") if timed else None,
    )


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------


def mean_and_ci(ratios: Sequence[Fraction]) -> Tuple[Optional[float], Optional[float]]:
    """
    Mean and 95% normal-approximation halfwidth 1.96 s / sqrt(n), with s the
    sample standard deviation. One sample gives halfwidth 0; none gives None.
    """
    if not ratios:
        return None, None
    values = np.array([float(r) for r in ratios], dtype=float)
    mean = float(values.mean())
    if len(values) == 1:
        return mean, 0.0
    s = float(values.std(ddof=1))
    return mean, CI_Z * s / math.sqrt(len(values))


def _mean_or_none(values: List[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    if not present:
        return None
    return float(np.mean(present))


def summarize_cell(n_nodes: int, side_km: Decimal, records: Sequence[InstanceRecord]) -> CellStats:
    counts = {outcome: 0 for outcome in InstanceOutcome}
    for rec in records:
        counts[rec.outcome] += 1
    strict = [r for r in records if r.verdict is Verdict.STRICT]
    ratios = [Fraction(r.chi_int) / r.chi_star for r in strict]
    mean, halfwidth = mean_and_ci(ratios)
    passed = [r for r in records if r.outcome is InstanceOutcome.PASS]
    return CellStats(
        n_nodes=n_nodes,
        side_km=side_km,
        n_instances=len(records),
        n_pass=counts[InstanceOutcome.PASS],
        n_fail_empty=counts[InstanceOutcome.FAIL_EMPTY],
        n_fail_links=counts[InstanceOutcome.FAIL_LINKS],
        n_fail_matchings=counts[InstanceOutcome.FAIL_MATCHINGS],
        n_budget_exceeded=counts[InstanceOutcome.BUDGET_EXCEEDED],
        n_strict=len(strict),
        ratios=ratios,
        mean_ratio=mean,
        ci95_halfwidth=halfwidth,
        mean_enum_ms=_mean_or_none([r.enum_ms for r in records]),
        mean_lp_ms=_mean_or_none([r.lp_ms for r in passed]),
        mean_ilp_ms=_mean_or_none([r.ilp_ms for r in passed]),
    )


def run_cell_records(
    n_nodes: int,
    side_km: Decimal,
    config: SweepConfig,
    executor: Optional[ProcessPoolExecutor] = None,
) -> Tuple[CellStats, List[InstanceRecord]]:
    indices = range(config.instances_per_cell)
    job = partial(run_instance, n_nodes, side_km, config=config)
    if executor is None:
        records = [job(i) for i in indices]
    else:
        # map preserves submission order
        records = list(executor.map(job, indices))
    cell = summarize_cell(n_nodes, side_km, records)
    logger.info(
        "Cell (%d, %s km): %d/%d pass, %d strict.",
        n_nodes,
        side_km,
        cell.n_pass,
        cell.n_instances,
        cell.n_strict,
    )
    return cell, records


def run_cell(n_nodes: int, side_km: Decimal, config: SweepConfig) -> CellStats:
    cell, _ = run_cell_records(n_nodes, side_km, config)
    return cell


@dataclass
class SweepResult:
    cells: List[CellStats] = field(default_factory=list)
    records: Dict[CellKey, List[InstanceRecord]] = field(default_factory=dict)

    def instance_rows(self) -> List[Tuple[int, Decimal, InstanceRecord]]:
        return [(n, d, rec) for (n, d), recs in self.records.items() for rec in recs]


def run_sweep(config: SweepConfig) -> SweepResult:
    """Every (|N|, d) cell in row-major order of the config lists."""
    result = SweepResult()
    if not config.params.alpha_is_even:
        logger.warning("alpha = %s is not an even integer; feasibility is approximate.", config.params.alpha)
    executor = ProcessPoolExecutor(max_workers=config.jobs) if config.jobs > 1 else None
    try:
        for n_nodes in config.node_counts:
            for side_km in config.side_lengths_km:
                cell, records = run_cell_records(n_nodes, side_km, config, executor)
                result.cells.append(cell)
                result.records[(n_nodes, side_km)] = records
    finally:
        if executor is not None:
            executor.shutdown()
    return result


@dataclass(frozen=True)
class SweepTables:
    """Strict percentage, mean ratio and relative CI keyed by (|N|, d)."""

    node_counts: Tuple[int, ...]
    sides_km: Tuple[Decimal, ...]
    pct_strict: Dict[CellKey, Optional[float]]
    mean_ratio: Dict[CellKey, Optional[float]]
    ci95_rel: Dict[CellKey, Optional[float]]


def aggregate_stats(cells: Sequence[CellStats]) -> SweepTables:
    pct: Dict[CellKey, Optional[float]] = {}
    mean: Dict[CellKey, Optional[float]] = {}
    rel: Dict[CellKey, Optional[float]] = {}
    nodes: List[int] = []
    sides: List[Decimal] = []
    for cell in cells:
        key = (cell.n_nodes, cell.side_km)
        if cell.n_nodes not in nodes:
            nodes.append(cell.n_nodes)
        if cell.side_km not in sides:
            sides.append(cell.side_km)
        pct[key] = None if cell.n_pass == 0 else 100.0 * cell.n_strict / cell.n_pass
        mean[key] = cell.mean_ratio
        if cell.mean_ratio is None or cell.ci95_halfwidth is None:
            rel[key] = None
        else:
            rel[key] = cell.ci95_halfwidth / cell.mean_ratio
    return SweepTables(tuple(nodes), tuple(sides), pct, mean, rel)


def density_trend(cells: Sequence[CellStats], min_pass: int = 50) -> Optional[float]:
    """
    Spearman correlation between node density and strict percentage over
    cells with at least ``min_pass`` passing instances.
    """
    usable = [c for c in cells if c.n_pass >= min_pass]
    if len(usable) < 2:
        return None
    density = [c.node_density for c in usable]
    pct = [100.0 * c.n_strict / c.n_pass for c in usable]
    rho, _ = spearmanr(density, pct)
    rho = float(rho)
    return None if math.isnan(rho) else rho
