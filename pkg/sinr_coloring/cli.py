import argparse
from decimal import Decimal, InvalidOperation
from enum import IntEnum
import logging
from pathlib import Path
import sys
from typing import List, Optional, Tuple

from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from . import __version__
from .chromatic import (
    Classification,
    FractionalResult,
    classify,
    fractional_edge_chromatic_index,
    solve_dual_cutgen,
    solve_fractional,
    solve_integer,
)
from .config import Config, load_config
from .errors import (
    BudgetExceeded,
    CapacityError,
    Deadline,
    EnumerationOverflow,
    FileFormatError,
    InvalidArgumentError,
    InvariantViolation,
    NO_DEADLINE,
    PreconditionError,
    SinrColoringError,
)
from .harness import FULL_GRID_INSTANCES, FULL_GRID_NODES, FULL_GRID_SIDES_KM, aggregate_stats, density_trend, run_sweep
from .logging_config import setup_logging
from .matchenum import MatchingFamily
from .models import (
    FilterReason,
    PhysParams,
    Provenance,
    ResultDocument,
    SeparationMode,
    SupportEntry,
    SweepConfig,
    SweepLimits,
)
from .netmodel import Network, classify_instance, connection_radius, generate_network
from .report import render_sweep_markdown, write_sweep_markdown
from .scheduler import build_schedule, compare_integer_schedule, verify_schedule
from .storage import (
    load_family,
    load_network,
    load_schedule,
    save_network,
    save_result,
    save_schedule,
    write_instances_csv,
    write_sweep_csv,
)

logger = logging.getLogger(__name__)


class ExitCode(IntEnum):
    OK = 0
    REJECTED = 1
    USAGE = 2
    FILTERED = 3
    BUDGET = 4
    INTERNAL = 5


class UsageError(SinrColoringError):
    pass


class FilteredInstance(SinrColoringError):
    def __init__(self, reason: FilterReason):
        super().__init__(reason.value)
        self.reason = reason


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _int_at_least(minimum: int):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be at least {minimum}, got {value}")
        return value

    return parse


def _positive_decimal(text: str) -> Decimal:
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not value.is_finite() or value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _int_list(text: str) -> List[int]:
    return [_int_at_least(2)(part) for part in text.split(",") if part.strip()]


def _decimal_list(text: str) -> List[Decimal]:
    return [_positive_decimal(part) for part in text.split(",") if part.strip()]


def _phys_params(args: argparse.Namespace, config: Config) -> PhysParams:
    return PhysParams(
        power_mw=args.power_mw if args.power_mw is not None else config.power_mw,
        noise_mw=args.noise_mw if args.noise_mw is not None else config.noise_mw,
        beta=args.beta if args.beta is not None else config.beta,
        alpha=args.alpha if args.alpha is not None else config.alpha,
    )


def _provenance(argv: List[str], seed: Optional[int] = None) -> Provenance:
    return Provenance(version=__version__, argv=argv, seed=seed)


def _deadline(args: argparse.Namespace) -> Deadline:
    return NO_DEADLINE if args.budget_s is None else Deadline(args.budget_s)


def _load_instance(args: argparse.Namespace) -> Tuple[Optional[Network], Optional[MatchingFamily]]:
    if args.network is None and args.family is None:
        raise UsageError("either --network or --family is required")
    net = load_network(args.network) if args.network is not None else None
    family = load_family(args.family) if args.family is not None else None
    if net is not None and family is not None and net.n_links != family.n_links:
        raise UsageError(f"family has {family.n_links} links but the network has {net.n_links}")
    return net, family


def _family_for(net: Optional[Network], family: Optional[MatchingFamily], config: Config, deadline: Deadline) -> MatchingFamily:
    """The explicit family, or the enumerated one after the instance filter."""
    if family is not None:
        return family
    verdict = classify_instance(net, config.limits(), deadline=deadline)
    if not verdict.passed:
        raise FilteredInstance(verdict.reason)
    return verdict.family


def _check_links(net: Network, config: Config) -> None:
    if net.n_links == 0:
        raise FilteredInstance(FilterReason.EMPTY)
    if net.n_links > config.max_links:
        raise FilteredInstance(FilterReason.TOO_MANY_LINKS)


def _support_entries(frac: FractionalResult) -> List[SupportEntry]:
    return [SupportEntry(matching=list(links), x=x) for links, x in frac.support_links()]


def _render_result(doc: ResultDocument) -> None:
    console = Console()
    table = Table(title=f"solve --mode {doc.mode}")
    table.add_column("Quantity", style="bold")
    table.add_column("Value")
    table.add_row("|L|", str(doc.n_links))
    if doc.approximate_feasibility:
        table.add_row("feasibility", "approximate (double precision, non-even alpha)")
    if doc.n_matchings is not None:
        table.add_row("|M|", str(doc.n_matchings))
    if doc.chi_star is not None:
        table.add_row("chi*", str(doc.chi_star))
    if doc.chi_int is not None:
        table.add_row("chi", str(doc.chi_int))
    if doc.verdict is not None:
        table.add_row("verdict", doc.verdict.value)
    if doc.z_star is not None:
        table.add_row("z*", str(doc.z_star))
        table.add_row("cuts added", str(doc.cuts_added))
    for name, ms in doc.timings_ms.items():
        table.add_row(f"{name} (ms)", f"{ms:.1f}")
    console.print(table)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_gen(args: argparse.Namespace, config: Config, argv: List[str]) -> ExitCode:
    params = _phys_params(args, config)
    side_m = args.side_km * 1000
    net = generate_network(args.nodes, side_m, params, args.seed, config.coord_digits)
    if args.out is not None:
        save_network(args.out, net, _provenance(argv, args.seed))
        logger.info("Network written to %s", args.out)
    console = Console()
    console.print(f"|N| = {net.n_nodes}, |L| = {net.n_links}")
    console.print(f"connection radius = {connection_radius(params):.6f} m")
    return ExitCode.OK


def cmd_solve(args: argparse.Namespace, config: Config, argv: List[str]) -> ExitCode:
    net, family = _load_instance(args)
    deadline = _deadline(args)
    mode = args.mode
    seed = net.seed if net is not None else None

    if mode == "unrestricted":
        if net is None:
            raise UsageError("--mode unrestricted needs --network")
        _check_links(net, config)
        frac = fractional_edge_chromatic_index(net, config.max_matchings, deadline=deadline)
        doc = ResultDocument(
            mode=mode,
            n_links=net.n_links,
            n_matchings=len(frac.family),
            chi_star=frac.chi_star,
            support=_support_entries(frac),
        )
    elif mode == "dual":
        if family is not None:
            dual = solve_dual_cutgen(family, SeparationMode.FAMILY, deadline=deadline)
            n_links = family.n_links
        else:
            _check_links(net, config)
            dual = solve_dual_cutgen(net, SeparationMode(args.oracle), deadline=deadline)
            n_links = net.n_links
        doc = ResultDocument(mode=mode, n_links=n_links, z_star=dual.z_star, y=list(dual.y), cuts_added=dual.cuts_added)
    else:
        fam = _family_for(net, family, config, deadline)
        if mode == "frac":
            frac = solve_fractional(fam, deadline=deadline)
            doc = ResultDocument(
                mode=mode,
                n_links=fam.n_links,
                n_matchings=len(fam),
                chi_star=frac.chi_star,
                support=_support_entries(frac),
            )
        elif mode == "int":
            integer = solve_integer(fam, deadline=deadline)
            doc = ResultDocument(
                mode=mode,
                n_links=fam.n_links,
                n_matchings=len(fam),
                chi_int=integer.chi_int,
                partition=[list(p) for p in integer.partition_links()],
            )
        else:
            result: Classification = classify(fam, deadline=deadline)
            doc = ResultDocument(
                mode=mode,
                n_links=fam.n_links,
                n_matchings=len(fam),
                chi_star=result.chi_star,
                chi_int=result.chi_int,
                verdict=result.verdict,
                ilp_solved=result.ilp_solved,
                support=_support_entries(result.fractional),
                partition=None if result.integer is None else [list(p) for p in result.integer.partition_links()],
                timings_ms=result.timings_ms,
            )

    doc.approximate_feasibility = net is not None and not net.exact
    doc.provenance = _provenance(argv, seed)
    if args.out is not None:
        save_result(args.out, doc)
        logger.info("Result written to %s", args.out)
    _render_result(doc)
    return ExitCode.OK


def cmd_schedule(args: argparse.Namespace, config: Config, argv: List[str]) -> ExitCode:
    net, family = _load_instance(args)
    deadline = _deadline(args)
    fam = _family_for(net, family, config, deadline)
    result = classify(fam, deadline=deadline)
    schedule = build_schedule(result.fractional)

    report = verify_schedule(schedule, net=net, family=fam if net is None else None)
    if not report.ok:
        raise InvariantViolation(f"constructed schedule failed verification: {report.violation}")

    comparison = compare_integer_schedule(schedule, result.partition_result())
    if args.out is not None:
        save_schedule(args.out, schedule, _provenance(argv, net.seed if net is not None else None))
        logger.info("Schedule written to %s", args.out)

    console = Console()
    console.print(f"T {schedule.t_star} q {schedule.q_star}")
    console.print(f"T^1 q* = {comparison.t1_times_qstar}")
    console.print("preferable" if comparison.preferable else "not preferable")
    return ExitCode.OK


def cmd_verify(args: argparse.Namespace, config: Config, argv: List[str]) -> ExitCode:
    net, family = _load_instance(args)
    n_links = net.n_links if net is not None else family.n_links
    schedule = load_schedule(args.schedule, n_links)
    report = verify_schedule(schedule, net=net, family=family if net is None else None)
    console = Console()
    if report.ok:
        console.print(f"ok: T {schedule.t_star} q {schedule.q_star}")
        return ExitCode.OK
    v = report.violation
    console.print(f"violation: {v.kind.value} (slot {v.slot}, link {v.link}): {v.detail}")
    return ExitCode.REJECTED


def cmd_sweep(args: argparse.Namespace, config: Config, argv: List[str]) -> ExitCode:
    out_dir: Path = args.out_dir
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise UsageError(f"cannot create {out_dir}: {e}") from e

    if args.full_grid:
        nodes, sides, instances = FULL_GRID_NODES, FULL_GRID_SIDES_KM, FULL_GRID_INSTANCES
    else:
        nodes, sides = args.nodes, args.sides_km
        instances = args.instances if args.instances is not None else config.instances_per_cell

    sweep_config = SweepConfig(
        node_counts=nodes,
        side_lengths_km=sides,
        instances_per_cell=instances,
        master_seed=args.seed,
        limits=SweepLimits(
            max_links=args.max_links if args.max_links is not None else config.max_links,
            max_matchings=args.max_matchings if args.max_matchings is not None else config.max_matchings,
        ),
        params=_phys_params(args, config),
        coord_digits=config.coord_digits,
        budget_s=args.budget_s if args.budget_s is not None else config.budget_s,
        jobs=args.jobs if args.jobs is not None else config.jobs,
        record_timings=args.timings,
    )

    result = run_sweep(sweep_config)
    write_sweep_csv(out_dir / "sweep.csv", result.cells)
    if args.instances_csv:
        write_instances_csv(out_dir / "instances.csv", result.instance_rows())
    tables = aggregate_stats(result.cells)
    trend = density_trend(result.cells)
    write_sweep_markdown(out_dir / "sweep.md", render_sweep_markdown(tables, trend))

    console = Console()
    table = Table(title="Sweep")
    for col in ("|N|", "d (km)", "pass", "empty", ">links", ">matchings", "budget", "strict"):
        table.add_column(col, justify="right")
    for c in result.cells:
        table.add_row(
            str(c.n_nodes),
            str(c.side_km),
            str(c.n_pass),
            str(c.n_fail_empty),
            str(c.n_fail_links),
            str(c.n_fail_matchings),
            str(c.n_budget_exceeded),
            str(c.n_strict),
        )
    console.print(table)
    return ExitCode.OK


# ---------------------------------------------------------------------------
# Main CLI entrypoint
# ---------------------------------------------------------------------------


def _add_physics(p: argparse.ArgumentParser) -> None:
    p.add_argument("--power-mw", type=_positive_decimal, default=None, help="Transmit power P in mW.")
    p.add_argument("--noise-mw", type=_positive_decimal, default=None, help="Noise floor in mW.")
    p.add_argument("--beta", type=_positive_decimal, default=None, help="SINR threshold (linear).")
    p.add_argument("--alpha", type=_positive_decimal, default=None, help="Path-loss exponent.")


def _add_instance(p: argparse.ArgumentParser) -> None:
    p.add_argument("--network", type=Path, default=None, help="Network JSON file.")
    p.add_argument("--family", type=Path, default=None, help="Explicit matching-family file (skips enumeration).")
    p.add_argument("--budget-s", type=float, default=None, help="Wall-clock budget in seconds.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sinr-coloring",
        description="Exact fractional edge colouring of wireless links under the SINR model.",
    )
    parser.add_argument("--log-level", type=str, default=None, help="Logging level (default: SINR_LOG_LEVEL or INFO).")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # gen
    p_gen = subparsers.add_parser("gen", help="Generate a random network.")
    p_gen.add_argument("--nodes", type=_int_at_least(2), required=True, help="Number of nodes (>= 2).")
    p_gen.add_argument("--side-km", type=_positive_decimal, required=True, help="Side of the square in km.")
    p_gen.add_argument("--seed", type=_int_at_least(0), required=True, help="Generation seed.")
    p_gen.add_argument("--out", type=Path, default=None, help="Network JSON output file.")
    _add_physics(p_gen)

    # solve
    p_solve = subparsers.add_parser("solve", help="Solve the LP, the ILP, both, or the dual.")
    _add_instance(p_solve)
    p_solve.add_argument(
        "--mode",
        choices=["frac", "int", "classify", "dual", "unrestricted"],
        default="classify",
        help="What to compute (default: classify).",
    )
    p_solve.add_argument(
        "--oracle",
        choices=[SeparationMode.BRANCH_AND_BOUND.value, SeparationMode.UNRESTRICTED.value],
        default=SeparationMode.BRANCH_AND_BOUND.value,
        help="Separation oracle for --mode dual on a network.",
    )
    p_solve.add_argument("--out", type=Path, default=None, help="Result JSON output file.")

    # schedule
    p_sched = subparsers.add_parser("schedule", help="Build and verify the optimal fractional schedule.")
    _add_instance(p_sched)
    p_sched.add_argument("--out", type=Path, default=None, help="Schedule output file.")

    # verify
    p_verify = subparsers.add_parser("verify", help="Check a schedule file against a network or family.")
    _add_instance(p_verify)
    p_verify.add_argument("--schedule", type=Path, required=True, help="Schedule file to check.")

    # sweep
    p_sweep = subparsers.add_parser("sweep", help="Run a (|N|, d) parameter sweep.")
    p_sweep.add_argument("--nodes", type=_int_list, default=[10, 20], help="Comma-separated node counts.")
    p_sweep.add_argument("--sides-km", type=_decimal_list, default=[Decimal(1), Decimal(2)], help="Comma-separated sides in km.")
    p_sweep.add_argument("--instances", type=_int_at_least(1), default=None, help="Instances per cell.")
    p_sweep.add_argument("--seed", type=_int_at_least(0), default=0, help="Master seed.")
    p_sweep.add_argument("--out-dir", type=Path, required=True, help="Directory for sweep.csv and friends.")
    p_sweep.add_argument("--full-grid", action="store_true", help="10..100 nodes x 1..10 km x 1000 instances.")
    p_sweep.add_argument("--max-links", type=_int_at_least(1), default=None)
    p_sweep.add_argument("--max-matchings", type=_int_at_least(1), default=None)
    p_sweep.add_argument("--budget-s", type=float, default=None, help="Per-instance wall-clock budget.")
    p_sweep.add_argument("--jobs", type=_int_at_least(1), default=None, help="Worker processes.")
    p_sweep.add_argument("--instances-csv", action="store_true", help="Also write instances.csv.")
    p_sweep.add_argument("--timings", action="store_true", help="Fill the timing columns (output no longer byte-stable).")
    _add_physics(p_sweep)

    return parser


COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "schedule": cmd_schedule,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = load_config()
    except ValidationError as e:
        Console(stderr=True).print(f"error: invalid configuration: {e}")
        return int(ExitCode.USAGE)
    setup_logging(args.log_level or config.log_level, config.log_file)
    err = Console(stderr=True)

    try:
        return int(COMMANDS[args.command](args, config, argv))
    except FilteredInstance as e:
        err.print(f"instance filtered: {e.reason.value}")
        return int(ExitCode.FILTERED)
    except EnumerationOverflow as e:
        err.print(f"instance filtered: {FilterReason.TOO_MANY_MATCHINGS.value} ({e})")
        return int(ExitCode.FILTERED)
    except BudgetExceeded as e:
        err.print(str(e))
        return int(ExitCode.BUDGET)
    except InvariantViolation as e:
        logger.exception("Internal invariant violated")
        err.print(f"internal error: {e}")
        return int(ExitCode.INTERNAL)
    except (UsageError, FileFormatError, InvalidArgumentError, PreconditionError, CapacityError, ValidationError) as e:
        err.print(f"error: {e}")
        return int(ExitCode.USAGE)
