"""
STDMA schedules built from exact LP solutions.

A schedule is kept in multiplicity form, a list of (matching, T_M) pairs,
and its slot list is only materialized when asked for. Verification
returns a report; a broken schedule is data, not an exception.
"""

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import logging
from typing import Iterable, List, Optional, Sequence, Tuple

from .chromatic import FractionalResult, IntegerResult
from .errors import FileFormatError, InvalidArgumentError
from .exactnum import lcm_of_denominators
from .matchenum import MatchingFamily, links_of, mask_of
from .netmodel import Network, is_feasible

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Schedule:
    n_links: int
    multiplicities: Tuple[Tuple[int, int], ...]
    t_star: int
    q_star: int
    chi_star: Optional[Fraction] = None
    explicit_slots: Optional[Tuple[int, ...]] = field(default=None, repr=False)

    @property
    def slots(self) -> Tuple[int, ...]:
        """Slot masks; each support matching repeated T_M times in a row."""
        if self.explicit_slots is not None:
            return self.explicit_slots
        out: List[int] = []
        for mask, times in self.multiplicities:
            out.extend([mask] * times)
        return tuple(out)

    def slot_links(self) -> List[Tuple[int, ...]]:
        return [links_of(mask) for mask in self.slots]

    @property
    def capacity(self) -> Fraction:
        return Fraction(self.q_star, self.t_star)

    @classmethod
    def from_slots(
        cls,
        n_links: int,
        slots: Sequence[Iterable[int]],
        q_star: int,
        t_star: Optional[int] = None,
        chi_star: Optional[Fraction] = None,
    ) -> "Schedule":
        """Schedule with the given slot order; ``t_star`` defaults to the slot count."""
        masks = tuple(mask_of(s) for s in slots)
        counts = Counter(masks)
        seen = []
        for mask in masks:
            if mask not in seen:
                seen.append(mask)
        return cls(
            n_links=n_links,
            multiplicities=tuple((mask, counts[mask]) for mask in seen),
            t_star=len(masks) if t_star is None else t_star,
            q_star=q_star,
            chi_star=chi_star,
            explicit_slots=masks,
        )


class ViolationKind(str, Enum):
    UNKNOWN_LINK = "unknown_link"
    SLOT_INFEASIBLE = "slot_infeasible"
    LINK_COUNT = "link_count"
    SLOT_COUNT = "slot_count"
    RATIO = "ratio"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str
    slot: Optional[int] = None
    link: Optional[int] = None


@dataclass(frozen=True)
class ScheduleReport:
    violation: Optional[Violation] = None

    @property
    def ok(self) -> bool:
        return self.violation is None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class ScheduleComparison:
    t_star: int
    t1_times_qstar: int
    preferable: bool


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def build_schedule(result: FractionalResult) -> Schedule:
    """
    q* = lcm of the support denominators and T_M = q* x_M, so every
    support matching gets a whole number of slots.
    """
    weights = [x for _, x in result.support]
    q_star = lcm_of_denominators(weights)
    multiplicities = []
    for pos, x in result.support:
        times = x * q_star
        if times.denominator != 1:
            raise InvalidArgumentError(f"{x} * {q_star} is not an integer")
        multiplicities.append((result.family.masks[pos], int(times)))
    t_star = sum(t for _, t in multiplicities)
    logger.info("Schedule: T* = %d slots, every link in q* = %d of them.", t_star, q_star)
    return Schedule(
        n_links=result.family.n_links,
        multiplicities=tuple(multiplicities),
        t_star=t_star,
        q_star=q_star,
        chi_star=result.chi_star,
    )


def integer_schedule(result: IntegerResult) -> Schedule:
    """One colour per link: the chi_int partition, one slot each."""
    return Schedule(
        n_links=result.family.n_links,
        multiplicities=tuple((result.family.masks[pos], 1) for pos in result.partition),
        t_star=result.chi_int,
        q_star=1,
        chi_star=Fraction(result.chi_int),
    )


def repeat(schedule: Schedule, times: int) -> Schedule:
    """The schedule run ``times`` times back to back."""
    if times < 1:
        raise InvalidArgumentError("times must be a positive integer")
    explicit = None if schedule.explicit_slots is None else schedule.explicit_slots * times
    return Schedule(
        n_links=schedule.n_links,
        multiplicities=tuple((mask, t * times) for mask, t in schedule.multiplicities),
        t_star=schedule.t_star * times,
        q_star=schedule.q_star * times,
        chi_star=schedule.chi_star,
        explicit_slots=explicit,
    )


def compare_integer_schedule(frac: Schedule, int_result: IntegerResult) -> ScheduleComparison:
    """Multiple colours per link pay off iff T* < T^1 q*."""
    t1q = int_result.chi_int * frac.q_star
    return ScheduleComparison(t_star=frac.t_star, t1_times_qstar=t1q, preferable=frac.t_star < t1q)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


def _slot_violation(
    i: int,
    mask: int,
    n_links: int,
    net: Optional[Network],
    family: Optional[MatchingFamily],
) -> Optional[Violation]:
    links = links_of(mask)
    if not links:
        return Violation(ViolationKind.SLOT_INFEASIBLE, "empty slot", slot=i)
    for e in links:
        if e >= n_links:
            return Violation(ViolationKind.UNKNOWN_LINK, f"link {e} does not exist", slot=i, link=e)
    if net is not None and not is_feasible(links, net):
        return Violation(
            ViolationKind.SLOT_INFEASIBLE,
            f"links {list(links)} are not a feasible matching",
            slot=i,
            link=links[0],
        )
    if family is not None and family.index_of(mask) is None:
        return Violation(
            ViolationKind.SLOT_INFEASIBLE,
            f"links {list(links)} are not a member of the family",
            slot=i,
            link=links[0],
        )
    return None


def verify_schedule(
    s: Schedule,
    net: Optional[Network] = None,
    family: Optional[MatchingFamily] = None,
) -> ScheduleReport:
    """
    Check slots, then link counts, then T*, then T*/q* against chi_star.
    Reports the first violation found; slot order does not matter.
    """
    if net is None and family is None:
        raise InvalidArgumentError("verify_schedule needs a network or a family")
    n_links = net.n_links if net is not None else family.n_links
    if s.n_links != n_links:
        return ScheduleReport(
            Violation(ViolationKind.UNKNOWN_LINK, f"schedule covers {s.n_links} links, instance has {n_links}")
        )

    slots = s.slots
    checked = {}
    counts = [0] * n_links
    for i, mask in enumerate(slots):
        if mask not in checked:
            checked[mask] = _slot_violation(i, mask, n_links, net, family)
        bad = checked[mask]
        if bad is not None:
            if bad.slot != i:
                bad = Violation(bad.kind, bad.detail, slot=i, link=bad.link)
            return ScheduleReport(bad)
        for e in links_of(mask):
            counts[e] += 1

    for e, c in enumerate(counts):
        if c != s.q_star:
            return ScheduleReport(
                Violation(ViolationKind.LINK_COUNT, f"link {e} is active in {c} slots, expected {s.q_star}", link=e)
            )
    if len(slots) != s.t_star:
        return ScheduleReport(Violation(ViolationKind.SLOT_COUNT, f"{len(slots)} slots, header says {s.t_star}"))
    if s.chi_star is not None and Fraction(s.t_star, s.q_star) != s.chi_star:
        return ScheduleReport(
            Violation(ViolationKind.RATIO, f"T*/q* = {s.t_star}/{s.q_star} differs from chi_star {s.chi_star}")
        )
    return ScheduleReport()


# ---------------------------------------------------------------------------
# Text form
# ---------------------------------------------------------------------------


def format_schedule(s: Schedule, comments: Sequence[str] = ()) -> str:
    """``T <t> q <q>`` then one ``<slot> <links...>`` line per slot."""
    lines = [f"# {c}" for c in comments]
    lines.append(f"T {s.t_star} q {s.q_star}")
    for i, mask in enumerate(s.slots):
        lines.append(" ".join([str(i)] + [str(e) for e in links_of(mask)]))
    return "\n".join(lines) + "\n"


def parse_schedule(text: str, n_links: int) -> Schedule:
    header: Optional[Tuple[int, int]] = None
    slots: List[List[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if header is None:
                if len(parts) != 4 or parts[0] != "T" or parts[2] != "q":
                    raise FileFormatError(f"line {lineno}: expected 'T <t> q <q>'")
                header = (int(parts[1]), int(parts[3]))
                continue
            values = [int(p) for p in parts]
        except ValueError as e:
            raise FileFormatError(f"line {lineno}: {e}") from e
        if values[0] != len(slots):
            raise FileFormatError(f"line {lineno}: slot index {values[0]}, expected {len(slots)}")
        slots.append(values[1:])
    if header is None:
        raise FileFormatError("schedule file has no 'T <t> q <q>' header")
    t_star, q_star = header
    if t_star < 1 or q_star < 1:
        raise FileFormatError("T and q must be positive")
    for i, links in enumerate(slots):
        if any(e < 0 for e in links) or len(set(links)) != len(links):
            raise FileFormatError(f"slot {i} has negative or repeated link ids")
    return Schedule.from_slots(n_links, slots, q_star=q_star, t_star=t_star)
