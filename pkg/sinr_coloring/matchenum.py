"""
Enumeration of feasible matchings.

A matching is stored as an int bitmask over link ids (bit e set iff link e
is a member). Families are kept in canonical order: by cardinality, then
lexicographically by the sorted link ids.
"""

from dataclasses import dataclass, field
import itertools
import logging
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import NO_DEADLINE, CapacityError, Deadline, EnumerationOverflow, InvalidArgumentError, PreconditionError
from .models import LINK_CAPACITY, FamilySource
from .netmodel import Network, is_feasible

logger = logging.getLogger(__name__)

MAX_LINKS = LINK_CAPACITY
DEADLINE_CHECK_EVERY = 4096


def mask_of(links: Iterable[int]) -> int:
    mask = 0
    for e in links:
        mask |= 1 << e
    return mask


def links_of(mask: int) -> Tuple[int, ...]:
    out = []
    e = 0
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return tuple(out)


def canonical_key(mask: int) -> Tuple[int, Tuple[int, ...]]:
    return (mask.bit_count(), links_of(mask))


@dataclass(frozen=True)
class Matching:
    mask: int

    @property
    def links(self) -> Tuple[int, ...]:
        return links_of(self.mask)

    @property
    def cardinality(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, e: int) -> bool:
        return bool(self.mask >> e & 1)


@dataclass(frozen=True)
class MatchingFamily:
    """
    Ordered, duplicate-free family of matchings over links 0..n_links-1.

    ``per_link_index[e]`` lists the family positions whose matching contains
    e, in increasing order.
    """

    n_links: int
    masks: Tuple[int, ...]
    source: FamilySource
    per_link_index: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False)
    _position: Dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index: List[List[int]] = [[] for _ in range(self.n_links)]
        position: Dict[int, int] = {}
        for i, mask in enumerate(self.masks):
            position[mask] = i
            for e in links_of(mask):
                index[e].append(i)
        object.__setattr__(self, "per_link_index", tuple(tuple(p) for p in index))
        object.__setattr__(self, "_position", position)

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self) -> Iterator[Matching]:
        return (Matching(m) for m in self.masks)

    def __getitem__(self, i: int) -> Matching:
        return Matching(self.masks[i])

    def matching(self, i: int) -> Matching:
        return Matching(self.masks[i])

    def links(self, i: int) -> Tuple[int, ...]:
        return links_of(self.masks[i])

    def index_of(self, mask: int) -> Optional[int]:
        return self._position.get(mask)

    def max_cardinality(self) -> int:
        return max((m.bit_count() for m in self.masks), default=0)


def _canonical_family(n_links: int, masks: Iterable[int], source: FamilySource) -> MatchingFamily:
    ordered = tuple(sorted(masks, key=canonical_key))
    return MatchingFamily(n_links=n_links, masks=ordered, source=source)


# ---------------------------------------------------------------------------
# Depth-first enumeration
# ---------------------------------------------------------------------------


class _ActiveSet:
    """
    Push/pop stack of links with per-member float interference sums.

    ``totals[k]`` is the float interference at the k-th member's receiver
    from every other member. Each push stores a fresh list, so sums only ever
    grow by addition and pop restores the previous list unchanged.
    """

    def __init__(self, net: Network, check_sinr: bool = True):
        self.model = net.interference
        self.check_sinr = check_sinr
        self.members: List[int] = []
        self.totals: List[float] = []
        self._saved: List[List[float]] = []
        self.nodes = 0
        self.mask = 0

    def can_add(self, f: int) -> bool:
        model = self.model
        if self.nodes & model.node_mask[f]:
            return False
        if not self.check_sinr:
            return True
        members = self.members
        candidate = members + [f]
        cross_f = model.cross_f
        incoming = 0.0
        for g in members:
            incoming += cross_f[g][f]
        if not model.tolerates(f, incoming, candidate):
            return False
        row = cross_f[f]
        for k, e in enumerate(members):
            if not model.tolerates(e, self.totals[k] + row[e], candidate):
                return False
        return True

    def push(self, f: int) -> None:
        model = self.model
        self._saved.append(self.totals)
        if self.check_sinr:
            row = model.cross_f[f]
            incoming = 0.0
            for g in self.members:
                incoming += model.cross_f[g][f]
            self.totals = [t + row[e] for t, e in zip(self.totals, self.members)]
            self.totals.append(incoming)
        else:
            self.totals = self.totals + [0.0]
        self.members.append(f)
        self.nodes |= model.node_mask[f]
        self.mask |= 1 << f

    def pop(self) -> None:
        model = self.model
        f = self.members.pop()
        self.totals = self._saved.pop()
        self.nodes &= ~model.node_mask[f]
        self.mask &= ~(1 << f)


def _dfs_masks(
    net: Network,
    max_matchings: int,
    check_sinr: bool,
    deadline: Deadline,
) -> List[int]:
    if net.n_links < 1:
        raise PreconditionError("enumeration needs at least one link")
    if net.n_links > MAX_LINKS:
        raise CapacityError(f"{net.n_links} links exceed the {MAX_LINKS}-link bitset width")

    n = net.n_links
    found: List[int] = []
    active = _ActiveSet(net, check_sinr=check_sinr)

    # iterative DFS: stack of next candidate link per depth
    stack: List[int] = [0]
    while stack:
        f = stack[-1]
        if f >= n:
            stack.pop()
            if active.members:
                active.pop()
            continue
        stack[-1] = f + 1
        if not active.can_add(f):
            continue
        active.push(f)
        found.append(active.mask)
        if len(found) > max_matchings:
            raise EnumerationOverflow(max_matchings)
        if len(found) % DEADLINE_CHECK_EVERY == 0:
            deadline.check()
        stack.append(f + 1)
    return found


def enumerate_feasible_matchings(
    net: Network,
    max_matchings: int = 50_000_000,
    deadline: Deadline = NO_DEADLINE,
) -> MatchingFamily:
    """
    Every non-empty feasible matching exactly once, in canonical order.

    A set is extended only by links above its largest member, and only while
    it stays feasible; supersets of infeasible sets are infeasible, so the
    pruning never loses a member. Raises EnumerationOverflow as soon as the
    count would exceed ``max_matchings``.
    """
    masks = _dfs_masks(net, max_matchings, check_sinr=True, deadline=deadline)
    family = _canonical_family(net.n_links, masks, FamilySource.ENUMERATED)
    logger.info("Enumerated %d feasible matchings over %d links.", len(family), net.n_links)
    return family


def enumerate_matchings(
    net: Network,
    max_matchings: int = 50_000_000,
    feasible_only: bool = False,
    deadline: Deadline = NO_DEADLINE,
) -> MatchingFamily:
    """All non-empty matchings of G; with ``feasible_only`` the SINR filter applies too."""
    masks = _dfs_masks(net, max_matchings, check_sinr=feasible_only, deadline=deadline)
    return _canonical_family(net.n_links, masks, FamilySource.ENUMERATED)


def brute_force_feasible_masks(net: Network) -> List[int]:
    """All-subsets oracle; only sensible for |L| <= 15."""
    out = []
    for r in range(1, net.n_links + 1):
        for combo in itertools.combinations(range(net.n_links), r):
            if is_feasible(combo, net):
                out.append(mask_of(combo))
    return sorted(out, key=canonical_key)


# ---------------------------------------------------------------------------
# Explicit families
# ---------------------------------------------------------------------------


def family_from_explicit_list(n_links: int, matchings: Sequence[Iterable[int]]) -> MatchingFamily:
    """
    Family from caller-supplied link sets; missing singletons are added.

    Node-disjointness and feasibility are the caller's responsibility.
    """
    if n_links < 0:
        raise InvalidArgumentError("n_links must be non-negative")
    masks = set()
    for raw in matchings:
        links = list(raw)
        if not links:
            raise InvalidArgumentError("explicit family contains an empty set")
        if len(set(links)) != len(links):
            raise InvalidArgumentError(f"set {links} repeats a link")
        for e in links:
            if not isinstance(e, int) or not 0 <= e < n_links:
                raise InvalidArgumentError(f"link id {e!r} outside 0..{n_links - 1}")
        mask = mask_of(links)
        if mask in masks:
            raise InvalidArgumentError(f"set {sorted(links)} listed twice")
        masks.add(mask)
    for e in range(n_links):
        masks.add(1 << e)
    return _canonical_family(n_links, masks, FamilySource.EXPLICIT)
