"""
Edge-chromatic indices restricted to feasible matchings.

Core pieces:
- solve_fractional: the covering LP, whose optimum is the fractional index
- solve_integer: exact set partitioning by depth-first branch and bound
- classify: LP first, ILP only when the LP vertex is not all-unit
- solve_dual_cutgen: the dual LP grown one violated matching at a time
- max_weight_feasible_matching: the separation oracle for that loop
- chromatic_index_k: exhaustive k-fold cover count, used as an oracle
"""

from dataclasses import dataclass, field
from fractions import Fraction
import logging
import math
import time
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .errors import NO_DEADLINE, BudgetExceeded, Deadline, InvalidArgumentError, InvariantViolation
from .exactnum import LPStatus, Relation, Sense, lcm_of_denominators, simplex_solve
from .matchenum import MatchingFamily, _ActiveSet, enumerate_matchings, links_of
from .models import SeparationMode, Verdict
from .netmodel import Network

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
CHROMATIC_K_STATE_BUDGET = 10**7


def _elapsed_ms(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FractionalResult:
    """
    Optimal LP vertex. ``support`` pairs family positions with their
    positive weights, in family order; ``duals`` are the cover-row duals.
    """

    chi_star: Fraction
    support: Tuple[Tuple[int, Fraction], ...]
    all_unit: bool
    family: MatchingFamily = field(repr=False)
    duals: Tuple[Fraction, ...] = field(default=(), repr=False)

    def support_links(self) -> List[Tuple[Tuple[int, ...], Fraction]]:
        return [(self.family.links(pos), x) for pos, x in self.support]

    def capacity(self) -> Fraction:
        return 1 / self.chi_star


@dataclass(frozen=True)
class IntegerResult:
    chi_int: int
    partition: Tuple[int, ...]
    family: MatchingFamily = field(repr=False)

    def partition_links(self) -> List[Tuple[int, ...]]:
        return [self.family.links(pos) for pos in self.partition]


@dataclass(frozen=True)
class Classification:
    chi_star: Fraction
    chi_int: Optional[int]
    verdict: Verdict
    ilp_solved: bool
    fractional: FractionalResult = field(repr=False)
    integer: Optional[IntegerResult] = field(default=None, repr=False)
    timings_ms: Dict[str, float] = field(default_factory=dict, repr=False)

    @property
    def ratio(self) -> Optional[Fraction]:
        """Capacity improvement chi_int / chi_star, when the ILP ran."""
        if self.chi_int is None:
            return None
        return Fraction(self.chi_int) / self.chi_star

    def partition_result(self) -> IntegerResult:
        """The optimal partition; an all-unit LP vertex already is one."""
        if self.integer is not None:
            return self.integer
        return IntegerResult(
            chi_int=int(self.chi_star),
            partition=tuple(pos for pos, _ in self.fractional.support),
            family=self.fractional.family,
        )


@dataclass(frozen=True)
class DualResult:
    z_star: Fraction
    y: Tuple[Fraction, ...]
    cuts_added: int
    cuts: Tuple[int, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class WeightedMatching:
    mask: int
    weight: Fraction

    @property
    def links(self) -> Tuple[int, ...]:
        return links_of(self.mask)


# ---------------------------------------------------------------------------
# LP (covering) and ILP (partitioning)
# ---------------------------------------------------------------------------


def _cover_matrix(family: MatchingFamily) -> List[List[int]]:
    return [[(mask >> e) & 1 for mask in family.masks] for e in range(family.n_links)]


def solve_fractional(family: MatchingFamily, deadline: Deadline = NO_DEADLINE) -> FractionalResult:
    """
    Minimize the sum of x_M subject to every link being covered with total
    weight exactly 1.
    """
    n = len(family)
    solution = simplex_solve(
        _cover_matrix(family),
        [1] * family.n_links,
        [1] * n,
        sense=Sense.MIN,
        row_relations=[Relation.EQ] * family.n_links,
        deadline=deadline,
    )
    if solution.status is not LPStatus.OPTIMAL:
        # singletons make the LP feasible and the objective is bounded by 0
        raise InvariantViolation(f"covering LP reported {solution.status.value}")
    support = tuple((j, x) for j, x in enumerate(solution.primal) if x > 0)
    all_unit = all(x == 1 for _, x in support)
    logger.info(
        "LP optimum %s over %d matchings (%d in support, %d pivots).",
        solution.objective,
        n,
        len(support),
        solution.pivots,
    )
    return FractionalResult(
        chi_star=solution.objective,
        support=support,
        all_unit=all_unit,
        family=family,
        duals=solution.dual,
    )


def solve_integer(
    family: MatchingFamily,
    root_bound: Optional[Fraction] = None,
    deadline: Deadline = NO_DEADLINE,
) -> IntegerResult:
    """
    Minimum number of family matchings partitioning the link set.

    Depth-first exact cover: branch on the lowest uncovered link, trying the
    matchings that contain it in family order, and prune when the count so
    far plus ceil(uncovered / largest matching) exceeds the incumbent. The
    singleton partition is the first incumbent. Among optimal partitions the
    one whose sorted family positions are lexicographically least is kept;
    ceil(root_bound) only skips the search when the singletons reach it.
    """
    n = family.n_links
    full = (1 << n) - 1
    masks = family.masks
    by_link = family.per_link_index
    max_card = max(family.max_cardinality(), 1)

    singletons = []
    for e in range(n):
        pos = family.index_of(1 << e)
        if pos is None:
            raise InvalidArgumentError(f"family lacks the singleton of link {e}")
        singletons.append(pos)
    best: Tuple[int, ...] = tuple(sorted(singletons))

    floor = math.ceil(Fraction(n, max_card))
    if root_bound is not None:
        floor = max(floor, math.ceil(root_bound))

    chosen: List[int] = []
    visited = 0

    def dfs(covered: int) -> None:
        nonlocal best, visited
        if covered == full:
            key = tuple(sorted(chosen))
            if len(key) < len(best) or key < best:
                if len(key) < len(best):
                    logger.debug("ILP incumbent improved to %d.", len(key))
                best = key
            return
        visited += 1
        if visited % 1024 == 0:
            deadline.check()
        remaining = n - covered.bit_count()
        if len(chosen) + -(-remaining // max_card) > len(best):
            return
        free = ~covered & full
        e = (free & -free).bit_length() - 1
        for pos in by_link[e]:
            mask = masks[pos]
            if mask & covered:
                continue
            chosen.append(pos)
            dfs(covered | mask)
            chosen.pop()

    # n disjoint non-empty matchings over n links are the singletons
    if len(best) > floor:
        dfs(0)
    partition = best
    logger.info("ILP optimum %d after %d search nodes.", len(partition), visited)
    return IntegerResult(chi_int=len(partition), partition=partition, family=family)


def classify(
    family: MatchingFamily,
    fractional: Optional[FractionalResult] = None,
    deadline: Deadline = NO_DEADLINE,
) -> Classification:
    """
    Decide whether the fractional index is strictly below the integer one.

    1. solve the LP (or take the supplied vertex);
    2. an all-unit vertex settles equality without the ILP;
    3. otherwise solve the ILP;
    4. compare exactly.
    """
    timings: Dict[str, float] = {}
    if fractional is None:
        start = time.perf_counter()
        fractional = solve_fractional(family, deadline=deadline)
        timings["lp"] = _elapsed_ms(start)

    if fractional.all_unit:
        return Classification(
            chi_star=fractional.chi_star,
            chi_int=None,
            verdict=Verdict.EQUAL,
            ilp_solved=False,
            fractional=fractional,
            timings_ms=timings,
        )

    start = time.perf_counter()
    integer = solve_integer(family, root_bound=fractional.chi_star, deadline=deadline)
    timings["ilp"] = _elapsed_ms(start)

    if fractional.chi_star > integer.chi_int:
        raise InvariantViolation(
            f"fractional index {fractional.chi_star} exceeds integer index {integer.chi_int}"
        )
    verdict = Verdict.STRICT if fractional.chi_star < integer.chi_int else Verdict.EQUAL
    return Classification(
        chi_star=fractional.chi_star,
        chi_int=integer.chi_int,
        verdict=verdict,
        ilp_solved=True,
        fractional=fractional,
        integer=integer,
        timings_ms=timings,
    )


# ---------------------------------------------------------------------------
# Separation oracles
# ---------------------------------------------------------------------------


def _weight_of(mask: int, weights: Sequence[Fraction]) -> Fraction:
    return sum((weights[e] for e in links_of(mask)), ZERO)


def _scan_family(weights: Sequence[Fraction], family: MatchingFamily) -> WeightedMatching:
    best = WeightedMatching(0, ZERO)
    for mask in family.masks:
        w = _weight_of(mask, weights)
        if w > best.weight:
            best = WeightedMatching(mask, w)
    return best


def _branch_and_bound(weights: Sequence[Fraction], net: Network, deadline: Deadline) -> WeightedMatching:
    """
    Exact search over feasible matchings made of positive-weight links.

    Dropping a non-positive link keeps a set feasible and never lowers its
    weight, so only positive links are branched on, heaviest first.
    """
    order = sorted((e for e in range(net.n_links) if weights[e] > 0), key=lambda e: (-weights[e], e))
    suffix = [ZERO] * (len(order) + 1)
    for i in range(len(order) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[order[i]]

    active = _ActiveSet(net)
    best_mask, best_weight = 0, ZERO
    visited = 0

    def dfs(i: int, weight: Fraction) -> None:
        nonlocal best_mask, best_weight, visited
        visited += 1
        if visited % 1024 == 0:
            deadline.check()
        if weight > best_weight:
            best_mask, best_weight = active.mask, weight
        for k in range(i, len(order)):
            if weight + suffix[k] <= best_weight:
                return
            f = order[k]
            if active.can_add(f):
                active.push(f)
                dfs(k + 1, weight + weights[f])
                active.pop()

    dfs(0, ZERO)
    return WeightedMatching(best_mask, best_weight)


def max_weight_matching_unrestricted(weights: Sequence[Fraction], net: Network) -> WeightedMatching:
    """
    Maximum-weight matching of G ignoring SINR (the plain matching polytope).

    Weights are scaled to integers so that networkx stays in integer
    arithmetic and the optimum is exact.
    """
    positive = [(e, w) for e, w in enumerate(weights) if w > 0]
    if not positive:
        return WeightedMatching(0, ZERO)
    scale = lcm_of_denominators([w for _, w in positive])
    graph = nx.Graph()
    for e, w in positive:
        link = net.link(e)
        graph.add_edge(link.sender, link.receiver, weight=int(w * scale), link=e)
    pairs = nx.max_weight_matching(graph, maxcardinality=False, weight="weight")
    mask = 0
    for u, v in pairs:
        mask |= 1 << graph[u][v]["link"]
    return WeightedMatching(mask, _weight_of(mask, weights))


def max_weight_feasible_matching(
    weights: Sequence[Fraction],
    source: Union[Network, MatchingFamily],
    deadline: Deadline = NO_DEADLINE,
) -> WeightedMatching:
    """
    Feasible matching maximizing the sum of its link weights; the empty
    matching (weight 0) competes too. Exponential in the worst case.
    """
    weights = [Fraction(w) for w in weights]
    if len(weights) != source.n_links:
        raise InvalidArgumentError(f"expected {source.n_links} weights, got {len(weights)}")
    if isinstance(source, MatchingFamily):
        return _scan_family(weights, source)
    return _branch_and_bound(weights, source, deadline)


# ---------------------------------------------------------------------------
# Dual cutting planes
# ---------------------------------------------------------------------------


def _separate(
    y: Sequence[Fraction],
    source: Union[Network, MatchingFamily],
    oracle: SeparationMode,
    deadline: Deadline,
) -> WeightedMatching:
    if oracle is SeparationMode.FAMILY:
        if not isinstance(source, MatchingFamily):
            raise InvalidArgumentError("family separation needs a MatchingFamily")
        return _scan_family(y, source)
    if not isinstance(source, Network):
        raise InvalidArgumentError(f"{oracle.value} separation needs a Network")
    if oracle is SeparationMode.BRANCH_AND_BOUND:
        return _branch_and_bound(y, source, deadline)
    return max_weight_matching_unrestricted(y, source)


def solve_dual_cutgen(
    source: Union[Network, MatchingFamily],
    oracle: Optional[Union[SeparationMode, str]] = None,
    deadline: Deadline = NO_DEADLINE,
) -> DualResult:
    """
    Maximize the sum of y_e subject to y(M) <= 1 for every matching M,
    listing only the constraints that were ever violated.

    Starts from the singleton constraints; each round re-solves the
    restricted dual, asks the oracle for a maximum-weight matching, and adds
    its constraint when the weight exceeds 1. Cuts are never dropped.
    """
    if oracle is None:
        oracle = SeparationMode.FAMILY if isinstance(source, MatchingFamily) else SeparationMode.BRANCH_AND_BOUND
    oracle = SeparationMode(oracle)
    n = source.n_links
    if n == 0:
        return DualResult(z_star=ZERO, y=(), cuts_added=0)

    cuts: List[int] = [1 << e for e in range(n)]
    listed = set(cuts)
    while True:
        deadline.check()
        A = [[(cut >> e) & 1 for e in range(n)] for cut in cuts]
        solution = simplex_solve(
            A,
            [1] * len(cuts),
            [1] * n,
            sense=Sense.MAX,
            row_relations=[Relation.LE] * len(cuts),
            free=[True] * n,
            deadline=deadline,
        )
        if solution.status is not LPStatus.OPTIMAL:
            raise InvariantViolation(f"restricted dual reported {solution.status.value}")
        y = solution.primal
        violator = _separate(y, source, oracle, deadline)
        logger.debug(
            "Dual round %d: z = %s, separation weight %s.",
            len(cuts) - n,
            solution.objective,
            violator.weight,
        )
        if violator.weight <= 1:
            logger.info("Dual optimum %s after %d cuts.", solution.objective, len(cuts) - n)
            return DualResult(
                z_star=solution.objective,
                y=tuple(y),
                cuts_added=len(cuts) - n,
                cuts=tuple(cuts),
            )
        if violator.mask in listed:
            raise InvariantViolation(f"oracle returned already-listed matching {violator.links}")
        cuts.append(violator.mask)
        listed.add(violator.mask)


def verify_dual(family: MatchingFamily, y: Sequence[Fraction]) -> bool:
    """y(M) <= 1 for every member of the family."""
    return all(_weight_of(mask, y) <= 1 for mask in family.masks)


# ---------------------------------------------------------------------------
# Exhaustive k-fold covers
# ---------------------------------------------------------------------------


def chromatic_index_k(
    family: MatchingFamily,
    k: int,
    state_budget: int = CHROMATIC_K_STATE_BUDGET,
) -> int:
    """
    Fewest family members (repetition allowed) covering every link exactly
    k times. Memoized over residual demand vectors; meant for |L| <= 8.
    """
    if k < 1:
        raise InvalidArgumentError("k must be a positive integer")
    n = family.n_links
    members = [family.links(pos) for pos in range(len(family))]
    by_link = family.per_link_index
    memo: Dict[Tuple[int, ...], int] = {}

    def best(residual: Tuple[int, ...]) -> int:
        if residual in memo:
            return memo[residual]
        e = next((i for i, r in enumerate(residual) if r > 0), None)
        if e is None:
            return 0
        if len(memo) >= state_budget:
            raise BudgetExceeded(f"{state_budget} residual states")
        out = math.inf
        for pos in by_link[e]:
            links = members[pos]
            if any(residual[f] == 0 for f in links):
                continue
            nxt = list(residual)
            for f in links:
                nxt[f] -= 1
            out = min(out, 1 + best(tuple(nxt)))
        memo[residual] = out
        return out

    value = best(tuple([k] * n))
    if value == math.inf:
        raise InvalidArgumentError("family cannot cover every link")
    return int(value)


def fractional_index_by_covers(family: MatchingFamily, q_max: int) -> Fraction:
    """min over 1 <= k <= q_max of chromatic_index_k / k."""
    return min(Fraction(chromatic_index_k(family, k), k) for k in range(1, q_max + 1))


# ---------------------------------------------------------------------------
# Unrestricted index
# ---------------------------------------------------------------------------


def fractional_edge_chromatic_index(
    net: Network,
    max_matchings: int = 50_000_000,
    deadline: Deadline = NO_DEADLINE,
) -> FractionalResult:
    """Fractional chromatic index over every matching of G, feasible or not."""
    family = enumerate_matchings(net, max_matchings, feasible_only=False, deadline=deadline)
    return solve_fractional(family, deadline=deadline)


def capacity(result: FractionalResult) -> Fraction:
    """Per-link throughput of the optimal schedule: 1 / chi_star."""
    return result.capacity()
