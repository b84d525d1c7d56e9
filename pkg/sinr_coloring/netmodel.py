"""
Network data model for the physical interference model.

Core pieces:
- Network: nodes, directed links and the pairwise d**alpha table
- InterferenceModel: per-link noise budgets and cross-interference terms
- sinr / is_feasible: the SINR expression and the feasibility predicate
- generate_network: the random geometric instance generator
- classify_instance: the empty / too-many-links / too-many-matchings filter

With an even integer alpha every quantity is a Fraction and feasibility is
decided exactly. Any other alpha falls back to double precision and the
network reports ``exact = False``.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
import logging
import math
from typing import TYPE_CHECKING, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from .errors import NO_DEADLINE, Deadline, EnumerationOverflow, InvalidArgumentError, PreconditionError
from .models import FilterReason, LinkRecord, NetworkDocument, Node, PhysParams, Provenance, SweepLimits

if TYPE_CHECKING:
    from .matchenum import MatchingFamily

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]

# Random streams derived from one master seed. New consumers get new offsets
# so that existing draws never move.
STREAM_PLACEMENT = 0
STREAM_SENDER = 1
STREAM_SWEEP = 2

# Relative margin above which the double-precision pre-check is trusted.
FLOAT_FILTER_RTOL = 1e-9


def random_stream(seed: int, stream: int, *extra: int) -> np.random.Generator:
    """PCG64 generator for ``(seed, stream, *extra)``; seed must be a non-negative int."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(stream, *extra))
    return np.random.Generator(np.random.PCG64(seq))


def connection_radius(params: PhysParams) -> float:
    """Largest link length whose singleton is feasible: (P / beta gamma) ** (1/alpha)."""
    ratio = params.power / (params.threshold * params.noise)
    return float(ratio) ** (1.0 / float(params.alpha))


def _distance_pow_alpha(a: Node, b: Node, params: PhysParams) -> Number:
    dx = a.x - b.x
    dy = a.y - b.y
    squared = dx * dx + dy * dy
    if params.alpha_is_even:
        return squared ** (int(params.alpha) // 2)
    return float(squared) ** (float(params.alpha) / 2.0)


def _singleton_feasible(d_alpha: Number, params: PhysParams) -> bool:
    """P / (gamma d**alpha) >= beta, exactly when d_alpha is a Fraction."""
    if d_alpha == 0:
        return False
    if isinstance(d_alpha, Fraction):
        return params.power >= params.threshold * params.noise * d_alpha
    return float(params.power) / (float(params.noise) * d_alpha) >= float(params.beta)


# ---------------------------------------------------------------------------
# Network
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Link:
    id: int
    sender: int
    receiver: int
    length_pow_alpha: Number

    @property
    def endpoints(self) -> Tuple[int, int]:
        return (self.sender, self.receiver)


class Network:
    """
    Immutable graph G = (N, L) with its physical parameters.

    Raises InvalidArgumentError when nodes leave the deployment square, two
    links join the same node pair, two nodes coincide on a link, or a link is
    infeasible on its own.
    """

    def __init__(
        self,
        params: PhysParams,
        side_m: Union[Fraction, int, str],
        nodes: Sequence[Node],
        links: Iterable[Union[LinkRecord, Tuple[int, int]]],
        seed: Optional[int] = None,
    ):
        self.params = params
        self.side_m = Fraction(side_m)
        self.seed = seed
        self.nodes: Tuple[Node, ...] = tuple(nodes)

        if self.side_m <= 0:
            raise InvalidArgumentError("side_m must be positive")
        for i, node in enumerate(self.nodes):
            if node.id != i:
                raise InvalidArgumentError(f"node ids must be 0..n-1 in order, got {node.id} at {i}")
            if not (0 <= node.x <= self.side_m and 0 <= node.y <= self.side_m):
                raise InvalidArgumentError(f"node {i} lies outside the {self.side_m} m square")

        n = len(self.nodes)
        gain: List[List[Number]] = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(a + 1, n):
                value = _distance_pow_alpha(self.nodes[a], self.nodes[b], params)
                gain[a][b] = value
                gain[b][a] = value
        self.pairwise_gain: Tuple[Tuple[Number, ...], ...] = tuple(tuple(row) for row in gain)

        built: List[Link] = []
        pairs = set()
        for i, raw in enumerate(links):
            if isinstance(raw, LinkRecord):
                if raw.id != i:
                    raise InvalidArgumentError(f"link ids must be 0..|L|-1 in order, got {raw.id} at {i}")
                s, r = raw.sender, raw.receiver
            else:
                s, r = raw
            if not (0 <= s < n and 0 <= r < n) or s == r:
                raise InvalidArgumentError(f"link {i} has invalid endpoints ({s}, {r})")
            pair = frozenset((s, r))
            if pair in pairs:
                raise InvalidArgumentError(f"link {i} duplicates node pair ({s}, {r})")
            pairs.add(pair)
            d_alpha = self.pairwise_gain[s][r]
            if d_alpha == 0:
                raise InvalidArgumentError(f"link {i} joins coincident nodes")
            if not _singleton_feasible(d_alpha, params):
                raise InvalidArgumentError(f"link {i} is infeasible even in isolation")
            built.append(Link(id=i, sender=s, receiver=r, length_pow_alpha=d_alpha))
        self.links: Tuple[Link, ...] = tuple(built)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_links(self) -> int:
        return len(self.links)

    @property
    def exact(self) -> bool:
        return self.params.alpha_is_even

    def link(self, e: int) -> Link:
        if not isinstance(e, int) or not 0 <= e < len(self.links):
            raise InvalidArgumentError(f"unknown link id {e!r}")
        return self.links[e]

    def to_graph(self) -> nx.Graph:
        """Undirected graph G; each edge carries its link id."""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_nodes))
        for link in self.links:
            graph.add_edge(link.sender, link.receiver, link=link.id)
        return graph

    def max_degree(self) -> int:
        """Delta(G): a lower bound on every edge-chromatic index."""
        if not self.links:
            return 0
        return max(d for _, d in self.to_graph().degree())

    def node_density(self) -> float:
        side = float(self.side_m)
        return self.n_nodes / (side * side)

    @cached_property
    def interference(self) -> "InterferenceModel":
        return InterferenceModel(self)

    def __repr__(self) -> str:
        return f"Network(|N|={self.n_nodes}, |L|={self.n_links}, side_m={self.side_m}, seed={self.seed})"


# ---------------------------------------------------------------------------
# Interference tables
# ---------------------------------------------------------------------------


class InterferenceModel:
    """
    Feasibility in budget form.

    Link e tolerates interference I iff I <= P / (beta d_e**alpha) - gamma,
    which is SINR(e, S) >= beta rearranged. ``cross[f][e]`` is the power that
    sender of f delivers at the receiver of e. Exact networks keep Fractions
    and a float mirror; the mirror decides only when its margin is
    unambiguous.
    """

    def __init__(self, net: Network):
        params = net.params
        power = params.power if net.exact else float(params.power)
        self.exact = net.exact
        self.n_links = net.n_links
        self.noise_f = float(params.noise)
        self.beta_f = float(params.beta)

        self.signal: List[Number] = [power / link.length_pow_alpha for link in net.links]
        if self.exact:
            self.budget: List[Number] = [
                s / params.threshold - params.noise for s in self.signal
            ]
        else:
            self.budget = [s / self.beta_f - self.noise_f for s in self.signal]
        self.budget_f = [float(b) for b in self.budget]
        self.signal_f = [float(s) for s in self.signal]

        # cross[f][e] is None when s_f == r_e (never together in a matching)
        self.cross: List[List[Optional[Number]]] = []
        self.cross_f: List[List[float]] = []
        for f in net.links:
            row: List[Optional[Number]] = []
            row_f: List[float] = []
            for e in net.links:
                g = net.pairwise_gain[f.sender][e.receiver]
                if f.id == e.id or g == 0:
                    row.append(None)
                    row_f.append(math.inf)
                else:
                    value = power / g
                    row.append(value)
                    row_f.append(float(value))
            self.cross.append(row)
            self.cross_f.append(row_f)

        self.endpoints = [(link.sender, link.receiver) for link in net.links]
        self.node_mask = [(1 << link.sender) | (1 << link.receiver) for link in net.links]

    def interference_at(self, e: int, members: Iterable[int]) -> Number:
        total: Number = Fraction(0) if self.exact else 0.0
        for f in members:
            if f != e:
                total += self.cross[f][e]
        return total

    def tolerates(self, e: int, total_f: float, members: Iterable[int]) -> bool:
        """
        Whether link e stays above threshold with interferers ``members``.

        ``total_f`` is the float sum of their cross terms at e; ``members``
        is only walked when the float margin is too thin to trust.
        """
        if not self.exact:
            return self.signal_f[e] / (self.noise_f + total_f) >= self.beta_f
        budget = self.budget_f[e]
        margin = budget - total_f
        scale = max(abs(budget), total_f, 1e-300)
        if margin > FLOAT_FILTER_RTOL * scale:
            return True
        if margin < -FLOAT_FILTER_RTOL * scale:
            return False
        return self.interference_at(e, members) <= self.budget[e]

    def node_disjoint(self, links: Iterable[int]) -> bool:
        used = 0
        for e in links:
            if used & self.node_mask[e]:
                return False
            used |= self.node_mask[e]
        return True

    def feasible(self, links: Sequence[int]) -> bool:
        if not links or not self.node_disjoint(links):
            return False
        for e in links:
            total = sum(self.cross_f[f][e] for f in links if f != e)
            if not self.tolerates(e, total, links):
                return False
        return True


# ---------------------------------------------------------------------------
# SINR and feasibility
# ---------------------------------------------------------------------------


def _validated_set(links: Iterable[int], net: Network) -> List[int]:
    members = sorted(set(links))
    for e in members:
        net.link(e)
    return members


def sinr(e: int, links: Iterable[int], net: Network) -> Number:
    """
    SINR of link e while every link in ``links`` transmits.

    Exact Fraction for even integer alpha, float otherwise.
    """
    members = _validated_set(links, net)
    net.link(e)
    if e not in members:
        raise PreconditionError(f"link {e} is not in the active set {members}")
    model = net.interference
    noise = net.params.noise if net.exact else float(net.params.noise)
    interference = Fraction(0) if net.exact else 0.0
    for f in members:
        if f == e:
            continue
        cross = model.cross[f][e]
        if cross is None:
            # sender of f sits on the receiver of e
            return Fraction(0) if net.exact else 0.0
        interference += cross
    return model.signal[e] / (noise + interference)


def is_feasible(links: Iterable[int], net: Network) -> bool:
    """Node-disjoint and SINR(e, S) >= beta for every member, compared exactly."""
    members = _validated_set(links, net)
    if not members:
        raise PreconditionError("feasibility is only defined for non-empty link sets")
    if not net.interference.node_disjoint(members):
        return False
    beta = net.params.threshold if net.exact else float(net.params.beta)
    return all(sinr(e, members, net) >= beta for e in members)


# ---------------------------------------------------------------------------
# Instance generation
# ---------------------------------------------------------------------------


def generate_network(
    n_nodes: int,
    side_m: Union[Fraction, int, str],
    params: PhysParams,
    seed: int,
    coord_digits: int = 6,
) -> Network:
    """
    Random geometric instance.

    Coordinates are uniform multiples of 10**-coord_digits m in [0, side]^2;
    a pair becomes a link iff its singleton is feasible; each link's sender
    is a fair coin between the two endpoints. Deterministic in the arguments.
    """
    if n_nodes < 2:
        raise InvalidArgumentError("n_nodes must be at least 2")
    side = Fraction(side_m)
    if side <= 0:
        raise InvalidArgumentError("side_m must be positive")
    scale = 10**coord_digits
    ticks = side * scale
    if ticks.denominator != 1:
        raise InvalidArgumentError(f"side {side} m is not a multiple of 1e-{coord_digits} m")

    placement = random_stream(seed, STREAM_PLACEMENT)
    coins = random_stream(seed, STREAM_SENDER)

    seen = set()
    nodes: List[Node] = []
    for i in range(n_nodes):
        while True:
            xi, yi = (int(v) for v in placement.integers(0, int(ticks), size=2, endpoint=True))
            if (xi, yi) not in seen:
                break
            logger.debug("Node %d coincides with an earlier node; resampling.", i)
        seen.add((xi, yi))
        nodes.append(Node(id=i, x=Fraction(xi, scale), y=Fraction(yi, scale)))

    links: List[Tuple[int, int]] = []
    for a in range(n_nodes):
        for b in range(a + 1, n_nodes):
            d_alpha = _distance_pow_alpha(nodes[a], nodes[b], params)
            if _singleton_feasible(d_alpha, params):
                if int(coins.integers(0, 2)) == 0:
                    links.append((a, b))
                else:
                    links.append((b, a))

    net = Network(params, side, nodes, links, seed=seed)
    logger.debug("Generated %r", net)
    return net


# ---------------------------------------------------------------------------
# Instance filtering
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InstanceVerdict:
    """Outcome of the instance filter; a passing verdict carries the family."""

    passed: bool
    reason: Optional[FilterReason] = None
    family: Optional["MatchingFamily"] = None


def classify_instance(
    net: Network,
    limits: Optional[SweepLimits] = None,
    deadline: Deadline = NO_DEADLINE,
) -> InstanceVerdict:
    """
    Apply the empty / more-than-max-links / more-than-max-matchings filters.

    Enumeration stops the moment the family would exceed the limit.
    """
    from .matchenum import enumerate_feasible_matchings  # local import to avoid cycles

    limits = limits or SweepLimits()
    if net.n_links == 0:
        return InstanceVerdict(passed=False, reason=FilterReason.EMPTY)
    if net.n_links > limits.max_links:
        return InstanceVerdict(passed=False, reason=FilterReason.TOO_MANY_LINKS)
    try:
        family = enumerate_feasible_matchings(net, limits.max_matchings, deadline=deadline)
    except EnumerationOverflow:
        return InstanceVerdict(passed=False, reason=FilterReason.TOO_MANY_MATCHINGS)
    return InstanceVerdict(passed=True, family=family)


# ---------------------------------------------------------------------------
# File form
# ---------------------------------------------------------------------------


def network_to_document(net: Network, provenance: Optional[Provenance] = None) -> NetworkDocument:
    return NetworkDocument(
        params=net.params,
        side_m=net.side_m,
        seed=net.seed,
        nodes=list(net.nodes),
        links=[LinkRecord(id=l.id, sender=l.sender, receiver=l.receiver) for l in net.links],
        provenance=provenance,
    )


def network_from_document(doc: NetworkDocument) -> Network:
    return Network(doc.params, doc.side_m, doc.nodes, doc.links, seed=doc.seed)
