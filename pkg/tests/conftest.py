from decimal import Decimal
from fractions import Fraction

import pytest

from sinr_coloring.chromatic import FractionalResult
from sinr_coloring.matchenum import MatchingFamily, family_from_explicit_list, mask_of
from sinr_coloring.models import Node, PhysParams
from sinr_coloring.netmodel import Network

# link letters used by the two-panel example families
A, B, C, D, E, F, G, H, I, J = range(10)


@pytest.fixture
def params() -> PhysParams:
    return PhysParams(
        power_mw=Decimal("300"),
        noise_mw=Decimal("8e-11"),
        beta=Decimal("316.23"),
        alpha=Decimal("4"),
    )


def make_network(params, side_m, links_xy, seed=None) -> Network:
    """Network from ((sx, sy), (rx, ry)) pairs; nodes numbered link by link."""
    nodes = []
    links = []
    for (sx, sy), (rx, ry) in links_xy:
        s = len(nodes)
        nodes.append(Node(id=s, x=Fraction(sx), y=Fraction(sy)))
        nodes.append(Node(id=s + 1, x=Fraction(rx), y=Fraction(ry)))
        links.append((s, s + 1))
    return Network(params, side_m, nodes, links, seed=seed)


TRIPLE_LINKS = [
    ((700, 800), (800, 800)),
    ((1300, 800), (1200, 800)),
    ((1000, 1250), (1000, 1150)),
]

# a..g; b, c, e, f are 329 m corner links that tolerate no interferer
PANEL_B_LINKS = [
    ((700, 800), (800, 800)),
    ((100, 100), (429, 100)),
    ((100, 1900), (429, 1900)),
    ((1300, 800), (1200, 800)),
    ((1900, 100), (1571, 100)),
    ((1900, 1900), (1571, 1900)),
    ((1000, 1250), (1000, 1150)),
]


@pytest.fixture
def triple_net(params) -> Network:
    """Three 100 m links: every pair is feasible, the triple is not."""
    return make_network(params, 2000, TRIPLE_LINKS)


@pytest.fixture
def panel_b_net(params) -> Network:
    return make_network(params, 2000, PANEL_B_LINKS)


@pytest.fixture
def single_link_net(params) -> Network:
    return make_network(params, 1000, [((0, 0), (0, 100))])


@pytest.fixture
def empty_net(params) -> Network:
    nodes = [Node(id=0, x=Fraction(0), y=Fraction(0)), Node(id=1, x=Fraction(1000), y=Fraction(1000))]
    return Network(params, 1000, nodes, [])


@pytest.fixture
def panel_b_family() -> MatchingFamily:
    return family_from_explicit_list(7, [[A, D], [A, G], [D, G]])


PANEL_A_MAXIMAL = [
    [C, E, I],
    [F, H, I],
    [B, J],
    [C, H],
    [E, F],
    [A, I, J],
    [D, I],
    [G, I],
    [D, J],
    [G, J],
]


def _downward_closure(sets):
    from itertools import combinations

    out = set()
    for s in sets:
        for r in range(1, len(s) + 1):
            for combo in combinations(sorted(s), r):
                out.add(combo)
    return [list(c) for c in out]


@pytest.fixture
def panel_a_family() -> MatchingFamily:
    return family_from_explicit_list(10, _downward_closure(PANEL_A_MAXIMAL))


@pytest.fixture
def panel_a_half_vertex(panel_a_family) -> FractionalResult:
    """The optimal vertex with four half-weight matchings."""
    weights = {
        (A,): Fraction(1),
        (D,): Fraction(1),
        (G,): Fraction(1),
        (B, J): Fraction(1),
        (E, F): Fraction(1, 2),
        (C, H): Fraction(1, 2),
        (C, E, I): Fraction(1, 2),
        (F, H, I): Fraction(1, 2),
    }
    support = sorted((panel_a_family.index_of(mask_of(links)), x) for links, x in weights.items())
    return FractionalResult(
        chi_star=Fraction(6),
        support=tuple(support),
        all_unit=False,
        family=panel_a_family,
    )
