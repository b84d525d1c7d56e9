from fractions import Fraction

import pytest

from sinr_coloring.errors import CapacityError, EnumerationOverflow, InvalidArgumentError, PreconditionError
from sinr_coloring.matchenum import (
    MAX_LINKS,
    brute_force_feasible_masks,
    canonical_key,
    enumerate_feasible_matchings,
    enumerate_matchings,
    family_from_explicit_list,
    links_of,
    mask_of,
)
from sinr_coloring.models import FamilySource, Node
from sinr_coloring.netmodel import Network, generate_network

from .conftest import make_network


def test_mask_helpers():
    assert mask_of([0, 3, 5]) == 0b101001
    assert links_of(0b101001) == (0, 3, 5)
    assert canonical_key(0b1000000) < canonical_key(0b11)
    assert canonical_key(0b011) < canonical_key(0b101)


def test_triple_family(triple_net):
    family = enumerate_feasible_matchings(triple_net)
    assert [family.links(i) for i in range(len(family))] == [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]
    assert family.source is FamilySource.ENUMERATED
    assert family.per_link_index[0] == (0, 3, 4)
    assert family.max_cardinality() == 2


def test_single_link(single_link_net):
    family = enumerate_feasible_matchings(single_link_net)
    assert len(family) == 1
    assert family.matching(0).links == (0,)


def test_panel_b_network_family(panel_b_net, panel_b_family):
    family = enumerate_feasible_matchings(panel_b_net)
    assert len(family) == 10
    assert family.masks == panel_b_family.masks


def test_family_contains_every_singleton(params):
    net = generate_network(12, 1000, params, seed=5)
    family = enumerate_feasible_matchings(net)
    for e in range(net.n_links):
        assert family.index_of(1 << e) is not None


def test_matches_brute_force(params):
    compared = 0
    for seed in range(40):
        net = generate_network(12, 1500, params, seed=seed)
        if not 1 <= net.n_links <= 15:
            continue
        family = enumerate_feasible_matchings(net)
        assert list(family.masks) == brute_force_feasible_masks(net)
        compared += 1
    assert compared >= 5


def test_overflow(triple_net):
    with pytest.raises(EnumerationOverflow) as info:
        enumerate_feasible_matchings(triple_net, max_matchings=5)
    assert info.value.limit == 5


def test_empty_network_is_a_precondition_error(empty_net):
    with pytest.raises(PreconditionError):
        enumerate_feasible_matchings(empty_net)


def test_too_many_links(params):
    # a row of far-apart unit links, one more than the bitset holds
    links = [((i * 1000, 0), (i * 1000, 10)) for i in range(MAX_LINKS + 1)]
    net = make_network(params, (MAX_LINKS + 1) * 1000, links)
    with pytest.raises(CapacityError):
        enumerate_feasible_matchings(net)


def test_unrestricted_matchings(triple_net, params):
    assert len(enumerate_matchings(triple_net)) == 7
    assert len(enumerate_matchings(triple_net, feasible_only=True)) == 6
    nodes = [Node(id=i, x=Fraction(0), y=Fraction(100 * i)) for i in range(3)]
    path = Network(params, 1000, nodes, [(0, 1), (2, 1)])
    # both links end at node 1
    assert len(enumerate_matchings(path)) == 2


def test_explicit_family_adds_singletons():
    family = family_from_explicit_list(3, [[0, 2]])
    assert [family.links(i) for i in range(len(family))] == [(0,), (1,), (2,), (0, 2)]
    assert family.source is FamilySource.EXPLICIT


@pytest.mark.parametrize(
    "sets",
    [
        [[]],
        [[0, 0]],
        [[0, 5]],
        [[0, 1], [1, 0]],
    ],
)
def test_explicit_family_rejects(sets):
    with pytest.raises(InvalidArgumentError):
        family_from_explicit_list(3, sets)
