from dataclasses import replace
from fractions import Fraction

import pytest

from sinr_coloring.chromatic import classify, solve_fractional
from sinr_coloring.errors import FileFormatError
from sinr_coloring.matchenum import enumerate_feasible_matchings
from sinr_coloring.models import Node
from sinr_coloring.netmodel import Network
from sinr_coloring.scheduler import (
    Schedule,
    ViolationKind,
    build_schedule,
    compare_integer_schedule,
    format_schedule,
    integer_schedule,
    parse_schedule,
    repeat,
    verify_schedule,
)

from .conftest import A, B, C, D, E, F, G

PANEL_B_SLOTS = [(B,), (B,), (C,), (C,), (E,), (E,), (F,), (F,), (A, D), (A, G), (D, G)]


def test_panel_b_schedule(panel_b_family):
    result = classify(panel_b_family)
    schedule = build_schedule(result.fractional)
    assert schedule.t_star == 11
    assert schedule.q_star == 2
    assert [t for _, t in schedule.multiplicities] == [2, 2, 2, 2, 1, 1, 1]
    assert schedule.slot_links() == PANEL_B_SLOTS
    assert schedule.capacity == Fraction(2, 11)
    assert verify_schedule(schedule, family=panel_b_family).ok

    cmp = compare_integer_schedule(schedule, result.integer)
    assert cmp.t1_times_qstar == 12
    assert cmp.preferable


def test_panel_b_schedule_on_network(panel_b_net):
    family = enumerate_feasible_matchings(panel_b_net)
    schedule = build_schedule(solve_fractional(family))
    assert verify_schedule(schedule, net=panel_b_net).ok


def test_panel_a_half_vertex_schedule(panel_a_family, panel_a_half_vertex):
    result = classify(panel_a_family, fractional=panel_a_half_vertex)
    schedule = build_schedule(panel_a_half_vertex)
    assert (schedule.t_star, schedule.q_star) == (12, 2)
    assert verify_schedule(schedule, family=panel_a_family).ok
    cmp = compare_integer_schedule(schedule, result.integer)
    assert cmp.t1_times_qstar == 12
    assert not cmp.preferable


def test_triple_schedule(triple_net):
    family = enumerate_feasible_matchings(triple_net)
    schedule = build_schedule(solve_fractional(family))
    assert (schedule.t_star, schedule.q_star) == (3, 2)
    assert verify_schedule(schedule, net=triple_net).ok


def test_single_link_schedule(single_link_net):
    family = enumerate_feasible_matchings(single_link_net)
    schedule = build_schedule(solve_fractional(family))
    assert (schedule.t_star, schedule.q_star) == (1, 1)
    assert format_schedule(schedule) == "T 1 q 1\n0 0\n"


def test_integer_schedule_is_not_preferable(panel_b_family):
    result = classify(panel_b_family)
    single = integer_schedule(result.integer)
    assert (single.t_star, single.q_star) == (6, 1)
    assert verify_schedule(single, family=panel_b_family).ok
    assert not compare_integer_schedule(single, result.integer).preferable


def test_repeat(panel_b_family):
    schedule = build_schedule(solve_fractional(panel_b_family))
    twice = repeat(schedule, 2)
    assert (twice.t_star, twice.q_star) == (22, 4)
    assert verify_schedule(twice, family=panel_b_family).ok


# ---------------------------------------------------------------------------
# Mutations
# ---------------------------------------------------------------------------


def _explicit(slots, q_star, chi_star=Fraction(11, 2)):
    return Schedule.from_slots(7, slots, q_star=q_star, chi_star=chi_star)


def test_deleted_slot(panel_b_family):
    report = verify_schedule(_explicit(PANEL_B_SLOTS[1:], 2), family=panel_b_family)
    assert report.violation.kind is ViolationKind.LINK_COUNT
    assert report.violation.link == B


def test_infeasible_triple_slot(panel_b_net):
    slots = list(PANEL_B_SLOTS)
    slots[8] = (A, D, G)
    report = verify_schedule(_explicit(slots, 2), net=panel_b_net)
    assert report.violation.kind is ViolationKind.SLOT_INFEASIBLE
    assert report.violation.slot == 8


def test_node_sharing_slot(params):
    nodes = [Node(id=i, x=Fraction(0), y=Fraction(100 * i)) for i in range(3)]
    net = Network(params, 1000, nodes, [(0, 1), (2, 1)])
    schedule = Schedule.from_slots(2, [(0,), (1,), (0, 1)], q_star=1)
    report = verify_schedule(schedule, net=net)
    assert report.violation.kind is ViolationKind.SLOT_INFEASIBLE
    assert report.violation.slot == 2


def test_wrong_q_star(panel_b_family):
    report = verify_schedule(_explicit(PANEL_B_SLOTS, 3), family=panel_b_family)
    assert report.violation.kind is ViolationKind.LINK_COUNT


def test_wrong_slot_count(panel_b_family):
    schedule = replace(_explicit(PANEL_B_SLOTS, 2), t_star=12)
    report = verify_schedule(schedule, family=panel_b_family)
    assert report.violation.kind is ViolationKind.SLOT_COUNT


def test_wrong_chi_star(panel_b_family):
    report = verify_schedule(_explicit(PANEL_B_SLOTS, 2, chi_star=Fraction(6)), family=panel_b_family)
    assert report.violation.kind is ViolationKind.RATIO


def test_slot_order_does_not_matter(panel_b_family):
    assert verify_schedule(_explicit(list(reversed(PANEL_B_SLOTS)), 2), family=panel_b_family).ok


def test_unknown_link(panel_b_family):
    slots = list(PANEL_B_SLOTS)
    slots[0] = (9,)
    report = verify_schedule(_explicit(slots, 2), family=panel_b_family)
    assert report.violation.kind is ViolationKind.UNKNOWN_LINK


# ---------------------------------------------------------------------------
# Text form
# ---------------------------------------------------------------------------


def test_text_form(panel_b_family):
    schedule = build_schedule(solve_fractional(panel_b_family))
    text = format_schedule(schedule, comments=["sinr-coloring 0.1.0"])
    lines = text.splitlines()
    assert lines[0] == "# sinr-coloring 0.1.0"
    assert lines[1] == "T 11 q 2"
    assert lines[2] == f"0 {B}"
    assert lines[-1] == f"10 {D} {G}"

    parsed = parse_schedule(text, 7)
    assert parsed.slots == schedule.slots
    assert (parsed.t_star, parsed.q_star) == (11, 2)
    assert verify_schedule(parsed, family=panel_b_family).ok


@pytest.mark.parametrize(
    "text",
    [
        "",
        "0 1\n",
        "T x q 2\n",
        "T 2 q 1\n1 0\n",
        "T 1 q 1\n0 0 0\n",
    ],
)
def test_malformed_text(text):
    with pytest.raises(FileFormatError):
        parse_schedule(text, 3)
