from fractions import Fraction

import pytest

from sinr_coloring.chromatic import classify
from sinr_coloring.errors import FileFormatError
from sinr_coloring.models import ResultDocument, SupportEntry, Verdict
from sinr_coloring.netmodel import generate_network
from sinr_coloring.storage import (
    format_family,
    load_family,
    load_network,
    load_result,
    parse_family,
    save_family,
    save_network,
    save_result,
)


def test_network_file(tmp_path, params):
    net = generate_network(10, 1000, params, seed=7)
    path = tmp_path / "net.json"
    save_network(path, net)
    again = load_network(path)
    assert again.nodes == net.nodes
    assert [l.endpoints for l in again.links] == [l.endpoints for l in net.links]

    # coordinates are written as exact decimal strings
    text = path.read_text(encoding="utf-8")
    assert '"x": "' in text
    assert '"side_m": "1000"' in text


def test_network_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"params": {}}', encoding="utf-8")
    with pytest.raises(FileFormatError):
        load_network(bad)
    with pytest.raises(FileFormatError):
        load_network(tmp_path / "missing.json")


def test_family_file(tmp_path, panel_b_family):
    path = tmp_path / "panel_b.fam"
    save_family(path, panel_b_family)
    assert path.read_text(encoding="utf-8").splitlines()[0] == "n_links 7"
    assert load_family(path).masks == panel_b_family.masks


def test_family_text_with_comments():
    text = "# panel b\nn_links 3\n0 1  # pair\n\n2\n"
    family = parse_family(text)
    assert [family.links(i) for i in range(len(family))] == [(0,), (1,), (2,), (0, 1)]
    assert format_family(family).startswith("n_links 3\n")


@pytest.mark.parametrize("text", ["", "links 3\n", "n_links 2\n0 5\n", "n_links 2\n0 x\n"])
def test_malformed_family(text):
    with pytest.raises(FileFormatError):
        parse_family(text)


def test_result_document(tmp_path, panel_b_family):
    result = classify(panel_b_family)
    doc = ResultDocument(
        mode="classify",
        n_links=7,
        chi_star=result.chi_star,
        chi_int=result.chi_int,
        verdict=result.verdict,
        ilp_solved=result.ilp_solved,
        support=[SupportEntry(matching=list(m), x=x) for m, x in result.fractional.support_links()],
    )
    path = tmp_path / "result.json"
    save_result(path, doc)
    text = path.read_text(encoding="utf-8")
    assert '"chi_star": "11/2"' in text
    assert '"x": "1/1"' in text

    again = load_result(path)
    assert again.chi_star == Fraction(11, 2)
    assert again.verdict is Verdict.STRICT
    assert again.support[-1].x == Fraction(1, 2)
