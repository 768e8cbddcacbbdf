import json

import pytest
from hypothesis import given, settings, strategies as st

from fifam.constructions import bisection_max, hadamard_family
from fifam.core import Family, Theta
from fifam.formats import (
    ParseError,
    dumps_json,
    dumps_text,
    loads,
    loads_json,
    loads_text,
    read_family,
    write_family,
)


def test_text_layout():
    text = dumps_text(bisection_max(4))
    assert text.splitlines() == ["n=4 r=3 theta=1/2", "1 2", "1 3", "1 4", "1 2 3 4"]


def test_comments_and_blank_lines():
    F = loads_text("# header next\n\nn=3 r=3 theta=1/2\n1 2   # star\n\n1 3\n")
    assert F.as_lists() == [[1, 2], [1, 3]]


@pytest.mark.parametrize("F", [bisection_max(7), hadamard_family(4)], ids=["bmax", "hadamard"])
def test_round_trips(F):
    assert loads(dumps_text(F)) == F
    assert loads(dumps_json(F)) == F
    G = loads(dumps_json(F))
    assert (G.n, G.r, G.theta) == (F.n, F.r, F.theta)


@settings(max_examples=80, deadline=None)
@given(n=st.integers(1, 9), data=st.data())
def test_round_trip_property(n, data):
    ss = data.draw(st.lists(st.frozensets(st.integers(1, n), min_size=1), min_size=1, max_size=8, unique=True))
    F = Family.from_lists(n, 3, Theta(2, 5), [sorted(s) for s in ss])
    assert loads_text(dumps_text(F)).sets == F.sets
    assert loads_json(dumps_json(F)).sets == F.sets


@pytest.mark.parametrize("text,line", [
    ("n=4 r=3\n1 2\n", 1),
    ("n=4 r=3 theta=2/4\n1 2\n", 1),
    ("n=4 r=3 theta=3/2\n1 2\n", 1),
    ("n=4 r=3 theta=1/2\n1 2\n1 x\n", 3),
    ("n=4 r=3 theta=1/2\n1 2\n\n1 5\n", 4),
    ("n=4 r=3 theta=1/2\n1 1\n", 2),
    ("n=4 r=3 theta=1/2\n1 2\n2 1\n", 3),
])
def test_text_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        loads_text(text)
    assert exc.value.line == line
    assert str(exc.value).startswith(f"line {line}:")


def test_text_missing_parts():
    with pytest.raises(ParseError):
        loads_text("")
    with pytest.raises(ParseError):
        loads_text("n=4 r=3 theta=1/2\n")


@pytest.mark.parametrize("doc", [
    "[1, 2]",
    '{"n": 4, "r": 3, "sets": [[1]]}',
    '{"n": 4, "r": 3, "theta": {"a": 1, "b": 2}, "sets": []}',
    '{"n": 4, "r": 3, "theta": {"a": 1, "b": 2}, "sets": [[1, 9]]}',
    '{"n": 4, "r": 3, "theta": {"a": 1, "b": 2}, "sets": [[1, 1]]}',
    '{"n": 4, "r": 3, "theta": {"a": 1, "b": 2}, "sets": [["1"]]}',
])
def test_json_errors(doc):
    with pytest.raises(ParseError):
        loads_json(doc)


def test_json_syntax_error_line():
    with pytest.raises(ParseError) as exc:
        loads_json('{"n": 4,\n "r": }')
    assert exc.value.line == 2


def test_files(tmp_path):
    F = bisection_max(5)
    write_family(F, tmp_path / "f.txt")
    write_family(F, tmp_path / "f.json", structured=True)
    assert read_family(tmp_path / "f.txt") == F
    assert read_family(tmp_path / "f.json") == F
    assert json.loads((tmp_path / "f.json").read_text())["theta"] == {"a": 1, "b": 2}
    with pytest.raises(ParseError):
        read_family(tmp_path / "missing.txt")
