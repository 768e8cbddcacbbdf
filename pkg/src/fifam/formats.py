"""Text and JSON encodings of a Family.

Text::

    n=6 r=3 theta=1/2
    1 2
    1 3   # comments run to end of line

JSON: ``{"n": 6, "r": 3, "theta": {"a": 1, "b": 2}, "sets": [[1, 2], [1, 3]]}``
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .core import Family, FamilyError, Theta, elements, make_fraction


class ParseError(FamilyError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


_HEADER = re.compile(r"^n=(\d+)\s+r=(\d+)\s+theta=(\d+)/(\d+)$")


def dumps_text(F: Family) -> str:
    lines = [f"n={F.n} r={F.r} theta={F.theta}"]
    lines += [" ".join(map(str, elements(s))) for s in F.sets]
    return "\n".join(lines) + "\n"


def loads_text(text: str) -> Family:
    header = None
    sets: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            m = _HEADER.match(line)
            if not m:
                raise ParseError(f"expected 'n=<int> r=<int> theta=<a>/<b>', got {line!r}", lineno)
            n, r, a, b = map(int, m.groups())
            try:
                theta = make_fraction(a, b)
            except FamilyError as exc:
                raise ParseError(str(exc), lineno) from None
            if (theta.a, theta.b) != (a, b):
                raise ParseError(f"theta {a}/{b} is not in lowest terms", lineno)
            header = (n, r, theta)
            continue
        try:
            members = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"set entries must be integers: {line!r}", lineno) from None
        n = header[0]
        for e in members:
            if not 1 <= e <= n:
                raise ParseError(f"element {e} outside [1, {n}]", lineno)
        if len(set(members)) != len(members):
            raise ParseError("repeated element within a set", lineno)
        if sorted(members) in sets:
            raise ParseError(f"duplicate set {sorted(members)}", lineno)
        sets.append(sorted(members))
    if header is None:
        raise ParseError("missing header line", None)
    n, r, theta = header
    if not sets:
        raise ParseError("family has no sets", None)
    try:
        return Family.from_lists(n, r, theta, sets)
    except FamilyError as exc:
        raise ParseError(str(exc)) from None


def to_json_obj(F: Family) -> dict:
    return {"n": F.n, "r": F.r, "theta": {"a": F.theta.a, "b": F.theta.b}, "sets": F.as_lists()}


def from_json_obj(obj: dict) -> Family:
    try:
        theta = Theta(int(obj["theta"]["a"]), int(obj["theta"]["b"]))
        sets = obj["sets"]
        if not isinstance(sets, list) or not sets:
            raise ParseError("'sets' must be a nonempty list")
        for s in sets:
            if not isinstance(s, list) or not all(isinstance(e, int) for e in s):
                raise ParseError(f"set {s!r} is not a list of integers")
            if len(set(s)) != len(s):
                raise ParseError(f"set {s!r} repeats an element")
        n = obj["n"]
        for s in sets:
            if any(not 1 <= e <= n for e in s):
                raise ParseError(f"set {s!r} has an element outside [1, {n}]")
        return Family.from_lists(n, obj["r"], theta, sets)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed family document: {exc!r}") from None


def dumps_json(F: Family) -> str:
    return json.dumps(to_json_obj(F))


def loads_json(text: str) -> Family:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(obj, dict):
        raise ParseError("a family document must be a JSON object")
    return from_json_obj(obj)


def loads(text: str) -> Family:
    """Parse either format, chosen by the first non-blank character."""
    return loads_json(text) if text.lstrip().startswith("{") else loads_text(text)


def read_family(path: str | Path) -> Family:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def write_family(F: Family, path: str | Path, structured: bool = False) -> None:
    Path(path).write_text(dumps_json(F) + "\n" if structured else dumps_text(F))
