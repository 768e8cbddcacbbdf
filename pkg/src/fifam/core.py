"""Exact domain types and the r-closed theta-intersecting verifier.

Sets are stored as Python ``int`` bitmasks: element ``i`` of the ground set
``[n] = {1, ..., n}`` is bit ``i - 1``.  Python integers are unbounded, so the
same representation serves every ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence


class FamilyError(ValueError):
    """Raised when a value violates a Family / Theta invariant."""


# ---------------------------------------------------------------------------
# bitmask helpers

def to_mask(elements: Iterable[int] | int) -> int:
    """Bitmask of a collection of 1-based elements (ints pass through)."""
    if isinstance(elements, int):
        return elements
    m = 0
    for e in elements:
        if not isinstance(e, int) or e < 1:
            raise FamilyError(f"element {e!r} is not a positive integer")
        m |= 1 << (e - 1)
    return m


def elements(mask: int) -> list[int]:
    """Sorted 1-based members of a bitmask."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def card(mask: int) -> int:
    return mask.bit_count()


def set_key(mask: int) -> tuple[int, tuple[int, ...]]:
    """Total order on sets: by size, then lexicographically by sorted members."""
    return mask.bit_count(), tuple(elements(mask))


def fmt_set(mask: int) -> str:
    return "{" + ",".join(map(str, elements(mask))) + "}"


# ---------------------------------------------------------------------------
# Theta

@dataclass(frozen=True, order=False)
class Theta:
    """A reduced proper fraction a/b with 0 < a < b."""

    a: int
    b: int

    def __post_init__(self) -> None:
        if not (isinstance(self.a, int) and isinstance(self.b, int)):
            raise FamilyError("theta numerator and denominator must be integers")
        if self.a <= 0 or self.b <= 0:
            raise FamilyError(f"theta {self.a}/{self.b}: entries must be positive")
        if math.gcd(self.a, self.b) != 1:
            raise FamilyError(f"theta {self.a}/{self.b} is not reduced")
        if self.a >= self.b:
            raise FamilyError(f"theta {self.a}/{self.b} is not a proper fraction")

    def __str__(self) -> str:
        return f"{self.a}/{self.b}"

    def hits(self, inter: int, size: int) -> bool:
        """True iff inter == theta * size, in integers."""
        return self.b * inter == self.a * size

    @classmethod
    def parse(cls, text: str) -> "Theta":
        parts = text.strip().split("/")
        if len(parts) != 2:
            raise FamilyError(f"theta must be written a/b, got {text!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise FamilyError(f"theta must be written a/b, got {text!r}") from None
        return make_fraction(a, b)


def make_fraction(a: int, b: int) -> Theta:
    """Reduce a/b and check that it lies strictly between 0 and 1."""
    if a <= 0 or b <= 0:
        raise FamilyError(f"{a}/{b}: numerator and denominator must be positive")
    g = math.gcd(a, b)
    a, b = a // g, b // g
    if a >= b:
        raise FamilyError(f"{a}/{b} is improper; theta must lie in (0, 1)")
    return Theta(a, b)


HALF = Theta(1, 2)


# ---------------------------------------------------------------------------
# Family

@dataclass(frozen=True, eq=False)
class Family:
    """A family of distinct nonempty subsets of [n] with closure order r.

    ``sets`` keeps the caller's order (witness indices refer to it), but
    equality and hashing treat the family as a set of sets.
    """

    n: int
    r: int
    theta: Theta
    sets: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise FamilyError(f"ground set size must be a positive integer, got {self.n!r}")
        if not isinstance(self.r, int) or self.r < 2:
            raise FamilyError(f"closure order r must be an integer >= 2, got {self.r!r}")
        object.__setattr__(self, "sets", tuple(to_mask(s) for s in self.sets))
        seen: set[int] = set()
        limit = 1 << self.n
        for i, s in enumerate(self.sets):
            if s <= 0:
                raise FamilyError(f"set #{i + 1} is empty")
            if s >= limit:
                raise FamilyError(f"set #{i + 1} {fmt_set(s)} has an element > n = {self.n}")
            if s in seen:
                raise FamilyError(f"set #{i + 1} {fmt_set(s)} is a duplicate")
            seen.add(s)

    @classmethod
    def from_lists(cls, n: int, r: int, theta: Theta, sets: Iterable[Iterable[int]]) -> "Family":
        return cls(n, r, theta, tuple(to_mask(s) for s in sets))

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Family):
            return NotImplemented
        return (self.n, self.r, self.theta) == (other.n, other.r, other.theta) and set(
            self.sets
        ) == set(other.sets)

    def __hash__(self) -> int:
        return hash((self.n, self.r, self.theta, frozenset(self.sets)))

    def __repr__(self) -> str:
        body = ", ".join(fmt_set(s) for s in self.sets)
        return f"Family(n={self.n}, r={self.r}, theta={self.theta}, [{body}])"

    def as_lists(self) -> list[list[int]]:
        return [elements(s) for s in self.sets]

    def sizes(self) -> list[int]:
        return [s.bit_count() for s in self.sets]

    def sorted(self) -> "Family":
        """Same family with sets listed in (size, lexicographic) order."""
        return Family(self.n, self.r, self.theta, tuple(sorted(self.sets, key=set_key)))

    def subfamily(self, indices: Iterable[int]) -> "Family":
        return Family(self.n, self.r, self.theta, tuple(self.sets[i] for i in indices))

    def with_r(self, r: int) -> "Family":
        return Family(self.n, r, self.theta, self.sets)

    def relabel(self, perm: Sequence[int]) -> "Family":
        """Apply sigma to every set; ``perm[i - 1]`` is the image of element i."""
        if sorted(perm) != list(range(1, self.n + 1)):
            raise FamilyError("relabeling must be a permutation of [n]")
        return Family(self.n, self.r, self.theta, tuple(apply_perm(s, perm) for s in self.sets))


def apply_perm(mask: int, perm: Sequence[int]) -> int:
    out = 0
    i = 0
    while mask:
        if mask & 1:
            out |= 1 << (perm[i] - 1)
        mask >>= 1
        i += 1
    return out


# ---------------------------------------------------------------------------
# predicates

@dataclass(frozen=True)
class Verdict:
    """Outcome of a closure check.

    On a tuple violation ``witness`` holds the (0-based) set indices in
    lexicographic order and ``cardinality`` the size of their intersection.
    On an ``undersized`` violation it holds the single offending index and
    ``cardinality`` is that set's size.
    """

    ok: bool
    witness: tuple[int, ...] | None = None
    cardinality: int | None = None
    reason: str | None = None  # "tuple" or "undersized"

    def describe(self, family: Family | None = None) -> str:
        if self.ok:
            return "ok"
        idx = ", ".join(str(i + 1) for i in self.witness or ())
        text = f"violation ({self.reason}) at sets [{idx}], cardinality {self.cardinality}"
        if family is not None and self.witness:
            text += ": " + " ".join(fmt_set(family.sets[i]) for i in self.witness)
        return text


def pair_ok(A: int | Iterable[int], B: int | Iterable[int], theta: Theta) -> bool:
    A, B = to_mask(A), to_mask(B)
    if A == B:
        raise FamilyError("pair_ok needs two distinct sets")
    if not A or not B:
        raise FamilyError("pair_ok needs nonempty sets")
    inter = (A & B).bit_count()
    return theta.hits(inter, A.bit_count()) or theta.hits(inter, B.bit_count())


def tuple_ok(sets: Sequence[int | Iterable[int]], theta: Theta) -> bool:
    masks = [to_mask(s) for s in sets]
    if len(masks) < 2:
        raise FamilyError("tuple_ok needs at least two sets")
    if len(set(masks)) != len(masks):
        raise FamilyError("tuple_ok needs distinct sets")
    inter = masks[0]
    for m in masks[1:]:
        inter &= m
    c = inter.bit_count()
    return any(theta.hits(c, m.bit_count()) for m in masks)


def is_sunflower(sets: Sequence[int | Iterable[int]]) -> tuple[bool, int | None]:
    """(True, core) when every pairwise intersection is the global intersection."""
    masks = [to_mask(s) for s in sets]
    if not masks:
        raise FamilyError("is_sunflower needs a nonempty list")
    if len(set(masks)) != len(masks):
        raise FamilyError("is_sunflower needs distinct sets")
    core = masks[0]
    for m in masks[1:]:
        core &= m
    for x, y in combinations(masks, 2):
        if x & y != core:
            return False, None
    return True, core


def is_intersecting(F: Family) -> bool:
    return all(x & y for x, y in combinations(F.sets, 2))


def _naive_min_violation(F: Family, r: int) -> tuple[int, ...] | None:
    sets = F.sets
    for t in range(2, min(r, len(sets)) + 1):
        for combo in combinations(range(len(sets)), t):
            if not tuple_ok([sets[i] for i in combo], F.theta):
                return combo
    return None


def _min_violation_order(F: Family, r: int) -> int | None:
    """Smallest t <= r such that some t-tuple fails, or None.

    Pairs are checked directly.  Once every pair passes, a tuple whose two
    smallest members have sizes s1 <= s2 is valid iff its intersection has
    size theta*s1 or theta*s2.  For each choice of the two smallest members
    the reachable intersections are explored breadth-first, deduplicated by
    mask, so the first level that produces an invalid mask is the minimum
    violating tuple size.
    """
    theta = F.theta
    sets = F.sets
    m = len(sets)
    if m < 2 or r < 2:
        return None
    sizes = [s.bit_count() for s in sets]
    for i in range(m):
        for j in range(i + 1, m):
            c = (sets[i] & sets[j]).bit_count()
            if not (theta.hits(c, sizes[i]) or theta.hits(c, sizes[j])):
                return 2
    if r == 2 or m == 2:
        return None
    order = sorted(range(m), key=lambda i: (sizes[i], i))
    best: int | None = None
    limit = min(r, m)
    for p in range(m):
        A1 = sets[order[p]]
        s1 = sizes[order[p]]
        for q in range(p + 1, m - 1):
            cap = limit if best is None else best - 1
            if cap < 3:
                return best
            later = [sets[order[x]] for x in range(q + 1, m)]
            t = _first_bad_level(A1 & sets[order[q]], later, s1, sizes[order[q]], theta, cap)
            if t is not None:
                best = t
    return best


def _first_bad_level(seed: int, later: list[int], s1: int, s2: int, theta: Theta,
                     cap: int) -> int | None:
    seen = {seed}
    frontier = [seed]
    t = 2
    while frontier and t < cap:
        t += 1
        nxt = []
        for M in frontier:
            for B in later:
                M2 = M & B
                if M2 in seen:
                    continue
                c = M2.bit_count()
                if not (theta.hits(c, s1) or theta.hits(c, s2)):
                    return t
                seen.add(M2)
                nxt.append(M2)
        frontier = nxt
    return None


def is_r_closed(F: Family, r: int | None = None, *, min_set_size: int = 1,
                naive: bool = False) -> Verdict:
    """Check every t-tuple of distinct sets, 2 <= t <= r.

    The first violation in (t ascending, lexicographic index tuple) order is
    reported.  Sets smaller than ``min_set_size`` are reported first as an
    ``undersized`` violation.
    """
    r = F.r if r is None else r
    if r < 2:
        raise FamilyError("r must be at least 2")
    for i, s in enumerate(F.sets):
        if s.bit_count() < min_set_size:
            return Verdict(False, (i,), s.bit_count(), "undersized")
    if naive:
        combo = _naive_min_violation(F, r)
    else:
        t = _min_violation_order(F, r)
        combo = None
        if t is not None:
            for c in combinations(range(len(F.sets)), t):
                if not tuple_ok([F.sets[i] for i in c], F.theta):
                    combo = c
                    break
            assert combo is not None, "fast check disagrees with enumeration"
    if combo is None:
        return Verdict(True)
    inter = F.sets[combo[0]]
    for i in combo[1:]:
        inter &= F.sets[i]
    return Verdict(False, combo, inter.bit_count(), "tuple")
