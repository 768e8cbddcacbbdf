"""Explicit r-closed theta-intersecting families.

Labeling convention: nested cores occupy the initial segment {1, 2, ...} of
the ground set and petals consume increasing labels after it.  Every public
generator re-verifies its output before returning it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .core import HALF, Family, FamilyError, Theta, is_r_closed, to_mask

log = logging.getLogger(__name__)


class ConstructionError(FamilyError):
    """Infeasible or unsupported generator parameters."""


@dataclass(frozen=True)
class LayerSpec:
    size: int
    count: Union[int, str] = "max"

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ConstructionError(f"layer size must be positive, got {self.size}")
        if self.count != "max" and (not isinstance(self.count, int) or self.count < 1):
            raise ConstructionError(f"layer count must be a positive integer or 'max', got {self.count!r}")


def _interval(lo: int, hi: int) -> int:
    """Mask of {lo, ..., hi} (1-based, inclusive)."""
    if hi < lo:
        return 0
    return ((1 << (hi - lo + 1)) - 1) << (lo - 1)


def _checked(F: Family, r: int | None = None) -> Family:
    v = is_r_closed(F, r if r is not None else max(F.r, len(F)) if len(F) >= 2 else F.r)
    if not v.ok:
        raise AssertionError(f"generator produced a non-closed family: {v.describe(F)}")
    return F


# ---------------------------------------------------------------------------

def bisection_max(n: int, r: int = 3) -> Family:
    """Stars {1,j} plus the size-4 sets {1,2,2k+1,2k+2}; size floor(3n/2) - 2."""
    if n < 2:
        raise ConstructionError("bisection_max needs n >= 2")
    sets = [to_mask((1, j)) for j in range(2, n + 1)]
    sets += [to_mask((1, 2, 2 * k + 1, 2 * k + 2)) for k in range(1, n // 2) if 2 * k + 2 <= n]
    return _checked(Family(n, r, HALF, tuple(sets)))


def sylvester(m: int) -> list[list[int]]:
    if m < 1 or m & (m - 1):
        raise ConstructionError(f"Sylvester Hadamard matrices exist for powers of 2 only, got {m}")
    H = [[1]]
    while len(H) < m:
        H = [row + row for row in H] + [row + [-x for x in row] for row in H]
    return H


def hadamard_family(m: int, r: int = 2) -> Family:
    """Rows of [H H; H -H; H -J] minus rows 1 and 2m+1, read as +1-incidence sets.

    Only 2-closedness is guaranteed, so the family is verified at r = 2.
    """
    H = sylvester(m)
    rows = [h + h for h in H] + [h + [-x for x in h] for h in H] + [h + [-1] * m for h in H]
    del rows[2 * m]
    del rows[0]
    sets = tuple(to_mask(j + 1 for j, x in enumerate(row) if x == 1) for row in rows)
    F = Family(2 * m, r, HALF, sets)
    _checked(F, 2)
    return F


def _as_layers(layers: Iterable[LayerSpec | tuple]) -> list[LayerSpec]:
    out = []
    for spec in layers:
        out.append(spec if isinstance(spec, LayerSpec) else LayerSpec(*spec))
    return out


def layered_sunflower(n: int, theta: Theta, layers: Sequence[LayerSpec | tuple],
                      r: int = 3) -> Family:
    """Nested cores with pairwise disjoint petals drawn outside the top core.

    Fixed counts are allocated first; ``"max"`` layers then take as many
    petals as the remaining pool allows, smallest layer first.
    """
    specs = _as_layers(layers)
    if not specs:
        raise ConstructionError("at least one layer is required")
    sizes = [s.size for s in specs]
    if sizes != sorted(set(sizes)):
        raise ConstructionError("layer sizes must be strictly increasing")
    for s in sizes:
        if s % theta.b:
            raise ConstructionError(f"layer size {s} is not a multiple of b = {theta.b}")
    top_core = theta.a * sizes[-1] // theta.b
    if top_core > n:
        raise ConstructionError("top core does not fit in the ground set")
    pool = n - top_core
    petal = {s: s - theta.a * s // theta.b for s in sizes}
    counts = {}
    for spec in specs:
        if spec.count != "max":
            counts[spec.size] = spec.count
            pool -= spec.count * petal[spec.size]
    if pool < 0:
        raise ConstructionError("fixed layer counts exceed the petal pool")
    for spec in specs:
        if spec.count == "max":
            counts[spec.size] = pool // petal[spec.size]
            pool -= counts[spec.size] * petal[spec.size]
            if counts[spec.size] == 0:
                raise ConstructionError(f"no room left for any set of size {spec.size}")
    nxt = top_core + 1
    sets = []
    for s in sizes:
        core = _interval(1, theta.a * s // theta.b)
        for _ in range(counts[s]):
            sets.append(core | _interval(nxt, nxt + petal[s] - 1))
            nxt += petal[s]
    return _checked(Family(n, r, theta, tuple(sets)))


# ---------------------------------------------------------------------------
# shared-petal layered constructions

def _shared_layers(n: int, theta: Theta, sizes: Sequence[int], columns: int,
                   add_extra: bool) -> list[int]:
    """Layers with nested cores whose petals overlap in controlled amounts.

    The top layer's petals are disjoint "columns" of the pool.  A lower
    layer L must meet each column in 0 or d = core(top) - core(L) elements,
    so its petals are assembled from d-element blocks of distinct columns
    plus single elements outside every column.  Two lower layers L < L' may
    overlap in 0 or core(L') - core(L) elements.  Optionally a final set
    made of the top core plus unused elements is added.
    """
    a, b = theta.a, theta.b
    cores = [a * s // b for s in sizes]
    petals = [s - c for s, c in zip(sizes, cores)]
    top_c, top_p = cores[-1], petals[-1]
    base = top_c + 1
    pool_size = n - top_c
    col_elems = [list(range(base + c * top_p, base + (c + 1) * top_p)) for c in range(columns)]
    free = list(range(base + columns * top_p, n + 1))
    column_of = {e: c for c, col in enumerate(col_elems) for e in col}
    assert columns * top_p <= pool_size

    chosen: dict[int, list[frozenset[int]]] = {len(sizes) - 1: [frozenset(col) for col in col_elems]}
    used_any: set[int] = set().union(*col_elems) if col_elems else set()
    # element -> list of (layer, petal index) for lower layers
    owners: dict[int, list[tuple[int, int]]] = {}

    for L in range(len(sizes) - 2, -1, -1):
        d = top_c - cores[L]
        units: list[tuple[int, tuple[int, ...]]] = []
        for c, col in enumerate(col_elems):
            for k in range(0, len(col) - d + 1, d):
                units.append((c, tuple(col[k:k + d])))
        units += [(-1, (e,)) for e in free]
        taken: set[int] = set()
        layer_petals: list[frozenset[int]] = []
        while True:
            petal: list[int] = []
            cols: set[int] = set()
            touch: dict[tuple[int, int], int] = {}
            for c, unit in units:
                if len(petal) + len(unit) > petals[L]:
                    continue
                if c >= 0 and c in cols:
                    continue
                if any(e in taken for e in unit):
                    continue
                extra: dict[tuple[int, int], int] = {}
                for e in unit:
                    for key in owners.get(e, ()):
                        extra[key] = extra.get(key, 0) + 1
                if any(touch.get(key, 0) + v > cores[key[0]] - cores[L] for key, v in extra.items()):
                    continue
                for key, v in extra.items():
                    touch[key] = touch.get(key, 0) + v
                petal.extend(unit)
                if c >= 0:
                    cols.add(c)
                if len(petal) == petals[L]:
                    break
            if len(petal) < petals[L]:
                break
            if any(v != cores[key[0]] - cores[L] for key, v in touch.items()):
                break
            idx = len(layer_petals)
            layer_petals.append(frozenset(petal))
            for e in petal:
                taken.add(e)
                used_any.add(e)
                owners.setdefault(e, []).append((L, idx))
        chosen[L] = layer_petals

    sets = []
    for L in range(len(sizes)):
        core = _interval(1, cores[L])
        for p in chosen[L]:
            sets.append(core | to_mask(p))
    if add_extra:
        # top core plus unused elements, at the smallest size >= |top core|
        spare = [e for e in range(base, n + 1) if e not in used_any]
        for s in sizes:
            if s >= top_c and s - top_c <= len(spare):
                extra_set = _interval(1, top_c) | to_mask(spare[: s - top_c])
                if extra_set not in sets:
                    sets.append(extra_set)
                break
    return sets


def shared_layers(n: int, theta: Theta, sizes: Sequence[int], r: int = 3,
                  add_extra: bool = True) -> Family:
    """Best verified `_shared_layers` output over every number of top columns."""
    sizes = list(sizes)
    if sizes != sorted(set(sizes)) or not sizes:
        raise ConstructionError("layer sizes must be strictly increasing")
    for s in sizes:
        if s % theta.b:
            raise ConstructionError(f"layer size {s} is not a multiple of b = {theta.b}")
    if sizes[-1] > n:
        raise ConstructionError(f"largest set size {sizes[-1]} exceeds n = {n}")
    top_c = theta.a * sizes[-1] // theta.b
    top_p = sizes[-1] - top_c
    best: list[int] | None = None
    for columns in range((n - top_c) // top_p + 1):
        cand = _shared_layers(n, theta, sizes, columns, add_extra)
        if best is None or len(cand) >= len(best):
            best = cand
    F = Family(n, r, theta, tuple(best))
    return _checked(F)


def two_layer_shared(n: int, theta: Theta, r: int = 3) -> Family:
    """Sizes b and 2b; a size-b petal meets a size-2b petal in 0 or a elements."""
    if n < 2 * theta.b:
        raise ConstructionError(f"two_layer_shared needs n >= 2b = {2 * theta.b}")
    return shared_layers(n, theta, [theta.b, 2 * theta.b], r=r)


def three_layer(n: int, theta: Theta, r: int = 3) -> Family:
    """theta = 1/b: sizes {b, 2b, 3b} for odd b and {b, 2b, 4b} for even b."""
    if theta.a != 1:
        raise ConstructionError("three_layer requires theta = 1/b")
    b = theta.b
    sizes = [b, 2 * b, 3 * b] if b % 2 else [b, 2 * b, 4 * b]
    if n < sizes[-1]:
        raise ConstructionError(f"three_layer needs n >= {sizes[-1]}")
    return shared_layers(n, theta, sizes, r=r)


def imin_constrained(n: int, k: int, r: int = 3) -> Family:
    """theta = 1/2 family with set sizes k, k+2, k+4 over nested cores.

    Its star (the family minus the one extra top-core set) has minimum set
    size k.
    """
    if k % 2:
        raise ConstructionError("k must be even so that cores are integral")
    if k < 4:
        raise ConstructionError("k must be at least 4")
    if n < k + 4:
        raise ConstructionError(f"imin_constrained needs n >= k + 4 = {k + 4}")
    return shared_layers(n, HALF, [k, k + 2, k + 4], r=r)


def chain_family(n: int, theta: Theta, r: int = 3) -> Family:
    """A_i of size i*b with core {1..i*a} and private petals, k maximal.

    Uses a*k + (b - a)*k*(k + 1)/2 elements.
    """
    a, b = theta.a, theta.b
    if n < b:
        raise ConstructionError(f"chain_family needs n >= b = {b}")
    k = 0
    while a * (k + 1) + (b - a) * (k + 1) * (k + 2) // 2 <= n:
        k += 1
    nxt = a * k + 1
    sets = []
    for i in range(1, k + 1):
        p = i * (b - a)
        sets.append(_interval(1, i * a) | _interval(nxt, nxt + p - 1))
        nxt += p
    return _checked(Family(n, r, theta, tuple(sets)))


def chain_union_size(k: int, theta: Theta) -> int:
    return theta.a * k + (theta.b - theta.a) * k * (k + 1) // 2


GENERATORS = {
    "bisection-max": bisection_max,
    "hadamard": hadamard_family,
    "layered": layered_sunflower,
    "two-layer": two_layer_shared,
    "three-layer": three_layer,
    "imin": imin_constrained,
    "chain": chain_family,
}
