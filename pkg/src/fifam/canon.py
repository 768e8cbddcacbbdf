"""Canonical labeling and isomorphism of families under relabelings of [n].

``canonical_form`` refines an ordered partition of the ground set by
incidence profiles, individualizes elements of the first non-singleton cell
when refinement stalls, and keeps the labeling whose sorted sequence of
sets (by size, then lexicographically) is smallest.  Automorphisms found
along the way prune equivalent branches.

``is_lexmin`` is the exact test used by orderly generation: it compares a
family against its image under every permutation of [n].
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from math import factorial

import numpy as np

from .core import Family, FamilyError, apply_perm, set_key


class CanonicalizationIncomplete(RuntimeError):
    """The leaf budget ran out before the search tree was exhausted."""


DEFAULT_LEAF_BUDGET = 200_000


def _refine(cells: list[list[int]], sets: list[int]) -> list[list[int]]:
    """Split cells until every element in a cell sees the same set profile."""
    while True:
        cell_of = {e: ci for ci, cell in enumerate(cells) for e in cell}
        set_sig = []
        for s in sets:
            prof = [0] * len(cells)
            m, e = s, 0
            while m:
                if m & 1:
                    prof[cell_of[e]] += 1
                m >>= 1
                e += 1
            # small sets first, then sets leaning on early cells
            set_sig.append((s.bit_count(),) + tuple(-x for x in prof))
        rank = {sig: i for i, sig in enumerate(sorted(set(set_sig)))}
        set_col = [rank[sig] for sig in set_sig]
        new_cells: list[list[int]] = []
        for cell in cells:
            if len(cell) == 1:
                new_cells.append(cell)
                continue
            groups: dict[tuple, list[int]] = {}
            for e in cell:
                counts = [0] * len(rank)
                for j, s in enumerate(sets):
                    if s >> e & 1:
                        counts[set_col[j]] += 1
                # elements lying in many early sets come first
                groups.setdefault(tuple(-c for c in counts), []).append(e)
            new_cells.extend(groups[k] for k in sorted(groups))
        if len(new_cells) == len(cells):
            return new_cells
        cells = new_cells


def _labeling_key(cells: list[list[int]], sets: list[int]) -> tuple[tuple, list[int]]:
    perm = [0] * len(cells)
    for label, cell in enumerate(cells, start=1):
        perm[cell[0]] = label
    return tuple(sorted(set_key(apply_perm(s, perm)) for s in sets)), perm


def canonical_labeling(F: Family, leaf_budget: int = DEFAULT_LEAF_BUDGET) -> list[int]:
    """A permutation (1-based images) taking F to its canonical form."""
    n = F.n
    sets = list(F.sets)
    best_key = None
    best_perm: list[int] = []
    first_perm: list[int] | None = None
    autos: list[list[int]] = []  # 0-based element maps
    leaves = 0

    def orbit_rep(v: int, fixed: list[int], seen_reps: set[int]) -> bool:
        """True iff v is an image of some explored sibling under automorphisms fixing `fixed`."""
        gens = [g for g in autos if all(g[x] == x for x in fixed)]
        if not gens:
            return False
        orbit = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for g in gens:
                y = g[x]
                if y not in orbit:
                    orbit.add(y)
                    stack.append(y)
        return bool(orbit & seen_reps)

    def walk(cells: list[list[int]], path: list[int]) -> None:
        nonlocal best_key, best_perm, first_perm, leaves
        cells = _refine(cells, sets)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            leaves += 1
            if leaves > leaf_budget:
                raise CanonicalizationIncomplete(
                    f"canonical labeling needs more than {leaf_budget} leaves (n = {n})")
            key, perm = _labeling_key(cells, sets)
            if first_perm is None:
                first_perm = perm
            for ref in (first_perm, best_perm):
                if ref and ref is not perm and \
                        tuple(sorted(set_key(apply_perm(s, ref)) for s in sets)) == key:
                    # ref^-1 o perm is an automorphism
                    inv = [0] * n
                    for e, lab in enumerate(ref):
                        inv[lab - 1] = e
                    g = [inv[perm[e] - 1] for e in range(n)]
                    if any(g[e] != e for e in range(n)) and g not in autos:
                        autos.append(g)
            if best_key is None or key < best_key:
                best_key, best_perm = key, perm
            return
        explored: set[int] = set()
        for v in list(cells[target]):
            if orbit_rep(v, path, explored):
                continue
            explored.add(v)
            rest = [e for e in cells[target] if e != v]
            walk(cells[:target] + [[v], rest] + cells[target + 1:], path + [v])

    walk([list(range(n))], [])
    return best_perm


def canonical_form(F: Family, leaf_budget: int = DEFAULT_LEAF_BUDGET) -> Family:
    return F.relabel(canonical_labeling(F, leaf_budget)).sorted()


def is_isomorphic(F: Family, G: Family, leaf_budget: int = DEFAULT_LEAF_BUDGET):
    """(True, sigma) with sigma(F) = G, or (False, None).  sigma is 1-based."""
    if F.n != G.n:
        raise FamilyError(f"families live on different ground sets ({F.n} vs {G.n})")
    if len(F) != len(G) or sorted(F.sizes()) != sorted(G.sizes()):
        return False, None
    pf = canonical_labeling(F, leaf_budget)
    pg = canonical_labeling(G, leaf_budget)
    if set(F.relabel(pf).sets) != set(G.relabel(pg).sets):
        return False, None
    inv_g = [0] * F.n
    for e, lab in enumerate(pg):
        inv_g[lab - 1] = e + 1
    sigma = [inv_g[pf[e] - 1] for e in range(F.n)]
    return True, sigma


# ---------------------------------------------------------------------------
# exact lex-min test over the whole symmetric group

LEXMIN_MAX_N = 8


@lru_cache(maxsize=None)
def _mask_order(n: int) -> tuple[np.ndarray, np.ndarray]:
    masks = sorted(range(1, 1 << n), key=set_key)
    rank = np.zeros(1 << n, dtype=np.int32)
    for i, m in enumerate(masks):
        rank[m] = i
    return np.array(masks, dtype=np.int64), rank


@lru_cache(maxsize=None)
def _image_ranks(n: int) -> np.ndarray:
    """Row p, column m: rank of the image of mask m under the p-th permutation."""
    if n > LEXMIN_MAX_N:
        raise ValueError(f"permutation table limited to n <= {LEXMIN_MAX_N}")
    _, rank = _mask_order(n)
    perms = np.array(list(permutations(range(n))), dtype=np.int64)
    table = np.zeros((factorial(n), 1 << n), dtype=np.int64)
    for e in range(n):
        bit = (np.arange(1 << n) >> e) & 1
        table += np.outer(1 << perms[:, e], bit)
    return rank[table].astype(np.int32)


def mask_rank(n: int) -> np.ndarray:
    return _mask_order(n)[1]


def is_lexmin(masks, n: int) -> bool:
    """True iff the key-sorted sequence of ``masks`` is minimal in its orbit."""
    table = _image_ranks(n)
    cols = np.asarray(masks, dtype=np.int64)
    rows = np.sort(table[:, cols], axis=1)
    ident = np.sort(mask_rank(n)[cols])
    diff = rows != ident
    first = diff.argmax(axis=1)
    smaller = diff.any(axis=1) & (rows[np.arange(len(rows)), first] < ident[first])
    return not smaller.any()


def lexmin_form(F: Family) -> Family:
    """The exact lex-min representative (n <= LEXMIN_MAX_N)."""
    table = _image_ranks(F.n)
    masks_sorted, _ = _mask_order(F.n)
    rows = np.sort(table[:, np.asarray(F.sets, dtype=np.int64)], axis=1)
    best = min(map(tuple, rows.tolist()))
    return Family(F.n, F.r, F.theta, tuple(int(masks_sorted[i]) for i in best))
