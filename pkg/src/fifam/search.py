"""Exhaustive search for maximum r-closed theta-intersecting families.

The search walks the subset tree of candidate sets taken in (size,
lexicographic) order.  Because the closure property is hereditary, a branch
can be cut as soon as one added set breaks it.  When isomorph reduction is on,
only families that are lexicographically minimal in their orbit are expanded
(orderly generation).  Deleting the largest set of such a family leaves
another minimal family, so every isomorphism class is visited exactly once.

Work is split at the first level of the tree.  Each first-level subtree is
searched on its own, with its own incumbent and an equal share of the node
budget, so results do not depend on how many workers run.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Union

from .bounds import bisection_bound, main_upper_bound
from .canon import LEXMIN_MAX_N, canonical_form, is_lexmin
from .core import HALF, Family, Theta, elements, is_r_closed, set_key

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchOptions:
    min_set_size: int = 1
    max_r_checked: Union[int, str] = "all"  # cap on r; "all" checks up to the given r
    isomorph_reduction: bool = True
    node_budget: int | None = None  # None = unlimited
    parallel_width: int = 1
    assume_paper_bounds: bool = False
    exhaustive_limit: int = 6

    def __post_init__(self) -> None:
        if self.min_set_size < 1:
            raise ValueError("min_set_size must be at least 1")
        if self.max_r_checked != "all" and (not isinstance(self.max_r_checked, int) or self.max_r_checked < 2):
            raise ValueError("max_r_checked must be an integer >= 2 or 'all'")
        if self.node_budget is not None and self.node_budget < 1:
            raise ValueError("node_budget must be positive")
        if self.parallel_width < 1:
            raise ValueError("parallel_width must be positive")


@dataclass
class SearchResult:
    max_size: int
    witnesses: list[Family]
    complete: bool
    nodes_explored: int
    subtrees: int = 0
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "max_size": self.max_size,
            "complete": self.complete,
            "nodes_explored": self.nodes_explored,
            "subtrees": self.subtrees,
            "classes": len(self.witnesses),
            "witnesses": [F.as_lists() for F in self.witnesses],
            "options": self.options,
        }


# ---------------------------------------------------------------------------
# engine

def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _color_bound(vertices: list[int], adj: list[int]) -> int:
    """Greedy coloring of the compatibility graph restricted to `vertices`;
    the number of colors bounds any clique from above."""
    uncolored = 0
    for v in vertices:
        uncolored |= 1 << v
    colors = 0
    while uncolored:
        colors += 1
        avail = uncolored
        while avail:
            v = (avail & -avail).bit_length() - 1
            uncolored &= ~(1 << v)
            avail &= ~(1 << v) & ~adj[v]
    return colors


@dataclass
class _Problem:
    n: int
    a: int
    b: int
    r: int
    cands: list[int]
    adj: list[int]
    reduce: bool
    enumerate_all: bool
    distinct_sizes: bool
    cap: int | None


def _make_problem(n: int, theta: Theta, r: int, opts: SearchOptions, enumerate_all: bool,
                  distinct_sizes: bool) -> _Problem:
    cands = sorted((m for m in range(1, 1 << n) if m.bit_count() >= opts.min_set_size), key=set_key)
    adj = [0] * len(cands)
    for i, j in combinations(range(len(cands)), 2):
        c = (cands[i] & cands[j]).bit_count()
        if theta.hits(c, cands[i].bit_count()) or theta.hits(c, cands[j].bit_count()):
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    reduce = opts.isomorph_reduction and n <= LEXMIN_MAX_N
    if opts.isomorph_reduction and not reduce:
        log.warning("full isomorph reduction needs n <= %d; only the first set is normalized", LEXMIN_MAX_N)
    cap = None
    if opts.assume_paper_bounds and r >= 3 and opts.min_set_size >= 2 and n >= 4:
        cap = bisection_bound(n) if theta == HALF else main_upper_bound(n, theta, True).value_floored
    return _Problem(n, theta.a, theta.b, r, cands, adj, reduce, enumerate_all, distinct_sizes, cap)


class _Budget(Exception):
    pass


def _run_subtree(prob: _Problem, root: int, budget: int | None) -> tuple[int, list[tuple[int, ...]], bool, int]:
    """Search every family whose smallest candidate is `root`."""
    a, b, r = prob.a, prob.b, prob.r
    cands, adj = prob.cands, prob.adj
    size = [c.bit_count() for c in cands]
    target = [1 << (a * s // b) if (a * s) % b == 0 else 0 for s in size]
    next_size = [0] * len(cands)  # first index of a strictly larger size
    j = len(cands)
    for i in range(len(cands) - 1, -1, -1):
        if i + 1 < len(cands) and size[i + 1] != size[i]:
            j = i + 1
        next_size[i] = j
    best = 0
    found: list[tuple[int, ...]] = []
    nodes = 0

    def record(fam: list[int]) -> None:
        nonlocal best, found
        k = len(fam)
        if k > best:
            best, found = k, [tuple(fam)]
        elif k == best and prob.enumerate_all:
            found.append(tuple(fam))

    def done_with(bound: int) -> bool:
        if prob.enumerate_all:
            return bound < best
        return bound <= best or (prob.cap is not None and best >= prob.cap)

    def rec(fam: list[int], states: dict[tuple[int, int], int], avail: int) -> None:
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise _Budget
        record(fam)
        accepted = []
        for j in _bits(avail):
            X = cands[j]
            tx = target[j]
            for (M, allowed), t in states.items():
                if t >= 2 and not ((allowed | tx) >> (M & X).bit_count()) & 1:
                    break
            else:
                accepted.append(j)
        if not accepted:
            return
        if done_with(len(fam) + len(accepted)) or done_with(len(fam) + _color_bound(accepted, adj)):
            return
        acc_bits = 0
        for j in accepted:
            acc_bits |= 1 << j
        for j in accepted:
            acc_bits &= ~(1 << j)
            nxt = acc_bits & adj[j]
            if prob.distinct_sizes:
                nxt &= ~((1 << next_size[j]) - 1)
            if done_with(len(fam) + 1 + nxt.bit_count()):
                continue
            child = fam + [j]
            if prob.reduce and not is_lexmin([cands[i] for i in child], prob.n):
                continue
            rec(child, _extend(states, cands[j], target[j], r), nxt)

    complete = True
    if budget == 0:
        return 0, [], False, 0
    try:
        first = [root]
        avail = 0
        start = next_size[root] if prob.distinct_sizes else root + 1
        for j in _bits(adj[root] >> start << start):
            avail |= 1 << j
        rec(first, _extend({}, cands[root], target[root], r), avail)
    except _Budget:
        complete = False
    return best, found, complete, min(nodes, budget) if budget is not None else nodes


def _extend(states: dict[tuple[int, int], int], X: int, tx: int, r: int) -> dict[tuple[int, int], int]:
    """Intersection states of all tuples of at most r - 1 sets after adding X."""
    out = dict(states)
    for (M, allowed), t in states.items():
        if t + 1 <= r - 1:
            key = (M & X, allowed | tx)
            if out.get(key, r) > t + 1:
                out[key] = t + 1
    key = (X, tx)
    out[key] = 1
    return out


def _roots(prob: _Problem, reduce: bool) -> list[int]:
    if not reduce:
        return list(range(len(prob.cands)))
    # any family can be relabeled so that its first set is {1..s}
    return [i for i, c in enumerate(prob.cands) if c & (c + 1) == 0]


def _effective_r(r: int, opts: SearchOptions) -> int:
    if r < 2:
        raise ValueError("r must be at least 2")
    if opts.max_r_checked != "all":
        r = min(r, opts.max_r_checked)
    return r


def _width(opts: SearchOptions, jobs: int) -> int:
    width = opts.parallel_width
    env = os.environ.get("FIFAM_THREADS")
    if env:
        try:
            width = min(width, max(1, int(env)))
        except ValueError:
            log.warning("ignoring non-integer FIFAM_THREADS=%r", env)
    return max(1, min(width, jobs))


def _canon_key(F: Family):
    return tuple(set_key(s) for s in F.sets)


def _search(n: int, theta: Theta, r: int, opts: SearchOptions, enumerate_all: bool,
            distinct_sizes: bool = False, exhaustive_limit: int | None = None) -> SearchResult:
    limit = opts.exhaustive_limit if exhaustive_limit is None else exhaustive_limit
    if n < 1:
        raise ValueError("n must be positive")
    if n > limit and opts.node_budget is None:
        raise ValueError(f"n = {n} is above the exhaustive limit {limit}; set a node budget")
    r = _effective_r(r, opts)
    prob = _make_problem(n, theta, r, opts, enumerate_all, distinct_sizes)
    roots = _roots(prob, opts.isomorph_reduction)
    if opts.node_budget is None:
        shares = [None] * len(roots)
    else:
        q, extra = divmod(opts.node_budget, max(1, len(roots)))
        shares = [q + (i < extra) for i in range(len(roots))]
    width = _width(opts, len(roots))
    if width > 1:
        with ProcessPoolExecutor(max_workers=width) as pool:
            parts = list(pool.map(_run_subtree, [prob] * len(roots), roots, shares))
    else:
        parts = [_run_subtree(prob, root, share) for root, share in zip(roots, shares)]

    best = max((p[0] for p in parts), default=0)
    complete = all(p[2] for p in parts)
    nodes = sum(p[3] for p in parts)
    fams = []
    for p_best, found, _, _ in parts:
        if p_best == best:
            fams.extend(found)
    classes: dict[tuple, Family] = {}
    for idx in fams:
        F = Family(n, max(r, 2), theta, tuple(prob.cands[i] for i in idx))
        C = canonical_form(F)
        classes.setdefault(_canon_key(C), C)
    witnesses = [classes[k] for k in sorted(classes)]
    if not enumerate_all:
        witnesses = witnesses[:1]
    for W in witnesses:
        v = is_r_closed(W, min(r, max(2, len(W))))
        assert v.ok, f"search produced a non-closed witness: {v.describe(W)}"
    return SearchResult(best, witnesses, complete, nodes, len(roots), asdict(opts))


def max_family_search(n: int, theta: Theta, r: int, opts: SearchOptions | None = None) -> SearchResult:
    """Largest r-closed theta-intersecting family over [n], with one witness."""
    return _search(n, theta, r, opts or SearchOptions(), enumerate_all=False)


def enumerate_maximum_families(n: int, theta: Theta, r: int,
                               opts: SearchOptions | None = None) -> SearchResult:
    """All maximum families, one canonical representative per isomorphism class."""
    return _search(n, theta, r, opts or SearchOptions(), enumerate_all=True)


def chain_search(n: int, theta: Theta, r: int, opts: SearchOptions | None = None) -> SearchResult:
    """Largest family with pairwise distinct set sizes.  Exhaustive for n <= 8
    unless a node budget is given."""
    return _search(n, theta, r, opts or SearchOptions(), enumerate_all=False,
                   distinct_sizes=True, exhaustive_limit=8)


# ---------------------------------------------------------------------------
# oracle

ORACLE_MAX_N = 4


def oracle_max_family(n: int, theta: Theta, r: int, min_set_size: int = 1) -> int:
    """Maximum family size by plain enumeration of all families over [n].

    Deliberately shares nothing with the search engine: sets are frozensets,
    every new tuple is intersected and compared in Fraction arithmetic.
    """
    if n > ORACLE_MAX_N:
        raise ValueError(f"the oracle is limited to n <= {ORACLE_MAX_N}")
    frac = Fraction(theta.a, theta.b)
    universe = [frozenset(c) for k in range(max(1, min_set_size), n + 1)
                for c in combinations(range(1, n + 1), k)]

    def fits(chosen: list[frozenset], new: frozenset) -> bool:
        for t in range(2, r + 1):
            for combo in combinations(chosen, t - 1):
                group = combo + (new,)
                common = frozenset.intersection(*group)
                if not any(len(common) == frac * len(A) for A in group):
                    return False
        return True

    best = 0

    def grow(start: int, chosen: list[frozenset]) -> None:
        nonlocal best
        best = max(best, len(chosen))
        for i in range(start, len(universe)):
            if fits(chosen, universe[i]):
                grow(i + 1, chosen + [universe[i]])

    grow(0, [])
    return best


def family_from_witness(W: Family) -> list[list[int]]:
    return [elements(s) for s in W.sets]
