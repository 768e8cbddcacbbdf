"""Sunflower decomposition of a closed family and executable lemma checks.

All set references in reports are 0-based indices into ``F.sets``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .core import Family, FamilyError, elements, is_r_closed, is_sunflower


class StructureError(FamilyError):
    """The family does not satisfy the preconditions of the decomposition."""


def tor(F: Family, idx: int) -> list[int]:
    """Indices of the theta-intersectors of set ``idx``."""
    A = F.sets[idx]
    size = A.bit_count()
    return [
        j for j, B in enumerate(F.sets)
        if j != idx and B.bit_count() >= size and F.theta.hits((A & B).bit_count(), size)
    ]


def core_of(F: Family, idx: int) -> int:
    intersectors = tor(F, idx)
    if not intersectors:
        raise StructureError(f"core undefined: set #{idx + 1} has no theta-intersectors")
    A = F.sets[idx]
    core = A & F.sets[intersectors[0]]
    for j in intersectors[1:]:
        if A & F.sets[j] != core:
            raise StructureError(
                f"core of set #{idx + 1} is not well defined (sets #{intersectors[0] + 1} and #{j + 1} "
                "cut it differently); the family cannot be 3-closed")
    return core


def petal_of(F: Family, idx: int) -> int:
    return F.sets[idx] & ~core_of(F, idx)


def _require_closed(F: Family, r: int | None) -> int:
    r = max(F.r, 3) if r is None else r
    if r < 3:
        raise StructureError("the decomposition needs r >= 3")
    v = is_r_closed(F, r)
    if not v.ok:
        raise StructureError(f"family is not {r}-closed: {v.describe(F)}")
    return r


@dataclass(frozen=True)
class StructureReport:
    S: tuple[int, ...]
    S_nor: tuple[int, ...]
    S_exc: tuple[int, ...]
    i_min: int
    i_max: int | None
    core_by_size: dict[int, int]
    cores: dict[int, int]  # set index -> core, for normal sets
    E_nor: int | None
    E_exc: int | None
    E_theta: int | None
    F_star: tuple[int, ...]
    matched: tuple[str, ...] = ()

    @property
    def top_core(self) -> int:
        return 0 if self.i_max is None else self.core_by_size[self.i_max]

    def petal(self, F: Family, idx: int) -> int:
        return F.sets[idx] & ~self.cores[idx]

    def e_sets(self) -> set[int]:
        return {e for e in (self.E_nor, self.E_exc, self.E_theta) if e is not None}

    def to_dict(self) -> dict:
        return {
            "S": list(self.S),
            "S_nor": list(self.S_nor),
            "S_exc": list(self.S_exc),
            "i_min": self.i_min,
            "i_max": self.i_max,
            "core_by_size": {str(i): elements(c) for i, c in sorted(self.core_by_size.items())},
            "E_nor": self.E_nor,
            "E_exc": self.E_exc,
            "E_theta": self.E_theta,
            "F_star": list(self.F_star),
            "matched": list(self.matched),
        }


def _classify(F: Family) -> StructureReport:
    theta = F.theta
    by_size: dict[int, list[int]] = {}
    for i, s in enumerate(F.sets):
        by_size.setdefault(s.bit_count(), []).append(i)
    S = tuple(sorted(by_size))
    has_tor = {i: bool(tor(F, i)) for i in range(len(F))}
    S_nor = tuple(i for i in S if all(has_tor[j] for j in by_size[i]))
    S_exc = tuple(i for i in S if i not in S_nor)
    cores = {j: core_of(F, j) for i in S_nor for j in by_size[i]}
    core_by_size = {i: cores[by_size[i][0]] for i in S_nor}
    i_max = S_nor[-1] if S_nor else None

    E_nor = E_exc = E_theta = None
    matched = []
    if i_max is not None:
        C = core_by_size[i_max]
        hits = [j for j in cores if F.sets[j] & ~cores[j] & C]
        if hits:
            E_nor = hits[0]
            matched.append("E_nor")
        below = [by_size[i][0] for i in S_exc if i < i_max and C & ~F.sets[by_size[i][0]] == 0]
        if below:
            E_exc = below[0]
            matched.append("E_exc")
    odd = [j for j, s in enumerate(F.sets) if s.bit_count() % theta.b]
    if odd:
        E_theta = odd[0]
        matched.append("E_theta")
    drop = {e for e in (E_nor, E_exc, E_theta) if e is not None}
    F_star = tuple(j for j in range(len(F)) if j not in drop)
    return StructureReport(S, S_nor, S_exc, min(S), i_max, core_by_size, cores,
                           E_nor, E_exc, E_theta, F_star, tuple(matched))


def classify(F: Family, r: int | None = None) -> StructureReport:
    """Decompose F into normal and exceptional sunflowers.

    ``r`` defaults to ``max(F.r, 3)``; the family must be r-closed.
    """
    _require_closed(F, r)
    return _classify(F)


# ---------------------------------------------------------------------------
# level partition

@dataclass(frozen=True)
class Level:
    k: int
    lo: Fraction | None  # exclusive; None for I_0
    hi: Fraction
    sizes: tuple[int, ...]
    Y: int

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "interval": "{%s}" % self.hi if self.lo is None else f"({self.lo}, {self.hi}]",
            "sizes": list(self.sizes),
            "Y": elements(self.Y),
        }


@dataclass(frozen=True)
class LevelPartition:
    members: tuple[int, ...]  # indices of the reduced family inside F
    C: int
    i_min: int | None  # None when the reduced family is empty
    levels: tuple[Level, ...]

    def level_of(self, size: int) -> int:
        for lv in self.levels:
            if size in lv.sizes:
                return lv.k
        raise KeyError(size)

    def to_dict(self) -> dict:
        return {
            "members": list(self.members),
            "C": elements(self.C),
            "i_min": self.i_min,
            "levels": [lv.to_dict() for lv in self.levels],
        }


def level_index(size: int, i_min: int, a: int, b: int) -> int:
    """k with size in I_k, exactly: I_0 = {i_min}, I_k = (i_min (b/a)^(k-1), i_min (b/a)^k]."""
    if size < i_min:
        raise ValueError("size below i_min")
    if size == i_min:
        return 0
    k = 1
    while size * a ** k > i_min * b ** k:
        k += 1
    return k


def reduce_to_star(F: Family, r: int | None = None) -> tuple[Family, tuple[int, ...]]:
    """Remove E-sets repeatedly until the family equals its own F*.

    Returns the reduced family and the original indices of its sets.
    """
    _require_closed(F, r)
    idx = tuple(range(len(F)))
    G = F
    while len(G):
        rep = _classify(G)
        if len(rep.F_star) == len(G):
            return G, idx
        idx = tuple(idx[j] for j in rep.F_star)
        G = G.subfamily(rep.F_star)
    return G, idx


def partition_levels(F: Family, r: int | None = None) -> LevelPartition:
    G, idx = reduce_to_star(F, r)
    if not len(G):
        return LevelPartition(idx, 0, None, ())
    rep = _classify(G)
    a, b = G.theta.a, G.theta.b
    C = rep.top_core
    groups: dict[int, list[int]] = {}
    for i in rep.S:
        groups.setdefault(level_index(i, rep.i_min, a, b), []).append(i)
    levels = []
    for k in range(max(groups) + 1):
        sizes = tuple(groups.get(k, ()))
        sun = 0
        for s in G.sets:
            if s.bit_count() in sizes:
                sun |= s
        hi = Fraction(rep.i_min * b ** k, a ** k)
        lo = None if k == 0 else Fraction(rep.i_min * b ** (k - 1), a ** (k - 1))
        levels.append(Level(k, lo, hi, sizes, sun & ~C))
    return LevelPartition(idx, C, rep.i_min, tuple(levels))


# ---------------------------------------------------------------------------
# audit

@dataclass
class AuditCheck:
    name: str
    passed: bool = True
    witness: str | None = None

    def fail(self, witness: str) -> None:
        if self.passed:
            self.passed = False
            self.witness = witness


@dataclass
class AuditReport:
    checks: list[AuditCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[AuditCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [{"name": c.name, "passed": c.passed, "witness": c.witness} for c in self.checks],
        }


def _sets(ix) -> str:
    return "[" + ", ".join(f"#{i + 1}" for i in ix) + "]"


def audit(F: Family, r: int | None = None) -> AuditReport:
    """Evaluate every structural statement on F.  Raises StructureError when
    F is not closed enough for the statements to apply."""
    _require_closed(F, r)
    theta = F.theta
    a, b = theta.a, theta.b
    sets = F.sets
    size = [s.bit_count() for s in sets]
    by_size: dict[int, list[int]] = {}
    for i, s in enumerate(size):
        by_size.setdefault(s, []).append(i)
    report = AuditReport()

    def check(name: str) -> AuditCheck:
        c = AuditCheck(name)
        report.checks.append(c)
        return c

    c = check("sunflower_per_size")
    for i, ix in sorted(by_size.items()):
        if not is_sunflower([sets[j] for j in ix])[0]:
            c.fail(f"size {i}: {_sets(ix)}")

    c = check("core_well_defined")
    for j in range(len(F)):
        ts = tor(F, j)
        cuts = {sets[j] & sets[t] for t in ts}
        if len(cuts) > 1:
            c.fail(f"set #{j + 1} cut differently by its intersectors")
        elif cuts and not theta.hits(next(iter(cuts)).bit_count(), size[j]):
            c.fail(f"set #{j + 1} core has the wrong size")

    rep = _classify(F)
    cores = rep.cores

    c = check("exceptional_singleton")
    for i in rep.S_exc:
        if len(by_size[i]) != 1:
            c.fail(f"exceptional size {i} has {len(by_size[i])} sets")

    c = check("equal_cores_within_size")
    for i in rep.S_nor:
        if len({cores[j] for j in by_size[i]}) != 1:
            c.fail(f"size {i}")

    c = check("strict_core_chain")
    for i, j in combinations(rep.S_nor, 2):
        ci, cj = rep.core_by_size[i], rep.core_by_size[j]
        if ci & ~cj or ci == cj:
            c.fail(f"core of size {i} is not strictly inside core of size {j}")

    c = check("small_set_tor")  # i < theta j forces B in Tor(A)
    for i in rep.S:
        for j in rep.S:
            if b * i < a * j:
                for p in by_size[i]:
                    for q in by_size[j]:
                        if not theta.hits((sets[p] & sets[q]).bit_count(), i):
                            c.fail(f"sets #{p + 1}, #{q + 1}")

    C = rep.top_core
    c_above = check("exceptional_above_contains_core")
    c_below = check("exceptional_below_dichotomy")
    if rep.i_max is not None:
        covering = []
        for i in rep.S_exc:
            A = sets[by_size[i][0]]
            if i > rep.i_max and C & ~A:
                c_above.fail(f"set #{by_size[i][0] + 1}")
            if i < rep.i_max:
                if C & ~A == 0:
                    covering.append(by_size[i][0])
                elif not theta.hits((A & C).bit_count(), i):
                    c_below.fail(f"set #{by_size[i][0] + 1}")
        if len(covering) > 1:
            c_below.fail(f"several small exceptional sets contain the top core: {_sets(covering)}")

    c = check("non_divisible_set")
    odd = [j for j in range(len(F)) if size[j] % b]
    if len(odd) > 1:
        c.fail(f"several sets of size not divisible by {b}: {_sets(odd)}")
    for j in odd:
        if size[j] in rep.S_nor:
            c.fail(f"set #{j + 1} is normal")
        if rep.i_max is not None and C & ~sets[j]:
            c.fail(f"set #{j + 1} misses part of the top core")

    c = check("e_nor_unique")
    if rep.i_max is not None:
        hits = [j for j in cores if sets[j] & ~cores[j] & C]
        if len(hits) > 1:
            c.fail(f"petals of {_sets(hits)} meet the top core")
        for j in hits:
            if C & ~sets[j]:
                c.fail(f"set #{j + 1} does not contain the top core")

    c = check("at_most_one_e_set")
    if len(rep.e_sets()) > 1:
        c.fail(f"E-sets {_sets(sorted(rep.e_sets()))}")

    star_nor = [j for j in cores if j != rep.E_nor]
    c = check("petal_core_disjoint")
    for p in star_nor:
        for q in star_nor:
            if sets[p] & ~cores[p] & cores[q]:
                c.fail(f"petal of #{p + 1} meets core of #{q + 1}")

    c = check("normal_star_fully_closed")
    if len(star_nor) >= 2:
        sub = F.subfamily(star_nor)
        v = is_r_closed(sub, len(sub))
        if not v.ok:
            c.fail(v.describe(sub))

    c = check("star_sizes_divisible")
    for j in rep.F_star:
        if size[j] % b:
            c.fail(f"set #{j + 1} has size {size[j]}")

    c = check("star_size")
    if len(F) - len(rep.F_star) > 1:
        c.fail(f"|F| = {len(F)}, |F*| = {len(rep.F_star)}")

    lp = partition_levels(F, r)
    G = F.subfamily(lp.members)
    gsize = [s.bit_count() for s in G.sets]
    c = check("levels_cover_sizes")
    seen = [i for lv in lp.levels for i in lv.sizes]
    if sorted(seen) != sorted(set(gsize)) or len(seen) != len(set(seen)):
        c.fail(f"level sizes {seen}")
    for lv in lp.levels:
        for i in lv.sizes:
            if (lv.lo is not None and not i > lv.lo) or not i <= lv.hi:
                c.fail(f"size {i} outside I_{lv.k}")

    c = check("y_disjoint")
    for u, v in combinations(lp.levels, 2):
        if v.k > u.k + 1 and u.Y & v.Y:
            c.fail(f"Y_{u.k} and Y_{v.k} share {elements(u.Y & v.Y)}")

    free = F.n - lp.C.bit_count()
    for name, parity in (("y_odd_sum", 1), ("y_even_sum", 0)):
        c = check(name)
        total = sum(lv.Y.bit_count() for lv in lp.levels if lv.k % 2 == parity)
        if total > free:
            c.fail(f"sum {total} > n - |C| = {free}")

    c = check("level_count")
    for lv in lp.levels:
        for i in lv.sizes:
            count = gsize.count(i)
            # |F(i)| <= |Y_k| / ((1 - theta) i)
            if count * (b - a) * i > lv.Y.bit_count() * b:
                c.fail(f"size {i}: {count} sets, |Y_{lv.k}| = {lv.Y.bit_count()}")
    return report
