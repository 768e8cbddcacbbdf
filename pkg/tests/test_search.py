import pytest

from fifam.canon import canonical_form, is_isomorphic
from fifam.constructions import bisection_max
from fifam.core import HALF, Family, Theta, is_r_closed
from fifam.search import (
    SearchOptions,
    chain_search,
    enumerate_maximum_families,
    family_from_witness,
    max_family_search,
    oracle_max_family,
)

MSS2 = SearchOptions(min_set_size=2)


class TestMaxSearch:
    def test_n4(self):
        res = max_family_search(4, HALF, 3, MSS2)
        assert res.max_size == 4 and res.complete
        star = Family.from_lists(4, 3, HALF, [[1, 2], [1, 3], [1, 4], [1, 2, 3, 4]])
        assert is_isomorphic(res.witnesses[0], star)[0]

    def test_n5(self):
        res = max_family_search(5, HALF, 3, MSS2)
        assert res.max_size == 5 and res.complete

    def test_singletons_allowed_n3(self):
        res = max_family_search(3, HALF, 3)
        assert res.max_size == 3
        ref = Family.from_lists(3, 3, HALF, [[1], [1, 2], [1, 3]])
        assert is_isomorphic(res.witnesses[0], ref)[0]

    def test_witness_valid(self):
        for theta in (HALF, Theta(1, 3), Theta(2, 3)):
            res = max_family_search(5, theta, 3)
            for W in res.witnesses:
                assert len(W) == res.max_size and is_r_closed(W, 3).ok

    def test_r_cap(self):
        a = max_family_search(5, HALF, 4, SearchOptions(min_set_size=2, max_r_checked=2))
        b = max_family_search(5, HALF, 2, MSS2)
        assert a.max_size == b.max_size


class TestEnumerate:
    def test_n4_unique(self):
        res = enumerate_maximum_families(4, HALF, 3, MSS2)
        assert res.max_size == 4 and len(res.witnesses) == 1

    def test_n6_unique_and_extremal(self):
        res = enumerate_maximum_families(6, HALF, 3, MSS2)
        assert res.complete and res.max_size == 7 and len(res.witnesses) == 1
        assert res.witnesses[0].sets == canonical_form(bisection_max(6)).sets

    def test_two_closed_admits_more_classes(self):
        res = enumerate_maximum_families(4, HALF, 2, MSS2)
        assert res.max_size == 4 and len(res.witnesses) == 3

    def test_singleton_classes(self):
        assert len(enumerate_maximum_families(4, HALF, 3).witnesses) == 2
        assert len(enumerate_maximum_families(5, HALF, 3).witnesses) == 2

    def test_witnesses_pairwise_non_isomorphic(self):
        ws = enumerate_maximum_families(6, HALF, 2, MSS2).witnesses
        assert len(ws) == 2
        assert not is_isomorphic(ws[0], ws[1])[0]


class TestOracle:
    def test_examples(self):
        assert oracle_max_family(4, HALF, 3, 2) == 4
        assert oracle_max_family(2, HALF, 3, 2) == 1
        assert oracle_max_family(3, HALF, 3, 1) == 3

    def test_limit(self):
        with pytest.raises(ValueError):
            oracle_max_family(5, HALF, 3)

    @pytest.mark.parametrize("theta", [HALF, Theta(1, 3), Theta(2, 3), Theta(1, 4)], ids=str)
    @pytest.mark.parametrize("r", [2, 3])
    def test_agrees(self, theta, r):
        for n in range(1, 5):
            for mss in (1, 2, 3):
                got = max_family_search(n, theta, r, SearchOptions(min_set_size=mss)).max_size
                assert got == oracle_max_family(n, theta, r, mss), (n, mss)


@pytest.mark.parametrize("theta", [HALF, Theta(1, 3), Theta(2, 5)], ids=str)
@pytest.mark.parametrize("n", [4, 5, 6])
def test_isomorph_reduction_safe(theta, n):
    on = enumerate_maximum_families(n, theta, 3, SearchOptions(min_set_size=2))
    off = enumerate_maximum_families(n, theta, 3, SearchOptions(min_set_size=2, isomorph_reduction=False))
    assert on.max_size == off.max_size
    assert [W.sets for W in on.witnesses] == [W.sets for W in off.witnesses]


def test_parallel_determinism():
    a = enumerate_maximum_families(6, HALF, 3, SearchOptions(min_set_size=2, parallel_width=1))
    b = enumerate_maximum_families(6, HALF, 3, SearchOptions(min_set_size=2, parallel_width=2))
    assert a.to_dict()["witnesses"] == b.to_dict()["witnesses"]
    assert (a.max_size, a.complete, a.nodes_explored) == (b.max_size, b.complete, b.nodes_explored)


def test_bound_cutoff_same_answer():
    for n in (4, 5, 6):
        opts = SearchOptions(min_set_size=2, assume_paper_bounds=True)
        assert max_family_search(n, HALF, 3, opts).max_size == 3 * n // 2 - 2


class TestBudget:
    def test_limit_needs_budget(self):
        with pytest.raises(ValueError):
            max_family_search(7, HALF, 3, MSS2)

    def test_incomplete(self):
        res = max_family_search(9, HALF, 3, SearchOptions(min_set_size=2, node_budget=1000))
        assert not res.complete
        assert res.nodes_explored <= 1000
        assert res.max_size >= 1 and is_r_closed(res.witnesses[0], 3).ok

    def test_raised_limit(self):
        res = max_family_search(7, HALF, 3, SearchOptions(min_set_size=2, exhaustive_limit=7))
        assert res.complete and res.max_size == 8

    def test_bad_options(self):
        for kw in ({"min_set_size": 0}, {"node_budget": 0}, {"parallel_width": 0}, {"max_r_checked": 1}):
            with pytest.raises(ValueError):
                SearchOptions(**kw)


class TestChain:
    def test_n6(self):
        res = chain_search(6, HALF, 3, MSS2)
        assert res.complete and res.max_size == 3
        assert len(set(res.witnesses[0].sizes())) == res.max_size

    def test_n2(self):
        assert chain_search(2, HALF, 3, MSS2).max_size == 1
        assert chain_search(2, HALF, 3).max_size == 2

    def test_n8(self):
        res = chain_search(8, HALF, 3, MSS2)
        assert res.complete and res.max_size == 4

    def test_n10_budgeted(self):
        res = chain_search(10, HALF, 3, SearchOptions(min_set_size=2, node_budget=10 ** 5))
        assert res.max_size >= 3


def test_family_from_witness():
    W = max_family_search(4, HALF, 3, MSS2).witnesses[0]
    assert family_from_witness(W) == W.as_lists()


def test_result_dict():
    d = max_family_search(4, HALF, 3, MSS2).to_dict()
    assert d["max_size"] == 4 and d["complete"] and d["classes"] == 1
    assert d["options"]["min_set_size"] == 2
