"""Posets: closure, covering relation, operations, isomorphism, JSON, DOT."""

from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posetglue.errors import CycleError, ParseError, SizeLimit, UnknownElement
from posetglue.poset_core import (
    Poset,
    direct_sum,
    hasse,
    is_isomorphic,
    opposite,
    ordinal_sum,
    poset_from_generators,
    poset_from_json,
    poset_loads,
    poset_to_dot,
    poset_to_json,
    product,
)
from posetglue.rng import SplitMix64

from conftest import brute_closure


def random_generated(seed: int, n: int) -> Poset:
    rng = SplitMix64(seed)
    elements = [f"e{i}" for i in range(n)]
    pairs = [
        (elements[i], elements[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.randrange(3) == 0
    ]
    return poset_from_generators(elements, pairs)


class TestClosure:
    def test_matches_brute_warshall(self):
        for seed in range(40):
            rng = SplitMix64(seed)
            n = 2 + rng.randrange(5)
            elements = [f"e{i}" for i in range(n)]
            pairs = [
                (elements[i], elements[j])
                for i in range(n)
                for j in range(i + 1, n)
                if rng.randrange(3) == 0
            ]
            p = poset_from_generators(elements, pairs)
            assert p.leq == brute_closure(elements, pairs)

    def test_element_order_is_preserved(self):
        p = poset_from_generators(["b", "a", "c"], [("b", "c")])
        assert p.elements == ("b", "a", "c")

    def test_cycle_is_rejected_with_witness(self):
        with pytest.raises(CycleError) as info:
            poset_from_generators(["a", "b"], [("a", "b"), ("b", "a")])
        assert set(info.value.cycle) >= {"a", "b"}

    def test_unknown_element_in_pair(self):
        with pytest.raises((UnknownElement, ParseError)):
            poset_from_generators(["a"], [("a", "zz")])

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(min_value=1, max_value=6),
        picks=st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=12),
    )
    def test_axioms_hold(self, n, picks):
        elements = [f"e{i}" for i in range(n)]
        pairs = [
            (elements[min(i, j) % n], elements[max(i, j) % n])
            for i, j in picks
            if i % n != j % n
        ]
        p = poset_from_generators(elements, [(a, b) for a, b in pairs if a < b])
        for e in elements:
            assert p.le(e, e)
        for a, b in p.leq:
            assert not (a != b and p.le(b, a)), "antisymmetry"
            for c in elements:
                if p.le(b, c):
                    assert p.le(a, c), "transitivity"


class TestHasse:
    def test_matches_brute_reduction(self):
        for seed in range(30):
            p = random_generated(seed, 5)
            expected = frozenset(
                (a, b)
                for a, b in p.leq
                if a != b
                and not any(
                    c not in (a, b) and p.le(a, c) and p.le(c, b) for c in p.elements
                )
            )
            assert hasse(p).edges == expected

    def test_closure_of_hasse_recovers_order(self):
        for seed in range(20):
            p = random_generated(seed + 100, 6)
            assert brute_closure(p.elements, hasse(p).edges) == p.leq


class TestOperations:
    def disjoint_pair(self, seed):
        rng = SplitMix64(seed)

        def mk(prefix):
            names = [f"{prefix}{i}" for i in range(3)]
            return poset_from_generators(
                names,
                [
                    (names[i], names[j])
                    for i in range(3)
                    for j in range(i + 1, 3)
                    if rng.randrange(2)
                ],
            )

        return mk("p"), mk("q")

    def test_ordinal_sum_membership(self):
        for seed in range(10):
            p, q = self.disjoint_pair(seed)
            s = ordinal_sum(p, q)
            assert s.elements == p.elements + q.elements
            for a in s.elements:
                for b in s.elements:
                    if a in p.elements and b in p.elements:
                        assert s.le(a, b) == p.le(a, b)
                    elif a in q.elements and b in q.elements:
                        assert s.le(a, b) == q.le(a, b)
                    elif a in p.elements:
                        assert s.le(a, b)
                    else:
                        assert not s.le(a, b)

    def test_direct_sum_membership(self):
        for seed in range(10):
            p, q = self.disjoint_pair(seed)
            s = direct_sum(p, q)
            for a in s.elements:
                for b in s.elements:
                    if a in p.elements and b in p.elements:
                        assert s.le(a, b) == p.le(a, b)
                    elif a in q.elements and b in q.elements:
                        assert s.le(a, b) == q.le(a, b)
                    else:
                        assert not s.le(a, b)

    def test_sum_relabels_on_collision(self):
        p = poset_from_generators(["a"], [])
        s = ordinal_sum(p, p)
        assert set(s.elements) == {"L.a", "R.a"}
        assert s.le("L.a", "R.a") and not s.le("R.a", "L.a")

    def test_opposite_reverses(self):
        for seed in range(10):
            p = random_generated(seed, 4)
            o = opposite(p)
            assert set(o.elements) == set(p.elements)
            for a in p.elements:
                for b in p.elements:
                    assert o.le(a, b) == p.le(b, a)
            assert opposite(o).leq == p.leq

    def test_product_membership(self):
        p = poset_from_generators(["a", "b"], [("a", "b")])
        q = poset_from_generators(["u", "v"], [])
        pr = product(p, q)
        assert len(pr) == 4
        for a1 in p.elements:
            for b1 in q.elements:
                for a2 in p.elements:
                    for b2 in q.elements:
                        assert pr.le(f"({a1},{b1})", f"({a2},{b2})") == (
                            p.le(a1, a2) and q.le(b1, b2)
                        )


class TestIsomorphism:
    def brute_iso(self, p: Poset, q: Poset) -> bool:
        if len(p) != len(q):
            return False
        for perm in itertools.permutations(q.elements):
            m = dict(zip(p.elements, perm))
            if all((m[a], m[b]) in q.leq for a, b in p.leq) and len(p.leq) == len(q.leq):
                return True
        return False

    def test_matches_brute_force(self):
        posets = [random_generated(s, 4) for s in range(12)]
        relabeled = []
        for p in posets:
            names = {e: f"z{p.index(e)}" for e in p.elements}
            relabeled.append(
                Poset(
                    [names[e] for e in reversed(p.elements)],
                    {(names[a], names[b]) for a, b in p.leq},
                )
            )
        for p in posets:
            for q in relabeled:
                got = is_isomorphic(p, q)
                assert (got is not None) == self.brute_iso(p, q)
                if got is not None:
                    assert sorted(got) == sorted(p.elements)
                    for a in p.elements:
                        for b in p.elements:
                            assert p.le(a, b) == q.le(got[a], got[b])

    def test_size_limit(self):
        big = poset_from_generators([str(i) for i in range(13)], [])
        with pytest.raises(SizeLimit):
            is_isomorphic(big, big)

    def test_chain_vs_antichain(self):
        chain = poset_from_generators(["a", "b"], [("a", "b")])
        anti = poset_from_generators(["u", "v"], [])
        assert is_isomorphic(chain, anti) is None


class TestSerialization:
    def test_json_round_trip(self):
        for seed in range(10):
            p = random_generated(seed, 5)
            doc = poset_to_json(p)
            assert set(doc) == {"elements", "relations"}
            q = poset_from_json(doc)
            assert q.leq == p.leq and q.elements == p.elements
            assert poset_loads(json.dumps(doc)).leq == p.leq

    def test_json_relations_are_hasse_edges(self):
        chain = poset_from_generators(["a", "b", "c"], [("a", "b"), ("b", "c")])
        doc = poset_to_json(chain)
        assert sorted(map(tuple, doc["relations"])) == [("a", "b"), ("b", "c")]

    def test_bad_documents(self):
        for doc in [
            {},
            {"elements": "ab"},
            {"elements": ["a", "a"], "relations": []},
            {"elements": [1], "relations": []},
        ]:
            with pytest.raises(ParseError):
                poset_from_json(doc)
        with pytest.raises(UnknownElement):
            poset_from_json({"elements": ["a"], "relations": [["a", "b"]]})

    def test_dot_output(self):
        p = poset_from_generators(["a", "b", "c"], [("a", "b"), ("a", "c")])
        dot = poset_to_dot(p, "demo")
        assert dot.startswith('digraph "demo"')
        assert "rankdir=BT" in dot
        assert '"a" -> "b";' in dot and '"a" -> "c";' in dot
        assert "rank=same" in dot


class TestQueries:
    def test_up_down_height(self):
        p = poset_from_generators(
            ["a", "b", "c", "d"], [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]
        )
        assert p.up_set("a") == frozenset("abcd")
        assert p.down_set("d") == frozenset("abcd")
        assert p.up_set("b") == frozenset({"b", "d"})
        assert [p.height(e) for e in "abcd"] == [0, 1, 1, 2]

    def test_same_order_ignores_enumeration(self):
        p = poset_from_generators(["a", "b"], [("a", "b")])
        q = Poset(["b", "a"], {("a", "a"), ("b", "b"), ("a", "b")})
        assert p.same_order(q)
