from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowcat.errors import CycleError
from flowcat.poset import (DeltaSet, FinitePoset, PosetMap, is_ascending_closure_operator,
                           is_descending_closure_operator, linear_extension, order_complex,
                           transitive_closure)

DIAMOND = [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]


def warshall(elements, relation):
    # reference reflexive-transitive closure as a set of pairs
    rel = {(x, x) for x in elements} | set(relation)
    for k in elements:
        for i in elements:
            for j in elements:
                if (i, k) in rel and (k, j) in rel:
                    rel.add((i, j))
    return rel


def all_linear_extensions(p):
    out = []
    for perm in permutations(p.elements):
        pos = {x: i for i, x in enumerate(perm)}
        if all(pos[x] <= pos[y] for x, y in p.relation_pairs()):
            out.append(list(perm))
    return out


def test_chain_closure_and_covers():
    p = transitive_closure("abc", [("a", "b"), ("b", "c")])
    assert p.leq("a", "c") and not p.leq("c", "a")
    assert p.cover_pairs() == [("a", "b"), ("b", "c")]


def test_empty_relation_is_discrete():
    p = transitive_closure("ab", [])
    assert p.relation_count() == 2
    assert p.cover_pairs() == []


def test_two_cycle_raises_with_cycle():
    with pytest.raises(CycleError) as info:
        transitive_closure("ab", [("a", "b"), ("b", "a")])
    assert sorted(info.value.cycle) == ["a", "b"]


def test_linear_extensions():
    assert linear_extension(transitive_closure("abc", [("a", "b"), ("b", "c")])) == list("abc")
    assert linear_extension(transitive_closure("xy", [])) == ["x", "y"]
    diamond = transitive_closure("abcd", DIAMOND)
    exts = all_linear_extensions(diamond)
    assert len(exts) == 2
    assert linear_extension(diamond) == min(exts) == list("abcd")


def test_from_leq_matches_closure():
    nums = range(1, 13)
    p = FinitePoset.from_leq(nums, lambda a, b: b % a == 0)
    q = transitive_closure(nums, [(a, b) for a in nums for b in nums if b % a == 0])
    assert set(p.relation_pairs()) == set(q.relation_pairs())
    assert p.check_axioms() == []


def test_check_axioms_flags_non_transitive():
    # a <= b, b <= c without a <= c
    bad = FinitePoset("abc", [0b001, 0b011, 0b110])
    assert any("transitive" in s for s in bad.check_axioms())


def test_subposet_keeps_order():
    p = transitive_closure("abcd", DIAMOND).subposet("abd")
    assert p.leq("a", "d") and p.cover_pairs() == [("a", "b"), ("b", "d")]


def test_closure_operators_on_chain():
    p = transitive_closure("ab", [("a", "b")])
    ident = PosetMap(p, p, {"a": "a", "b": "b"})
    assert is_descending_closure_operator(ident) and is_ascending_closure_operator(ident)
    to_min = PosetMap(p, p, {"a": "a", "b": "a"})
    assert is_descending_closure_operator(to_min)
    to_top = PosetMap(p, p, {"a": "b", "b": "b"})
    assert not is_descending_closure_operator(to_top)
    assert is_ascending_closure_operator(to_top)


def test_order_complex_counts():
    assert order_complex(transitive_closure("abc", [("a", "b"), ("b", "c")])).counts() == (3, 3, 1)
    assert order_complex(transitive_closure(range(5), [])).counts() == (5,)
    hexagon = transitive_closure(
        ["g0", "g1", "g2", "g01", "g02", "g12"],
        [("g0", "g01"), ("g0", "g02"), ("g1", "g01"), ("g1", "g12"), ("g2", "g02"), ("g2", "g12")])
    oc = order_complex(hexagon)
    assert oc.counts() == (6, 6)
    assert oc.check_identities()


def test_delta_identities_detect_bad_faces():
    ok = order_complex(transitive_closure("abc", [("a", "b"), ("b", "c")]))
    assert ok.check_identities()
    broken = DeltaSet(ok.simplices, [ok.faces[0], ok.faces[1], [tuple(reversed(ok.faces[2][0]))]])
    assert not broken.check_identities()


relations = st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=20)


@settings(max_examples=60, deadline=None)
@given(relations)
def test_closure_agrees_with_warshall(rel):
    rel = [(a, b) for a, b in rel if a < b]   # keep it acyclic
    p = transitive_closure(range(8), rel)
    assert set(p.relation_pairs()) == warshall(range(8), rel)
    ext = linear_extension(p)
    pos = {x: i for i, x in enumerate(ext)}
    assert all(pos[x] <= pos[y] for x, y in p.relation_pairs())
    # covers generate the same order
    assert set(transitive_closure(range(8), p.cover_pairs()).relation_pairs()) == \
        set(p.relation_pairs())
