import itertools
import random

import pytest
from hypothesis import given, strategies as st

from _gen import random_information_system
from infonet import InvalidInput
from infonet.rough import InformationSystem, approximate, indiscernibility_classes, is_crisp

FOUR = InformationSystem.from_csv("object,a\n1,0\n2,0\n3,1\n4,1\n")
seeds = st.integers(0, 2**32 - 1)


def brute_approximation(S, B, X):
    """Lower/upper by pairwise indiscernibility, without building classes."""
    same = lambda x, y: all(S.values[x, b] == S.values[y, b] for b in B)
    lower = {x for x in S.universe if all(y in X for y in S.universe if same(x, y))}
    upper = {x for x in S.universe if any(y in X for y in S.universe if same(x, y))}
    return lower, upper


def test_four_object_example_is_rough():
    a = approximate(FOUR, ["a"], {"1", "3"})
    assert a.lower == frozenset()
    assert a.upper == a.boundary == frozenset({"1", "2", "3", "4"})


def test_four_object_crisp_concept():
    assert is_crisp(FOUR, ["a"], {"1", "2"})
    assert approximate(FOUR, ["a"], set()).upper == frozenset()


def test_classes_partition_universe():
    assert sorted(map(sorted, indiscernibility_classes(FOUR, ["a"]))) == [["1", "2"], ["3", "4"]]


def test_empty_attribute_set_rejected():
    with pytest.raises(InvalidInput):
        indiscernibility_classes(FOUR, [])


def test_constant_and_injective_attributes():
    S = InformationSystem.from_csv("object,k,id\n1,0,a\n2,0,b\n3,0,c\n")
    assert indiscernibility_classes(S, ["k"]) == [frozenset({"1", "2", "3"})]
    assert len(indiscernibility_classes(S, ["id"])) == 3


def test_unknown_ids_rejected():
    with pytest.raises(InvalidInput):
        approximate(FOUR, ["b"], {"1"})
    with pytest.raises(InvalidInput):
        approximate(FOUR, ["a"], {"9"})


def test_csv_needs_unique_objects():
    with pytest.raises(InvalidInput):
        InformationSystem.from_csv("object,a\n1,0\n1,1\n")


@given(seeds)
def test_approximation_matches_pairwise_oracle(seed):
    rng = random.Random(seed)
    S = random_information_system(rng)
    B = [a for a in S.attributes if rng.random() < 0.6] or [S.attributes[0]]
    X = {x for x in S.universe if rng.random() < 0.5}
    a = approximate(S, B, X)
    lower, upper = brute_approximation(S, B, X)
    assert a.lower == lower and a.upper == upper and a.boundary == upper - lower


@given(seeds)
def test_sandwich_duality_and_attribute_monotonicity(seed):
    rng = random.Random(seed)
    S = random_information_system(rng)
    U = frozenset(S.universe)
    X = frozenset(x for x in U if rng.random() < 0.5)
    attrs = list(S.attributes)
    for r in range(1, len(attrs) + 1):
        for B in itertools.combinations(attrs, r):
            a = approximate(S, B, X)
            assert a.lower <= X <= a.upper
            assert a.upper == U - approximate(S, B, U - X).lower
            if r < len(attrs):
                finer = approximate(S, B + (attrs[r],) if attrs[r] not in B else B, X)
                assert a.lower <= finer.lower and finer.upper <= a.upper
