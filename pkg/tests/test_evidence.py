import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from _gen import nonempty_subsets, random_frame, random_mass
from infonet import InvalidInput, TotalConflict
from infonet.evidence import (
    Frame, MassFunction, MultivaluedMapping, belief_plausibility, bounds_from_mapping,
    conflict_mass, conflict_weight, dempster_combine, dubois_prade_combine,
)
from infonet.probability import DiscreteDistribution

ABC = Frame(("a", "b", "c"))


def as_setmap(m):
    return {frozenset(s): v for s, v in m.as_sets()}


def brute_dempster(m1, m2):
    """Orthogonal sum over explicit Python sets."""
    raw: dict = {}
    for (a, x), (b, y) in itertools.product(as_setmap(m1).items(), as_setmap(m2).items()):
        raw[a & b] = raw.get(a & b, 0.0) + x * y
    k = raw.pop(frozenset(), 0.0)
    return {s: v / (1 - k) for s, v in raw.items()}, k


def brute_dubois_prade(m1, m2):
    out: dict = {}
    for (a, x), (b, y) in itertools.product(as_setmap(m1).items(), as_setmap(m2).items()):
        s = a & b or a | b
        out[s] = out.get(s, 0.0) + x * y
    return out


def close(d1, d2, tol=1e-9):
    return all(abs(d1.get(k, 0.0) - d2.get(k, 0.0)) <= tol for k in set(d1) | set(d2))


seeds = st.integers(0, 2**32 - 1)


def zadeh():
    m1 = MassFunction.from_sets(ABC, [({"a"}, 0.99), ({"b"}, 0.01)])
    m2 = MassFunction.from_sets(ABC, [({"c"}, 0.99), ({"b"}, 0.01)])
    return m1, m2


def test_zadeh_pair_dempster_puts_everything_on_b():
    m1, m2 = zadeh()
    m = dempster_combine(m1, m2)
    assert as_setmap(m) == pytest.approx({frozenset("b"): 1.0})
    assert conflict_mass(m1, m2) == pytest.approx(0.9999, abs=1e-12)
    assert conflict_weight(m1, m2) == pytest.approx(-math.log(1e-4), abs=1e-9)


def test_zadeh_pair_dubois_prade_keeps_disagreement():
    got = as_setmap(dubois_prade_combine(*zadeh()))
    want = {frozenset("b"): 0.0001, frozenset("ab"): 0.0099, frozenset("ac"): 0.9801, frozenset("bc"): 0.0099}
    assert close(got, want, 1e-12)


def test_total_conflict_is_undefined():
    f = Frame(("a", "b"))
    m1 = MassFunction.from_sets(f, [({"a"}, 1.0)])
    m2 = MassFunction.from_sets(f, [({"b"}, 1.0)])
    with pytest.raises(TotalConflict):
        dempster_combine(m1, m2)
    assert conflict_weight(m1, m2) == math.inf


def test_belief_example():
    f = Frame(("a", "b"))
    m = MassFunction.from_sets(f, [({"a"}, 0.6), ({"a", "b"}, 0.4)])
    assert belief_plausibility(m, ["a"]) == pytest.approx((0.6, 1.0, 0.4))
    assert belief_plausibility(m, ["b"]) == pytest.approx((0.0, 0.4, 0.4))
    assert belief_plausibility(m, []) == (0.0, 0.0, 0.0)


def test_invalid_masses_rejected():
    with pytest.raises(InvalidInput):
        MassFunction.from_sets(ABC, [({"a"}, 0.5)])
    with pytest.raises(InvalidInput):
        MassFunction.from_sets(ABC, [(set(), 0.5), ({"a"}, 0.5)])
    with pytest.raises(InvalidInput):
        MassFunction.from_sets(ABC, [({"z"}, 1.0)])


@given(seeds)
def test_bounds_match_subset_sums(seed):
    rng = random.Random(seed)
    frame = random_frame(rng)
    m = random_mass(rng, frame)
    sets = as_setmap(m)
    for A in [frozenset()] + list(nonempty_subsets(frame.elements)):
        bel = sum(v for s, v in sets.items() if s <= A)
        pl = sum(v for s, v in sets.items() if s & A)
        got = belief_plausibility(m, A)
        assert got[0] == pytest.approx(bel, abs=1e-9) and got[1] == pytest.approx(pl, abs=1e-9)
        assert got[2] == pytest.approx(pl - bel, abs=1e-9)


@given(seeds)
def test_dempster_matches_brute_force(seed):
    rng = random.Random(seed)
    frame = random_frame(rng, 4)
    m1, m2 = random_mass(rng, frame), random_mass(rng, frame)
    want, k = brute_dempster(m1, m2)
    assert conflict_mass(m1, m2) == pytest.approx(k, abs=1e-12)
    if k >= 1 - 1e-12:
        with pytest.raises(TotalConflict):
            dempster_combine(m1, m2)
    else:
        assert close(as_setmap(dempster_combine(m1, m2)), want)
        assert conflict_weight(m1, m2) == pytest.approx(-math.log(1 - k), abs=1e-9)


@given(seeds)
def test_dubois_prade_matches_brute_force(seed):
    rng = random.Random(seed)
    frame = random_frame(rng, 4)
    m1, m2 = random_mass(rng, frame), random_mass(rng, frame)
    got = dubois_prade_combine(m1, m2)
    assert close(as_setmap(got), brute_dubois_prade(m1, m2))
    assert math.fsum(got.focal.values()) == pytest.approx(1.0, abs=1e-12)


@given(seeds)
def test_vacuous_is_identity(seed):
    rng = random.Random(seed)
    frame = random_frame(rng)
    m = random_mass(rng, frame)
    v = MassFunction.vacuous(frame)
    assert dempster_combine(m, v).focal == pytest.approx(m.focal)
    assert dubois_prade_combine(v, m).focal == pytest.approx(m.focal)


@settings(max_examples=50)
@given(seeds)
def test_mapping_bounds_equal_induced_belief(seed):
    rng = random.Random(seed)
    frame = Frame(("x", "y", "z"))
    thetas = ("t1", "t2", "t3", "t4")
    src = DiscreteDistribution.from_weights(thetas, [rng.random() + 0.01 for _ in thetas])
    subsets = list(nonempty_subsets(frame.elements))
    mm = MultivaluedMapping(src, frame, {t: rng.choice(subsets) for t in thetas})
    m = mm.induced_mass()
    for A in subsets:
        low, up = bounds_from_mapping(mm, A)
        bel, pl, _ = belief_plausibility(m, A)
        assert abs(low - bel) <= 1e-9 and abs(up - pl) <= 1e-9


def test_mapping_must_be_total_and_nonempty():
    src = DiscreteDistribution.uniform(("t1", "t2"))
    with pytest.raises(InvalidInput):
        MultivaluedMapping(src, ABC, {"t1": {"a"}})
    with pytest.raises(InvalidInput):
        MultivaluedMapping(src, ABC, {"t1": {"a"}, "t2": set()})
