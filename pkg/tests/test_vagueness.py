import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from infonet import BudgetExceeded, InvalidInput
from infonet.core import Sequent, check_channel, check_infomorphism, sequent_holds
from infonet.vagueness import (
    HeightScenario, Interval, Regimentation, agent_classification, build_regimentation_morphism,
    classify, combined_classification, intensional_logic, regimentation_channel,
    regimentation_grid, regimented_logics, sorites_check, verify_witness,
)

seeds = st.integers(0, 2**32 - 1)
HEIGHTS = {f"h{h}": h for h in range(160, 181)}
R1 = Regimentation(2, ((None, 165), (166, 179), (180, None)), "r1")
R2 = Regimentation(1, ((None, 164), (165, 179.5), (180, None)), "r2")
R3 = Regimentation(3, ((None, 165), (167, 178), (180, None)), "r3")


def brute_sorites(sc, family, n):
    """Derivable iff no assignment of n variables meets every premise and TALL(Xn)."""
    vs = sc.variables[:n]
    premises = [f"SHORT({vs[0]})"] + [f"SAMEHT({x},{y})" for x, y in zip(vs, vs[1:])]
    for r in family:
        for chain in itertools.product(sc.objects, repeat=n):
            tok = dict(zip(vs, chain))
            if all(classify(sc, r, tok, p) for p in premises) and classify(sc, r, tok, f"TALL({vs[-1]})"):
                return False
    return True


def test_interval_bounds():
    iv = Interval(165, 179, lo_closed=False)
    assert 166 in iv and 165 not in iv and 179 in iv
    with pytest.raises(InvalidInput):
        Interval(3, 2)


def test_regimentation_validation():
    with pytest.raises(InvalidInput):
        Regimentation(2, ((None, 165), (165, 179), (180, None)))  # overlap at 165
    with pytest.raises(InvalidInput):
        Regimentation(0.5, ((None, 165), (166, 179), (180, None)))  # gap above tolerance
    with pytest.raises(InvalidInput):
        Regimentation(-1, ((None, 165), (166, 179), (180, None)))
    # half-open intervals allow a zero tolerance
    Regimentation(0, ((None, 165), Interval(165, 180, lo_closed=False, hi_closed=False), (180, None)))


def test_classify_atoms_and_gaps():
    sc = HeightScenario({"ann": 165, "bob": 165.5, "cy": 180})
    assert classify(sc, R1, ("ann", "cy"), "SHORT(X1) & TALL(X2)")
    assert classify(sc, R1, ("cy", "ann"), "TALLER(X1,X2)")
    assert classify(sc, R1, ("ann", "bob"), "SAMEHT(X1,X2)")
    # 165.5 falls in the gap: no category applies
    assert not any(classify(sc, R1, ("bob",), f"{c}(X1)") for c in ("SHORT", "MEDIUM", "TALL"))
    with pytest.raises(InvalidInput):
        classify(sc, R1, ("zed",), "SHORT(X1)")


def test_sorites_threshold_on_height_scale():
    sc = HeightScenario(HEIGHTS, tuple(f"X{i}" for i in range(1, 21)))
    for n in range(2, 9):
        assert sorites_check(sc, [R1], n)["verdict"] == "derivable"
    r = sorites_check(sc, [R1], 20)
    assert r["verdict"] == "non-derivable" and r["threshold"] == 9
    w = r["witness"]
    assert w["verified"] and verify_witness(sc, R1, w["assignment"], 20)
    hs = w["heights"]
    assert all(abs(a - b) <= 2 for a, b in zip(hs, hs[1:])) and hs[0] <= 165 and hs[-1] >= 180


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_sorites_matches_exhaustive_search(n):
    sc = HeightScenario({f"o{h}": h for h in range(1, 9)}, tuple(f"X{i}" for i in range(1, 6)))
    fam = [Regimentation(2, ((None, 2), (3, 6), (7, None))), Regimentation(1, ((None, 3), (4, 5), (6, None)))]
    assert (sorites_check(sc, fam, n)["verdict"] == "derivable") == brute_sorites(sc, fam, n)


@settings(max_examples=40)
@given(seeds)
def test_sorites_matches_exhaustive_search_random(seed):
    rng = random.Random(seed)
    sc = HeightScenario({f"o{i}": rng.randint(1, 12) for i in range(rng.randint(2, 6))},
                        ("X1", "X2", "X3", "X4"))
    eps = rng.choice([1, 2, 3])
    s = rng.randint(1, 5)
    t = s + rng.randint(2, 6)
    fam = regimentation_grid(eps, [s], [t], step=min(1, eps))
    if not fam:
        return
    n = rng.randint(2, 4)
    assert (sorites_check(sc, fam, n)["verdict"] == "derivable") == brute_sorites(sc, fam, n)


def test_regimentation_morphisms_and_channel():
    sc = HeightScenario(HEIGHTS)
    fam = [R1, R2, R3]
    for r in fam:
        assert check_infomorphism(build_regimentation_morphism(sc, r, fam))[0]
    ok, report = check_channel(regimentation_channel(sc, fam))
    assert ok and len(report) == 3


def test_intensional_logic_is_below_each_regimented_logic():
    sc = HeightScenario(HEIGHTS)
    fam = [R1, R2, R3]
    logs = regimented_logics(sc, fam)
    L0 = intensional_logic(sc, fam)
    assert all(L0.constraints <= L.constraints for L in logs)
    assert any(L0.constraints < L.constraints for L in logs)
    assert Sequent({"SHORT(X1)", "TALL(X1)"}, set()) in L0.constraints
    host = combined_classification(sc, fam)
    for s in L0.constraints:
        assert sequent_holds(host, L0.normal_tokens, s.antecedents, s.consequents)


def test_regimented_logic_is_sound_for_its_agent():
    sc = HeightScenario({f"h{h}": h for h in range(160, 181, 2)})
    (L,) = regimented_logics(sc, [R1])
    A = agent_classification(sc, R1)
    for s in L.constraints:
        assert sequent_holds(A, A.tokens, s.antecedents, s.consequents)


def test_token_budget():
    sc = HeightScenario({f"o{i}": 100 + i for i in range(200)})
    with pytest.raises(BudgetExceeded):
        agent_classification(sc, R1)
