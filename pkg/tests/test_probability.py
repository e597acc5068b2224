import itertools
import math

import pytest
from hypothesis import given, strategies as st

from infonet import InvalidInput, UndefinedConditioning
from infonet.probability import (
    BayesNet, DiscreteChannel, DiscreteDistribution, bayes_posterior, bn_joint,
    channel_output, channel_posterior, entropy,
)

weights = st.lists(st.floats(0.01, 10), min_size=1, max_size=6)


def test_rare_condition_posterior():
    prior = DiscreteDistribution(("disease", "healthy"), (0.01, 0.99))
    post = bayes_posterior(prior, (0.9, 0.1))
    assert post.probs[0] == pytest.approx(0.009 / 0.108, abs=1e-12)
    assert post.probs[1] == pytest.approx(0.099 / 0.108, abs=1e-12)


def test_posterior_undefined_when_evidence_impossible():
    prior = DiscreteDistribution(("a", "b"), (0.5, 0.5))
    with pytest.raises(UndefinedConditioning):
        bayes_posterior(prior, (0.0, 0.0))


def test_distribution_must_sum_to_one():
    with pytest.raises(InvalidInput):
        DiscreteDistribution(("a", "b"), (0.5, 0.6))


@given(weights, st.data())
def test_posterior_is_normalised_product(ws, data):
    prior = DiscreteDistribution.from_weights(range(len(ws)), ws)
    lik = data.draw(st.lists(st.floats(0.01, 1), min_size=len(ws), max_size=len(ws)))
    post = bayes_posterior(prior, lik)
    z = sum(p * l for p, l in zip(prior.probs, lik))
    for p, l, q in zip(prior.probs, lik, post.probs):
        assert q == pytest.approx(p * l / z, rel=1e-9)
    assert math.fsum(post.probs) == pytest.approx(1.0, abs=1e-12)


def test_entropy_point_mass_is_exactly_zero():
    assert entropy(DiscreteDistribution(tuple("123456"), (1, 0, 0, 0, 0, 0))) == 0.0


def test_entropy_fair_die():
    assert abs(entropy(DiscreteDistribution.uniform(tuple("123456"))) - math.log2(6)) <= 1e-12


@given(weights)
def test_entropy_bounded_by_log_of_support(ws):
    d = DiscreteDistribution.from_weights(range(len(ws)), ws)
    assert -1e-12 <= entropy(d) <= math.log2(len(ws)) + 1e-12


def sprinkler():
    return BayesNet(
        nodes=("rain", "sprinkler", "wet"),
        domains={"rain": ("0", "1"), "sprinkler": ("0", "1"), "wet": ("0", "1")},
        parents={"rain": (), "sprinkler": ("rain",), "wet": ("rain", "sprinkler")},
        cpts={
            "rain": {"": (0.8, 0.2)},
            "sprinkler": {"0": (0.6, 0.4), "1": (0.99, 0.01)},
            "wet": {"0,0": (1.0, 0.0), "0,1": (0.1, 0.9), "1,0": (0.2, 0.8), "1,1": (0.01, 0.99)},
        },
    )


def test_bn_joint_is_product_of_local_factors():
    net = sprinkler()
    assert bn_joint(net, {"rain": "1", "sprinkler": "0", "wet": "1"}) == pytest.approx(0.2 * 0.99 * 0.8)


def test_bn_joint_sums_to_one():
    net = sprinkler()
    assert math.fsum(bn_joint(net, a) for a in net.assignments()) == pytest.approx(1.0, abs=1e-12)


def test_bn_rejects_cycles():
    with pytest.raises(InvalidInput):
        BayesNet(("a", "b"), {"a": ("0", "1"), "b": ("0", "1")}, {"a": ("b",), "b": ("a",)},
                 {"a": {"0": (1, 0), "1": (1, 0)}, "b": {"0": (1, 0), "1": (1, 0)}})


def test_obstructed_dice_channel():
    ch = DiscreteChannel.binary_symmetric(0.1)
    out = channel_output(ch, DiscreteDistribution(("0", "1"), (1.0, 0.0)))
    assert out.probs == pytest.approx((0.9, 0.1), abs=1e-12)
    post = channel_posterior(ch, DiscreteDistribution.uniform(("0", "1")), "0")
    assert post.probs == pytest.approx((0.9, 0.1), abs=1e-12)


@given(weights, st.integers(1, 4), st.data())
def test_channel_output_matches_brute_force(ws, n_out, data):
    d = DiscreteDistribution.from_weights(range(len(ws)), ws)
    rows = [data.draw(st.lists(st.floats(0.01, 1), min_size=n_out, max_size=n_out)) for _ in ws]
    rows = [[v / sum(r) for v in r] for r in rows]
    ch = DiscreteChannel(tuple(range(len(ws))), tuple(range(n_out)), rows)
    out = channel_output(ch, d)
    for y in range(n_out):
        assert out.probs[y] == pytest.approx(sum(d.probs[x] * rows[x][y] for x in range(len(ws))), abs=1e-12)
    # Bayes through the channel agrees with the joint table
    y = data.draw(st.integers(0, n_out - 1))
    post = channel_posterior(ch, d, y)
    joint = {(x, yy): d.probs[x] * rows[x][yy] for x, yy in itertools.product(range(len(ws)), range(n_out))}
    for x in range(len(ws)):
        assert post.probs[x] == pytest.approx(joint[x, y] / out.probs[y], rel=1e-9)
