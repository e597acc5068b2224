"""Discrete probability: Bayes over a partition, Bayesian-network joints,
noisy channels and Shannon entropy (bits)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

from .errors import InvalidInput, UndefinedConditioning

TOL = 1e-9
MAX_ARITY = 8


def _check_probs(probs, what="distribution"):
    for p in probs:
        if not isinstance(p, (int, float)) or isinstance(p, bool) or math.isnan(p):
            raise InvalidInput(f"{what}: {p!r} is not a number")
        if p < -TOL or p > 1 + TOL:
            raise InvalidInput(f"{what}: {p!r} is outside [0, 1]")


@dataclass(frozen=True)
class DiscreteDistribution:
    outcomes: tuple
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if not self.outcomes:
            raise InvalidInput("a distribution needs at least one outcome")
        if len(self.outcomes) != len(self.probs):
            raise InvalidInput("outcomes and probabilities differ in length")
        if len(set(self.outcomes)) != len(self.outcomes):
            raise InvalidInput("outcomes must be distinct")
        _check_probs(self.probs)
        total = math.fsum(self.probs)
        if abs(total - 1.0) > TOL:
            raise InvalidInput(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def from_weights(cls, outcomes, weights) -> "DiscreteDistribution":
        """Explicit renormalization; never done implicitly."""
        total = math.fsum(weights)
        if total <= 0:
            raise InvalidInput("weights must have a positive total")
        return cls(tuple(outcomes), tuple(w / total for w in weights))

    @classmethod
    def uniform(cls, outcomes) -> "DiscreteDistribution":
        outcomes = tuple(outcomes)
        return cls(outcomes, (1.0 / len(outcomes),) * len(outcomes))

    def __getitem__(self, outcome) -> float:
        try:
            return self.probs[self.outcomes.index(outcome)]
        except ValueError:
            raise InvalidInput(f"unknown outcome {outcome!r}") from None

    def as_dict(self) -> dict:
        return dict(zip(self.outcomes, self.probs))


def bayes_posterior(prior: DiscreteDistribution, likelihoods: Sequence[float]) -> DiscreteDistribution:
    """Posterior over the partition ``prior.outcomes`` after observing A.

    ``likelihoods[i]`` is ``P(A | E_i)``.
    """
    likelihoods = tuple(float(x) for x in likelihoods)
    if len(likelihoods) != len(prior.probs):
        raise InvalidInput("one likelihood per partition cell is required")
    _check_probs(likelihoods, "likelihoods")
    joint = [p * l for p, l in zip(prior.probs, likelihoods)]
    norm = math.fsum(joint)
    if norm <= 0:
        raise UndefinedConditioning("the evidence has probability zero under the prior")
    return DiscreteDistribution(prior.outcomes, tuple(j / norm for j in joint))


def entropy(d: DiscreteDistribution) -> float:
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    return -math.fsum(p * math.log2(p) for p in d.probs if p > 0) + 0.0


# ------------------------------------------------------------ Bayes networks

@dataclass(frozen=True)
class BayesNet:
    """Nodes in topological order; each node's parents come earlier.

    ``cpts[node]`` maps a parent-value key (parent values joined by ",",
    ``""`` for a root) to a distribution over ``domains[node]`` given as a
    list of probabilities in domain order.
    """

    nodes: tuple
    domains: Mapping
    parents: Mapping
    cpts: Mapping

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "domains", {n: tuple(map(str, d)) for n, d in dict(self.domains).items()})
        object.__setattr__(self, "parents", {n: tuple(ps) for n, ps in dict(self.parents).items()})
        object.__setattr__(self, "cpts", {n: {k: tuple(v) for k, v in dict(t).items()}
                                          for n, t in dict(self.cpts).items()})
        if len(set(self.nodes)) != len(self.nodes):
            raise InvalidInput("node names must be distinct")
        seen = set()
        for n in self.nodes:
            dom = self.domains.get(n)
            if not dom or len(dom) > MAX_ARITY or len(set(dom)) != len(dom):
                raise InvalidInput(f"node {n!r} needs 1..{MAX_ARITY} distinct values")
            ps = self.parents.get(n, ())
            for p in ps:
                if p not in seen:
                    raise InvalidInput(f"parent {p!r} of {n!r} must precede it (acyclic order)")
            table = self.cpts.get(n)
            if table is None:
                raise InvalidInput(f"node {n!r} has no CPT")
            expected = {",".join(vals) for vals in product(*(self.domains[p] for p in ps))}
            if set(table) != expected:
                raise InvalidInput(f"CPT of {n!r} must have exactly the rows {sorted(expected)}")
            for key, row in table.items():
                if len(row) != len(dom):
                    raise InvalidInput(f"CPT row {n!r}[{key!r}] has the wrong length")
                _check_probs(row, f"CPT row {n}[{key}]")
                if abs(math.fsum(row) - 1.0) > TOL:
                    raise InvalidInput(f"CPT row {n!r}[{key!r}] does not sum to 1")
            seen.add(n)
        extra = set(self.domains) | set(self.cpts) | set(self.parents)
        if not extra <= seen:
            raise InvalidInput(f"undeclared nodes {sorted(extra - seen)}")

    def assignments(self):
        for vals in product(*(self.domains[n] for n in self.nodes)):
            yield dict(zip(self.nodes, vals))


def bn_joint(net: BayesNet, assignment: Mapping) -> float:
    """Product over nodes of ``P(x_i | pa_i)``."""
    assignment = {k: str(v) for k, v in assignment.items()}
    missing = [n for n in net.nodes if n not in assignment]
    if missing:
        raise InvalidInput(f"assignment is missing nodes {missing}")
    extra = set(assignment) - set(net.nodes)
    if extra:
        raise InvalidInput(f"assignment names unknown nodes {sorted(extra)}")
    result = 1.0
    for n in net.nodes:
        v = assignment[n]
        if v not in net.domains[n]:
            raise InvalidInput(f"{v!r} is not a value of node {n!r}")
        key = ",".join(assignment[p] for p in net.parents.get(n, ()))
        result *= net.cpts[n][key][net.domains[n].index(v)]
    return result


# ----------------------------------------------------------------- channels

@dataclass(frozen=True)
class DiscreteChannel:
    inputs: tuple
    outputs: tuple
    matrix: tuple  # matrix[i][j] = p(outputs[j] | inputs[i])

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "matrix", tuple(tuple(float(x) for x in row) for row in self.matrix))
        if not self.inputs or not self.outputs:
            raise InvalidInput("channel alphabets must be non-empty")
        if len(set(self.inputs)) != len(self.inputs) or len(set(self.outputs)) != len(self.outputs):
            raise InvalidInput("channel alphabets must be distinct symbols")
        if len(self.matrix) != len(self.inputs):
            raise InvalidInput("one transition row per input symbol is required")
        for x, row in zip(self.inputs, self.matrix):
            if len(row) != len(self.outputs):
                raise InvalidInput(f"row for input {x!r} has the wrong length")
            _check_probs(row, f"transition row {x}")
            if abs(math.fsum(row) - 1.0) > TOL:
                raise InvalidInput(f"transition row for {x!r} does not sum to 1")

    @classmethod
    def binary_symmetric(cls, crossover: float, alphabet=("0", "1")) -> "DiscreteChannel":
        e = float(crossover)
        return cls(alphabet, alphabet, ((1 - e, e), (e, 1 - e)))


def _check_input(ch: DiscreteChannel, d: DiscreteDistribution):
    if d.outcomes != ch.inputs:
        raise InvalidInput("input distribution must range over the channel's input alphabet in order")


def channel_output(ch: DiscreteChannel, d: DiscreteDistribution) -> DiscreteDistribution:
    """``q(y) = sum_x p(x) p(y|x)``."""
    _check_input(ch, d)
    q = [math.fsum(p * row[j] for p, row in zip(d.probs, ch.matrix)) for j in range(len(ch.outputs))]
    return DiscreteDistribution(ch.outputs, tuple(q))


def channel_posterior(ch: DiscreteChannel, d: DiscreteDistribution, observed) -> DiscreteDistribution:
    """Distribution over inputs after seeing output ``observed``."""
    _check_input(ch, d)
    if observed not in ch.outputs:
        raise InvalidInput(f"{observed!r} is not an output symbol")
    j = ch.outputs.index(observed)
    return bayes_posterior(d, [row[j] for row in ch.matrix])
