"""Seeded random generators shared by the property and acceptance tests."""

import itertools
import random

from infonet.core import Classification
from infonet.epistemic import KripkeModel
from infonet.evidence import Frame, MassFunction
from infonet.possibility import PossibilityDistribution
from infonet.rough import InformationSystem


def nonempty_subsets(elements):
    elements = list(elements)
    for r in range(1, len(elements) + 1):
        yield from (frozenset(c) for c in itertools.combinations(elements, r))


def random_mass(rng: random.Random, frame: Frame, max_focal: int = 4) -> MassFunction:
    subsets = list(nonempty_subsets(frame.elements))
    k = rng.randint(1, min(max_focal, len(subsets)))
    chosen = rng.sample(subsets, k)
    ws = [rng.random() + 1e-3 for _ in chosen]
    z = sum(ws)
    return MassFunction.from_sets(frame, [(s, w / z) for s, w in zip(chosen, ws)])


def random_frame(rng: random.Random, max_size: int = 6) -> Frame:
    return Frame(tuple(f"w{i}" for i in range(rng.randint(1, max_size))))


def random_possibility(rng: random.Random, size: int) -> PossibilityDistribution:
    pi = [rng.choice([0.0, rng.random()]) for _ in range(size)]
    pi[rng.randrange(size)] = 1.0
    return PossibilityDistribution(tuple(f"w{i}" for i in range(size)), pi)


def random_information_system(rng: random.Random, max_objects=12, max_attributes=4) -> InformationSystem:
    n, k = rng.randint(1, max_objects), rng.randint(1, max_attributes)
    attrs = tuple(f"a{j}" for j in range(k))
    rows = {f"o{i}": {a: rng.randint(0, 2) for a in attrs} for i in range(n)}
    return InformationSystem.from_rows(rows, attrs)


def random_classification(rng: random.Random, max_tokens=5, max_types=4) -> Classification:
    tokens = [f"t{i}" for i in range(rng.randint(1, max_tokens))]
    types = [f"T{j}" for j in range(rng.randint(1, max_types))]
    pairs = {(a, t) for a in tokens for t in types if rng.random() < 0.5}
    return Classification(frozenset(tokens), frozenset(types), frozenset(pairs))


def random_partition(rng: random.Random, worlds):
    blocks: list = []
    for w in worlds:
        i = rng.randint(0, len(blocks))
        if i == len(blocks):
            blocks.append([w])
        else:
            blocks[i].append(w)
    return [(u, v) for b in blocks for u in b for v in b]


def random_s5(rng: random.Random, max_worlds=5, atoms=("p", "q", "r"), agents=("a", "b")) -> KripkeModel:
    worlds = tuple(f"w{i}" for i in range(rng.randint(1, max_worlds)))
    relations = {ag: random_partition(rng, worlds) for ag in agents}
    valuation = {p: [w for w in worlds if rng.random() < 0.5] for p in atoms}
    return KripkeModel(worlds, relations, valuation, designated=worlds[0], s5=True)


def random_formula(rng: random.Random, atoms, depth: int = 3) -> str:
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(list(atoms))
    op = rng.choice(["!", "&", "|", "->", "<->"])
    if op == "!":
        return f"!({random_formula(rng, atoms, depth - 1)})"
    return f"({random_formula(rng, atoms, depth - 1)} {op} {random_formula(rng, atoms, depth - 1)})"


def random_mu(rng: random.Random, model: KripkeModel, agents=None) -> dict:
    """Per agent and world, random positive weights on the accessible worlds."""
    mu = {}
    for ag in agents or model.agents:
        mu[ag] = {}
        for w in model.worlds:
            acc = sorted(model.accessible(ag, w))
            ws = [rng.random() + 0.05 for _ in acc]
            mu[ag][w] = {v: x / sum(ws) for v, x in zip(acc, ws)}
    return mu
