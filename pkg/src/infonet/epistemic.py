"""Epistemic model checking over Kripke models, probabilistic Kripke
models with partial subjective probabilities, probabilistic product
update, and sampled probabilistic validity.

Formulas come from :mod:`infonet.logic`; strings are parsed on entry.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Optional

from .errors import InvalidInput, MissingProbability, UndefinedUpdate
from .logic import (
    And, Atom, Common, Const, Formula, Iff, Implies, Know, Linear, Not, Or,
    TruthTable, agents_of, atoms_of, has_probability, is_propositional, parse,
)

TOL = 1e-9
MAX_VALIDITY_ATOMS = 12


def _pairs(rel, worlds, what) -> frozenset:
    out = frozenset((a, b) for a, b in rel)
    for a, b in out:
        if a not in worlds or b not in worlds:
            raise InvalidInput(f"{what} relates undeclared points ({a!r}, {b!r})")
    return out


def is_equivalence(rel: frozenset, points) -> bool:
    points = list(points)
    if any((p, p) not in rel for p in points):
        return False
    if any((b, a) not in rel for a, b in rel):
        return False
    succ: dict = {}
    for a, b in rel:
        succ.setdefault(a, set()).add(b)
    return all(c in succ.get(a, ()) for a, b in rel for c in succ.get(b, ()))


@dataclass(frozen=True)
class KripkeModel:
    worlds: tuple
    relations: Mapping  # agent -> set of (w, v)
    valuation: Mapping  # atom -> set of worlds where it is true
    designated: object = None
    s5: bool = False
    _succ: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        worlds = tuple(self.worlds)
        object.__setattr__(self, "worlds", worlds)
        if not worlds:
            raise InvalidInput("a Kripke model needs at least one world")
        if len(set(worlds)) != len(worlds):
            raise InvalidInput("world ids must be distinct")
        ws = set(worlds)
        rels = {str(i): _pairs(r, ws, f"relation of agent {i!r}") for i, r in dict(self.relations).items()}
        object.__setattr__(self, "relations", rels)
        val = {}
        for p, ext in dict(self.valuation).items():
            ext = frozenset(ext)
            if not ext <= ws:
                raise InvalidInput(f"valuation of {p!r} names undeclared worlds")
            val[str(p)] = ext
        object.__setattr__(self, "valuation", val)
        if self.designated is None:
            object.__setattr__(self, "designated", worlds[0])
        elif self.designated not in ws:
            raise InvalidInput(f"designated world {self.designated!r} is undeclared")
        if self.s5:
            bad = [i for i, r in rels.items() if not is_equivalence(r, worlds)]
            if bad:
                raise InvalidInput(f"relations of agents {bad} are not equivalence relations")
        succ = {i: {w: set() for w in worlds} for i in rels}
        for i, r in rels.items():
            for a, b in r:
                succ[i][a].add(b)
        object.__setattr__(self, "_succ", {i: {w: frozenset(s) for w, s in d.items()}
                                           for i, d in succ.items()})

    def __hash__(self):
        return hash((self.worlds, self.designated))

    @property
    def agents(self) -> tuple:
        return tuple(sorted(self.relations))

    @property
    def atoms(self) -> tuple:
        return tuple(sorted(self.valuation))

    def accessible(self, agent: str, w) -> frozenset:
        return self._succ[agent][w]

    def reachable(self, group: Iterable[str], w) -> frozenset:
        """Worlds reachable from ``w`` in zero or more steps of any group member."""
        seen = {w}
        frontier = [w]
        while frontier:
            u = frontier.pop()
            for i in group:
                for v in self._succ[i][u]:
                    if v not in seen:
                        seen.add(v)
                        frontier.append(v)
        return frozenset(seen)


@dataclass(frozen=True)
class ProbabilisticKripkeModel:
    kripke: KripkeModel
    mu: Mapping  # agent -> world -> {world: probability}; missing entries = undefined

    def __post_init__(self):
        ws = set(self.kripke.worlds)
        clean = {}
        for i, table in dict(self.mu).items():
            i = str(i)
            if i not in self.kripke.relations:
                raise InvalidInput(f"probabilities given for undeclared agent {i!r}")
            clean[i] = {}
            for w, dist in dict(table).items():
                if w not in ws:
                    raise InvalidInput(f"probabilities given at undeclared world {w!r}")
                clean[i][w] = _check_distribution(dist, ws, f"mu[{i}][{w}]")
        object.__setattr__(self, "mu", clean)

    def __hash__(self):
        return hash(self.kripke)

    def measure(self, agent: str, w) -> dict:
        table = self.mu.get(agent, {})
        if w not in table:
            raise MissingProbability(f"agent {agent!r} has no probability at world {w!r}",
                                     agent=agent, world=str(w))
        return table[w]


def _check_distribution(dist, points, what) -> dict:
    out = {}
    for v, p in dict(dist).items():
        if v not in points:
            raise InvalidInput(f"{what} names undeclared point {v!r}")
        p = float(p)
        if math.isnan(p) or p < -TOL or p > 1 + TOL:
            raise InvalidInput(f"{what}: {p!r} is outside [0, 1]")
        out[v] = p
    if abs(math.fsum(out.values()) - 1.0) > TOL:
        raise InvalidInput(f"{what} does not sum to 1")
    return out


# --------------------------------------------------------------- checking

class _Evaluator:
    def __init__(self, kripke: KripkeModel, prob: Optional[ProbabilisticKripkeModel] = None):
        self.k = kripke
        self.prob = prob
        self.memo: dict = {}

    def validate(self, f: Formula) -> None:
        unknown = atoms_of(f) - set(self.k.valuation)
        if unknown:
            raise InvalidInput(f"unknown atoms {sorted(unknown)}")
        bad = agents_of(f) - set(self.k.relations)
        if bad:
            raise InvalidInput(f"unknown agents {sorted(bad)}")

    def holds(self, w, f: Formula) -> bool:
        key = (w, f)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._holds(w, f)
            self.memo[key] = hit
        return hit

    def _holds(self, w, f: Formula) -> bool:
        if isinstance(f, Atom):
            return w in self.k.valuation[f.name]
        if isinstance(f, Const):
            return f.value
        if isinstance(f, Not):
            return not self.holds(w, f.sub)
        if isinstance(f, And):
            return self.holds(w, f.left) and self.holds(w, f.right)
        if isinstance(f, Or):
            return self.holds(w, f.left) or self.holds(w, f.right)
        if isinstance(f, Implies):
            return not self.holds(w, f.left) or self.holds(w, f.right)
        if isinstance(f, Iff):
            return self.holds(w, f.left) == self.holds(w, f.right)
        if isinstance(f, Know):
            return all(self.holds(v, f.sub) for v in self.k.accessible(f.agent, w))
        if isinstance(f, Common):
            return all(self.holds(v, f.sub) for v in self.k.reachable(f.group, w))
        if isinstance(f, Linear):
            if self.prob is None:
                raise InvalidInput("probability terms need a probabilistic Kripke model")
            total = math.fsum(t.coef * self.probability(w, t.agent, t.sub) for t in f.terms)
            return total >= f.bound - TOL
        raise InvalidInput(f"unsupported formula node {type(f).__name__}")

    def probability(self, w, agent: str, f: Formula) -> float:
        dist = self.prob.measure(agent, w)
        return math.fsum(p for v, p in dist.items() if self.holds(v, f))


def model_check(M: KripkeModel, w, phi) -> bool:
    """Truth of a formula without probability terms at world ``w``."""
    phi = parse(phi)
    if has_probability(phi):
        raise InvalidInput("use prob_model_check for formulas with probability terms")
    if w not in set(M.worlds):
        raise InvalidInput(f"undeclared world {w!r}")
    ev = _Evaluator(M)
    ev.validate(phi)
    return ev.holds(w, phi)


def extension(M, phi) -> frozenset:
    """Worlds where ``phi`` holds; ``M`` may be plain or probabilistic."""
    phi = parse(phi)
    ev = _Evaluator(M.kripke, M) if isinstance(M, ProbabilisticKripkeModel) else _Evaluator(M)
    ev.validate(phi)
    return frozenset(w for w in ev.k.worlds if ev.holds(w, phi))


def prob_model_check(M: ProbabilisticKripkeModel, w, phi) -> bool:
    phi = parse(phi)
    if w not in set(M.kripke.worlds):
        raise InvalidInput(f"undeclared world {w!r}")
    ev = _Evaluator(M.kripke, M)
    ev.validate(phi)
    return ev.holds(w, phi)


def probability_of(M: ProbabilisticKripkeModel, w, agent: str, phi) -> float:
    """``P_agent(phi)`` as seen from world ``w``."""
    phi = parse(phi)
    ev = _Evaluator(M.kripke, M)
    ev.validate(phi)
    if agent not in M.kripke.relations:
        raise InvalidInput(f"unknown agent {agent!r}")
    return ev.probability(w, agent, phi)


# ----------------------------------------------------------------- update

@dataclass(frozen=True)
class UpdateModel:
    """Events with per-agent relations, mutually exclusive preconditions,
    occurrence probabilities ``pre[k][e]`` (event ``e`` given the k-th
    precondition) and observation probabilities ``mu[i][e]``."""

    events: tuple
    relations: Mapping
    preconditions: tuple
    pre: tuple  # aligned with preconditions: {event: probability}
    mu: Mapping  # agent -> event -> {event: probability}
    designated: object = None

    def __post_init__(self):
        events = tuple(self.events)
        object.__setattr__(self, "events", events)
        if not events or len(set(events)) != len(events):
            raise InvalidInput("an update model needs distinct events")
        es = set(events)
        object.__setattr__(self, "relations", {str(i): _pairs(r, es, f"event relation of {i!r}")
                                               for i, r in dict(self.relations).items()})
        phis = tuple(parse(p) for p in self.preconditions)
        object.__setattr__(self, "preconditions", phis)
        if not phis:
            raise InvalidInput("an update model needs at least one precondition")
        if len(self.pre) != len(phis):
            raise InvalidInput("one occurrence distribution per precondition is required")
        object.__setattr__(self, "pre", tuple(_check_distribution(d, es, f"pre[{k}]")
                                              for k, d in enumerate(self.pre)))
        mu = {}
        for i, table in dict(self.mu).items():
            mu[str(i)] = {e: _check_distribution(d, es, f"mu[{i}][{e}]") for e, d in dict(table).items()}
            if not set(mu[str(i)]) <= es:
                raise InvalidInput(f"observation probabilities of {i!r} name undeclared events")
        object.__setattr__(self, "mu", mu)
        if self.designated is None:
            object.__setattr__(self, "designated", events[0])
        elif self.designated not in es:
            raise InvalidInput(f"designated event {self.designated!r} is undeclared")
        props = [p for p in phis if is_propositional(p)]
        if len(props) == len(phis):
            table = TruthTable(sorted(frozenset().union(*(atoms_of(p) for p in phis))))
            for a in range(len(phis)):
                for b in range(a + 1, len(phis)):
                    if table.consistent([phis[a], phis[b]]):
                        raise InvalidInput(f"preconditions {phis[a]} and {phis[b]} are not mutually exclusive")

    def __hash__(self):
        return hash((self.events, self.preconditions))


def product_update(M: ProbabilisticKripkeModel, E: UpdateModel, strict: bool = False) -> ProbabilisticKripkeModel:
    """Update ``M`` by the event model ``E``.

    A pair ``(w, e)`` survives when the precondition true at ``w`` gives
    ``e`` positive occurrence probability. The new probability of agent
    ``i`` at ``(w, e)`` is prior x occurrence x observation, normalized over
    survivors. Where that normalizer is zero (or either factor is
    undefined) the new probability is left undefined; at the designated
    pair, or anywhere with ``strict=True``, a zero normalizer is an error.
    """
    k = M.kripke
    missing = set(k.relations) - set(E.relations)
    if missing:
        raise InvalidInput(f"update model lacks relations for agents {sorted(missing)}")
    ev = _Evaluator(k, M)
    for phi in E.preconditions:
        ev.validate(phi)
    occ: dict = {}
    for w in k.worlds:
        true_pre = [n for n, phi in enumerate(E.preconditions) if ev.holds(w, phi)]
        if len(true_pre) > 1:
            raise InvalidInput(f"preconditions are not mutually exclusive at world {w!r}")
        occ[w] = E.pre[true_pre[0]] if true_pre else {}
    survivors = [(w, e) for w in k.worlds for e in E.events if occ[w].get(e, 0.0) > 0]
    target = (k.designated, E.designated)
    if target not in set(survivors):
        raise UndefinedUpdate("the designated world does not survive the update",
                              world=str(k.designated), event=str(E.designated))
    alive = set(survivors)
    relations = {
        i: {(a, b) for a in survivors for b in survivors
            if (a[0], b[0]) in k.relations[i] and (a[1], b[1]) in E.relations[i]}
        for i in k.relations
    }
    valuation = {p: {s for s in survivors if s[0] in ext} for p, ext in k.valuation.items()}
    mu: dict = {}
    for i in k.relations:
        prior = M.mu.get(i, {})
        observe = E.mu.get(i, {})
        mu[i] = {}
        for s in survivors:
            w, e = s
            if w not in prior or e not in observe:
                continue
            weights = {}
            for w2, pw in prior[w].items():
                for e2, pe in observe[e].items():
                    if (w2, e2) in alive:
                        weights[(w2, e2)] = pw * occ[w2].get(e2, 0.0) * pe
            norm = math.fsum(weights.values())
            if norm <= 0:
                if strict or s == target:
                    raise UndefinedUpdate(f"agent {i!r} has zero normalizer at {s!r}",
                                          agent=i, world=str(w), event=str(e))
                continue
            mu[i][s] = {t: v / norm for t, v in weights.items()}
    s5 = k.s5 and all(is_equivalence(E.relations[i], E.events) for i in k.relations)
    updated = KripkeModel(tuple(survivors), relations, valuation, target, s5=s5)
    return ProbabilisticKripkeModel(updated, mu)


# --------------------------------------------------------------- validity

def probabilistic_validity(premises, conclusion, samples: int, seed: int) -> dict:
    """Compare classical entailment with a sampled probabilistic check.

    Each sample is a probability function over valuations: a random
    non-empty set of models of the premises gets random (flat Dirichlet)
    weights, so every premise has probability 1. A sample with the
    conclusion below 1 refutes probabilistic validity.
    """
    premises = [parse(p) for p in premises]
    conclusion = parse(conclusion)
    for f in premises + [conclusion]:
        if not is_propositional(f):
            raise InvalidInput(f"probabilistic validity is for propositional formulas; got {f}")
    if not isinstance(samples, int) or samples < 1:
        raise InvalidInput("samples must be a positive integer")
    atoms = sorted(frozenset().union(*(atoms_of(f) for f in premises + [conclusion])))
    if len(atoms) > MAX_VALIDITY_ATOMS:
        raise InvalidInput(f"{len(atoms)} atoms exceed the limit of {MAX_VALIDITY_ATOMS}",
                           atoms=len(atoms), budget=MAX_VALIDITY_ATOMS)
    table = TruthTable(atoms)
    model_mask = table.mask_all(premises)
    rows = table.rows_of(model_mask)
    phi_mask = table.mask(conclusion)
    classical = model_mask & ~phi_mask == 0
    rng = random.Random(seed)
    counterexample = None
    refuted = 0
    if rows:
        for _ in range(samples):
            chosen = [r for r in rows if rng.random() < 0.5] or [rng.choice(rows)]
            weights = [rng.expovariate(1.0) for _ in chosen]
            total = math.fsum(weights)
            dist = {r: w / total for r, w in zip(chosen, weights)}
            p_phi = math.fsum(p for r, p in dist.items() if phi_mask >> r & 1)
            if p_phi < 1.0 - TOL:
                refuted += 1
                if counterexample is None:
                    counterexample = {
                        "distribution": [
                            {"true_atoms": sorted(table.valuation(r)), "probability": p}
                            for r, p in sorted(dist.items())
                        ],
                        "conclusion_probability": p_phi,
                    }
    sampled = refuted == 0
    return {
        "atoms": atoms,
        "classical_entailment": classical,
        "probabilistically_valid": sampled,
        "agree": classical == sampled,
        "samples": samples,
        "seed": seed,
        "premise_models": len(rows),
        "refuting_samples": refuted,
        "counterexample": counterexample,
    }
