"""Information items and a brute-force audit of fusion operators.

An information item abstracts a source (mass function or possibility
distribution) over a finite set of worlds into its support (worlds not
ruled out), its core (the most plausible worlds) and a total ranking of
worlds. Fusion operators are audited by enumerating small input families
and testing eight rationality postulates, each made concrete below.
"""

from __future__ import annotations

import math
import random
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations, product
from typing import Callable, Optional, Sequence

from .errors import AuditIncomplete, InvalidInput, TotalConflict
from .evidence import Frame, MassFunction, belief_plausibility, dempster_combine, dubois_prade_combine
from .possibility import PossibilityDistribution, fuse

MAX_WORLDS = 5
CONTOUR_DIGITS = 9

POSTULATES = (
    "unanimity",
    "information monotonicity",
    "consistency enforcement",
    "optimism",
    "fairness",
    "insensitivity to vacuous information",
    "commutativity",
    "minimal commitment",
)

OPERATIONALIZATION = {
    "unanimity": "every world all inputs admit is admitted by the output, and every world all inputs "
                 "rule out is ruled out: intersection of supports <= output support <= union of supports",
    "information monotonicity": "for input tuples T, T' with S(T_i) a subset of S(T'_i) at every position "
                                "and T jointly consistent, S(f(T)) is a subset of S(f(T'))",
    "consistency enforcement": "inputs with non-empty supports give an output with non-empty support",
    "optimism": "for jointly consistent inputs the output support equals the intersection of supports",
    "fairness": "every input position changes the output for some tuple, and a non-empty output "
                "support meets every input support",
    "insensitivity to vacuous information": "inserting a vacuous source at any position leaves the item unchanged",
    "commutativity": "every permutation of the inputs gives the same item",
    "minimal commitment": "no comparator operator that passes the other seven postulates on the same family "
                          "gives, on some tuple, an output with the same core and a strictly larger support",
}

CONVENTIONS = {
    "contour": "plausibility of singletons for masses, the distribution itself for possibility",
    "core": "worlds attaining the maximal contour value (empty when the support is empty)",
    "ranking": "dense levels by descending contour; worlds off the support share the level after the last",
    "joint consistency": "masses: every choice of one focal set per input has a common world; "
                         "possibility: the supports share a world",
    "undefined output": "an operator that cannot produce a result (total conflict) yields an item with empty support",
    "arity": "binary-only operators are audited at n = 1, 2; n-ary ones at n = 1, 2, 3",
}


# ---------------------------------------------------------------- items

@dataclass(frozen=True)
class InformationItem:
    worlds: tuple
    support: frozenset
    core: frozenset
    ranks: tuple  # aligned with worlds; lower = more plausible

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "support", frozenset(self.support))
        object.__setattr__(self, "core", frozenset(self.core))
        object.__setattr__(self, "ranks", tuple(self.ranks))
        if not self.core <= self.support:
            raise InvalidInput("the core of an item must lie inside its support")
        if len(self.ranks) != len(self.worlds):
            raise InvalidInput("one rank per world is required")

    @property
    def consistent(self) -> bool:
        return bool(self.support)

    def rank(self, w) -> int:
        return self.ranks[self.worlds.index(w)]

    def to_dict(self) -> dict:
        order = {w: i for i, w in enumerate(self.worlds)}
        key = order.__getitem__
        return {
            "worlds": list(self.worlds),
            "support": sorted(self.support, key=key),
            "core": sorted(self.core, key=key),
            "ranks": dict(zip(self.worlds, self.ranks)),
            "consistent": self.consistent,
        }


def item_from_contour(worlds: Sequence, contour: Sequence[float]) -> InformationItem:
    values = [round(v, CONTOUR_DIGITS) for v in contour]
    support = {w for w, v in zip(worlds, values) if v > 0}
    if support:
        top = max(values)
        core = {w for w, v in zip(worlds, values) if v == top}
    else:
        core = set()
    levels = sorted({v for v in values if v > 0}, reverse=True)
    level_of = {v: i for i, v in enumerate(levels)}
    off = len(levels)
    ranks = tuple(level_of[v] if v > 0 else off for v in values)
    return InformationItem(tuple(worlds), frozenset(support), frozenset(core), ranks)


def item_from_mass(m: MassFunction) -> InformationItem:
    worlds = m.frame.elements
    return item_from_contour(worlds, [belief_plausibility(m, 1 << i)[1] for i in range(len(worlds))])


def item_from_possibility(pi: PossibilityDistribution) -> InformationItem:
    return item_from_contour(pi.universe, pi.pi)


def inconsistent_item(worlds: Sequence) -> InformationItem:
    return InformationItem(tuple(worlds), frozenset(), frozenset(), (0,) * len(worlds))


# ------------------------------------------------------------ source kinds

@dataclass(frozen=True)
class SourceKind:
    name: str
    item: Callable
    vacuous: Callable  # worlds -> source
    worlds: Callable  # source -> worlds
    describe: Callable  # source -> JSON-ready value
    jointly_consistent: Callable  # list of sources -> bool


def _focal_tuples_meet(focal_lists) -> bool:
    # depth-first over focal choices, carrying the running intersection
    def walk(i, acc):
        if i == len(focal_lists):
            return True
        return all(acc & x and walk(i + 1, acc & x) for x in focal_lists[i])
    return walk(0, -1)


def _describe_mass(m: MassFunction):
    return [[list(s), round(v, 12)] for s, v in m.as_sets()]


MASS = SourceKind(
    "mass", item_from_mass,
    lambda worlds: MassFunction.vacuous(Frame(tuple(worlds))),
    lambda m: m.frame.elements,
    _describe_mass,
    lambda ms: _focal_tuples_meet([list(m.focal) for m in ms]),
)

POSSIBILITY = SourceKind(
    "possibility", item_from_possibility,
    PossibilityDistribution.vacuous,
    lambda p: p.universe,
    lambda p: {str(w): v for w, v in zip(p.universe, p.pi)},
    lambda ps: any(all(p.pi[i] > 0 for p in ps) for i in range(len(ps[0].universe))),
)


@dataclass(frozen=True)
class FusionOperator:
    """A named fusion rule over one kind of source.

    ``combine`` takes a non-empty list of sources and returns a source, or
    ``None`` when the result is undefined. ``binary_only`` operators are
    never called with more than two sources.
    """

    name: str
    kind: SourceKind
    combine: Callable
    binary_only: bool = False

    @property
    def max_arity(self) -> int:
        return 2 if self.binary_only else 3

    def evaluate(self, sources: Sequence) -> InformationItem:
        sources = list(sources)
        if not sources:
            raise InvalidInput("fusion needs at least one source")
        if self.binary_only and len(sources) > 2:
            raise InvalidInput(f"{self.name} is a binary operator")
        out = self.combine(sources)
        if out is None:
            return inconsistent_item(self.kind.worlds(sources[0]))
        if isinstance(out, InformationItem):
            return out
        return self.kind.item(out)


def _fold(step):
    def combine(sources):
        acc = sources[0]
        for s in sources[1:]:
            acc = step(acc, s)
            if acc is None:
                return None
        return acc
    return combine


def _dempster_step(a, b):
    try:
        return dempster_combine(a, b)
    except TotalConflict:
        return None


def _yager_step(m1: MassFunction, m2: MassFunction) -> MassFunction:
    acc: dict = defaultdict(list)
    for x, v1 in m1.focal.items():
        for y, v2 in m2.focal.items():
            acc[(x & y) or m1.frame.full].append(v1 * v2)
    return MassFunction(m1.frame, {k: math.fsum(v) for k, v in acc.items()})


def _disjunctive_step(m1: MassFunction, m2: MassFunction) -> MassFunction:
    acc: dict = defaultdict(list)
    for x, v1 in m1.focal.items():
        for y, v2 in m2.focal.items():
            acc[x | y].append(v1 * v2)
    return MassFunction(m1.frame, {k: math.fsum(v) for k, v in acc.items()})


def _binary(step):
    def combine(sources):
        return sources[0] if len(sources) == 1 else step(sources[0], sources[1])
    return combine


def _possibility_mode(mode):
    return lambda sources: fuse(sources, mode)


DUBOIS_PRADE = FusionOperator("dubois-prade", MASS, _binary(dubois_prade_combine), binary_only=True)
DEMPSTER = FusionOperator("dempster", MASS, _fold(_dempster_step))
YAGER = FusionOperator("yager", MASS, _fold(_yager_step))
DISJUNCTIVE = FusionOperator("disjunctive", MASS, _fold(_disjunctive_step))
POSSIBILITY_MIN = FusionOperator("and-min", POSSIBILITY, _possibility_mode("and-min"))
POSSIBILITY_PRODUCT = FusionOperator("and-product", POSSIBILITY, _possibility_mode("and-product"))
POSSIBILITY_MAX = FusionOperator("or-max", POSSIBILITY, _possibility_mode("or-max"))

BUILTIN_OPERATORS = {op.name: op for op in (
    DUBOIS_PRADE, DEMPSTER, YAGER, DISJUNCTIVE,
    POSSIBILITY_MIN, POSSIBILITY_PRODUCT, POSSIBILITY_MAX,
)}

COMPARATORS = {
    "mass": (DUBOIS_PRADE, YAGER, DISJUNCTIVE, DEMPSTER),
    "possibility": (POSSIBILITY_MIN, POSSIBILITY_PRODUCT, POSSIBILITY_MAX),
}


def table_operator(name: str, kind: SourceKind, entries, binary_only: bool = False) -> FusionOperator:
    """An operator given extensionally.

    ``entries`` is an iterable of ``(input sources, output)`` where the
    output is a source or ``None`` (undefined). Lookups outside the table
    raise :class:`AuditIncomplete`.
    """
    table = {}
    for inputs, output in entries:
        table[tuple(inputs)] = output

    def combine(sources):
        key = tuple(sources)
        if key not in table:
            raise AuditIncomplete(
                f"operator {name!r} has no entry for this input tuple",
                inputs=[kind.describe(s) for s in sources],
            )
        return table[key]

    return FusionOperator(name, kind, combine, binary_only=binary_only)


# ----------------------------------------------------------------- families

def mass_grid_family(worlds: Sequence, step: float = 0.25) -> list:
    """Every mass function whose focal masses are multiples of ``step``."""
    frame = Frame(tuple(worlds))
    units = round(1 / step)
    if not math.isclose(units * step, 1.0):
        raise InvalidInput("the grid step must divide 1")
    subsets = list(range(1, frame.full + 1))
    family = []
    # multisets of `units` unit-masses placed on non-empty subsets
    for combo in combinations_with_replacement(subsets, units):
        focal: dict = defaultdict(int)
        for s in combo:
            focal[s] += 1
        family.append(MassFunction(frame, {s: k / units for s, k in focal.items()}))
    return family


def possibility_grid_family(worlds: Sequence, levels: Sequence[float] = (0.0, 0.5, 1.0)) -> list:
    worlds = tuple(worlds)
    return [PossibilityDistribution(worlds, vals) for vals in product(levels, repeat=len(worlds))]


def random_mass_family(worlds: Sequence, size: int, seed: int, max_focal: int = 3) -> list:
    frame = Frame(tuple(worlds))
    rng = random.Random(seed)
    family = []
    for _ in range(size):
        k = rng.randint(1, max_focal)
        sets = [rng.randint(1, frame.full) for _ in range(k)]
        weights = [rng.random() + 1e-3 for _ in range(k)]
        total = sum(weights)
        focal: dict = defaultdict(float)
        for s, w in zip(sets, weights):
            focal[s] += w / total
        family.append(MassFunction(frame, dict(focal)))
    return family


# -------------------------------------------------------------------- audit

class _Run:
    """Evaluation cache for one operator over one family."""

    def __init__(self, op: FusionOperator, family: list, n: int, max_tuples: int, rng: random.Random):
        self.op = op
        self.family = family
        self.items = [op.kind.item(s) for s in family]
        self.n = n
        total = len(family) ** n
        if total <= max_tuples:
            self.tuples = list(product(range(len(family)), repeat=n))
            self.exhaustive = True
        else:
            self.tuples = sorted({tuple(rng.randrange(len(family)) for _ in range(n))
                                  for _ in range(max_tuples)})
            self.exhaustive = False
        self.cache: dict = {}
        self.joint: dict = {}

    def out(self, t: tuple) -> InformationItem:
        item = self.cache.get(t)
        if item is None:
            item = self.op.evaluate([self.family[i] for i in t])
            self.cache[t] = item
        return item

    def consistent(self, t: tuple) -> bool:
        flag = self.joint.get(t)
        if flag is None:
            flag = self.op.kind.jointly_consistent([self.family[i] for i in t])
            self.joint[t] = flag
        return flag

    def describe(self, t: tuple) -> list:
        return [self.op.kind.describe(self.family[i]) for i in t]


def _supports(run: _Run, t):
    return [run.items[i].support for i in t]


def _check_unanimity(run: _Run):
    for t in run.tuples:
        out = run.out(t)
        supports = _supports(run, t)
        if not frozenset.intersection(*supports) <= out.support:
            return {"inputs": run.describe(t), "output": out.to_dict(),
                    "reason": "output rules out a world every input admits"}
        if not out.support <= frozenset().union(*supports):
            return {"inputs": run.describe(t), "output": out.to_dict(),
                    "reason": "output admits a world every input rules out"}
    return None


def _check_monotonicity(run: _Run):
    # group tuples by their support tuple; compare groups ordered by inclusion
    union_out: dict = {}  # key (jointly consistent) -> union of output supports
    meet_out: dict = {}  # key -> intersection of output supports
    for t in run.tuples:
        key = tuple(_supports(run, t))
        s = run.out(t).support
        meet_out[key] = meet_out[key] & s if key in meet_out else s
        if run.consistent(t):
            union_out[key] = union_out.get(key, frozenset()) | s
    for k, low in union_out.items():
        for k2, high in meet_out.items():
            if low <= high or not all(a <= b for a, b in zip(k, k2)):
                continue
            # locate a concrete witness pair
            for t in run.tuples:
                if tuple(_supports(run, t)) != k:
                    continue
                for t2 in run.tuples:
                    if tuple(_supports(run, t2)) == k2 and not run.out(t).support <= run.out(t2).support:
                        return {"inputs": run.describe(t), "output": run.out(t).to_dict(),
                                "wider inputs": run.describe(t2), "wider output": run.out(t2).to_dict()}
    return None


def _check_consistency(run: _Run):
    for t in run.tuples:
        if all(_supports(run, t)) and not run.out(t).support:
            return {"inputs": run.describe(t), "output": run.out(t).to_dict()}
    return None


def _check_optimism(run: _Run):
    for t in run.tuples:
        common = frozenset.intersection(*_supports(run, t))
        if run.consistent(t) and run.out(t).support != common:
            return {"inputs": run.describe(t), "output": run.out(t).to_dict(),
                    "expected support": sorted(map(str, common))}
    return None


def _check_fairness(run: _Run):
    for t in run.tuples:
        out = run.out(t)
        if out.support and any(not (out.support & s) for s in _supports(run, t)):
            return {"inputs": run.describe(t), "output": out.to_dict(),
                    "reason": "output support ignores an input"}
    if run.n < 2 or len(run.family) < 2:
        return None
    for pos in range(run.n):
        groups: dict = defaultdict(set)
        for t in run.tuples:
            groups[t[:pos] + t[pos + 1:]].add(run.out(t))
        if all(len(g) == 1 for g in groups.values()):
            return {"position": pos, "reason": "this input position never affects the output"}
    return None


def _check_vacuous(run: _Run):
    if run.n < 2:
        return None
    worlds = run.op.kind.worlds(run.family[0])
    vac = run.op.kind.vacuous(worlds)
    seen = set()
    for t in run.tuples:
        for pos in range(run.n):
            rest = t[:pos] + t[pos + 1:]
            if (rest, pos) in seen:
                continue
            seen.add((rest, pos))
            srcs = [run.family[i] for i in rest]
            base = run.op.evaluate(srcs)
            with_vac = run.op.evaluate(srcs[:pos] + [vac] + srcs[pos:])
            if base != with_vac:
                return {"inputs": run.describe(rest), "vacuous position": pos,
                        "output": base.to_dict(), "with vacuous": with_vac.to_dict()}
    return None


def _check_commutativity(run: _Run):
    for t in run.tuples:
        out = run.out(t)
        for p in set(permutations(t)):
            if p == t:
                continue
            other = run.out(p)
            if other != out:
                return {"inputs": run.describe(t), "permuted": run.describe(p),
                        "output": out.to_dict(), "permuted output": other.to_dict()}
    return None


def _check_minimal_commitment(run: _Run, comparators: list):
    for g in comparators:
        if g.max_arity < run.n:
            continue
        for t in run.tuples:
            out = run.out(t)
            alt = g.evaluate([run.family[i] for i in t])
            if alt.core == out.core and out.support < alt.support:
                return {"inputs": run.describe(t), "output": out.to_dict(),
                        "comparator": g.name, "comparator output": alt.to_dict()}
    return None


_CHECKS = {
    "unanimity": _check_unanimity,
    "information monotonicity": _check_monotonicity,
    "consistency enforcement": _check_consistency,
    "optimism": _check_optimism,
    "fairness": _check_fairness,
    "insensitivity to vacuous information": _check_vacuous,
    "commutativity": _check_commutativity,
}


def _validate_family(op: FusionOperator, family: list) -> None:
    if not family:
        raise InvalidInput("an audited family must be non-empty")
    worlds = op.kind.worlds(family[0])
    if len(worlds) > MAX_WORLDS:
        raise InvalidInput(f"audits are limited to {MAX_WORLDS} worlds")
    for s in family:
        if op.kind.worlds(s) != worlds:
            raise InvalidInput("every source in a family must range over the same worlds")


def audit(op: FusionOperator, families: Sequence[Sequence], seed: int = 0,
          max_tuples: int = 50_000, comparators: Optional[Sequence[FusionOperator]] = None,
          check_minimal: bool = True, max_arity: Optional[int] = None) -> dict:
    """Test ``op`` against the postulates on each family; returns a report.

    A postulate passes iff it holds on every family and arity. The first
    counterexample found is reported. When a family is too large for
    exhaustive enumeration at some arity, ``max_tuples`` tuples are
    sampled with ``seed``.
    """
    families = [list(f) for f in families]
    for f in families:
        _validate_family(op, f)
    rng = random.Random(seed)
    top = op.max_arity if max_arity is None else min(max_arity, op.max_arity)
    verdicts = {name: {"passed": True, "counterexample": None} for name in POSTULATES}
    coverage = []
    if comparators is None:
        comparators = [g for g in COMPARATORS.get(op.kind.name, ()) if g.name != op.name]
    for fi, family in enumerate(families):
        qualified = []
        if check_minimal:
            for g in comparators:
                sub = audit(g, [family], seed=seed, max_tuples=max_tuples,
                            check_minimal=False, max_arity=top)
                if all(sub["postulates"][p]["passed"] for p in POSTULATES[:-1]):
                    qualified.append(g)
        for n in range(1, top + 1):
            run = _Run(op, family, n, max_tuples, rng)
            coverage.append({"family": fi, "worlds": len(op.kind.worlds(family[0])),
                             "size": len(family), "arity": n,
                             "tuples": len(run.tuples), "exhaustive": run.exhaustive})
            for name, check in _CHECKS.items():
                if not verdicts[name]["passed"]:
                    continue
                witness = check(run)
                if witness is not None:
                    witness = {"family": fi, "arity": n, **witness}
                    verdicts[name] = {"passed": False, "counterexample": witness}
            if check_minimal and verdicts["minimal commitment"]["passed"]:
                witness = _check_minimal_commitment(run, qualified)
                if witness is not None:
                    verdicts["minimal commitment"] = {
                        "passed": False, "counterexample": {"family": fi, "arity": n, **witness}}
        if check_minimal:
            coverage[-1]["comparators"] = [g.name for g in qualified]
    if not check_minimal:
        verdicts["minimal commitment"] = {"passed": True, "counterexample": None, "skipped": True}
    return {
        "operator": op.name,
        "kind": op.kind.name,
        "binary_only": op.binary_only,
        "arities": list(range(1, top + 1)),
        "seed": seed,
        "operationalization": OPERATIONALIZATION,
        "conventions": CONVENTIONS,
        "coverage": coverage,
        "postulates": verdicts,
        "all_passed": all(v["passed"] for v in verdicts.values()),
    }
