"""Fuzzy sets and possibility distributions over finite universes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Iterable, Sequence

from .errors import InvalidInput, UndefinedConditioning


def _check_degrees(values, what):
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or math.isnan(v):
            raise InvalidInput(f"{what}: {v!r} is not a number")
        if not 0.0 <= v <= 1.0:
            raise InvalidInput(f"{what}: {v!r} is outside [0, 1]")
        out.append(float(v))
    return tuple(out)


def _check_domain(domain):
    domain = tuple(domain)
    if not domain:
        raise InvalidInput("domain must be non-empty")
    if len(set(domain)) != len(domain):
        raise InvalidInput("domain elements must be distinct")
    return domain


@dataclass(frozen=True)
class FuzzySet:
    domain: tuple
    membership: tuple

    def __post_init__(self):
        object.__setattr__(self, "domain", _check_domain(self.domain))
        object.__setattr__(self, "membership", _check_degrees(self.membership, "membership"))
        if len(self.membership) != len(self.domain):
            raise InvalidInput("one membership degree per domain element is required")


def fuzzy_combine(a: FuzzySet, b: FuzzySet, op: str) -> FuzzySet:
    """``op`` is ``"min-intersection"`` or ``"max-union"``."""
    if a.domain != b.domain:
        raise InvalidInput("fuzzy sets must share a domain")
    fns = {"min-intersection": min, "max-union": max}
    if op not in fns:
        raise InvalidInput(f"unknown fuzzy operator {op!r}; expected one of {sorted(fns)}")
    f = fns[op]
    return FuzzySet(a.domain, tuple(f(x, y) for x, y in zip(a.membership, b.membership)))


def fuzzy_complement(a: FuzzySet) -> FuzzySet:
    return FuzzySet(a.domain, tuple(1.0 - x for x in a.membership))


@dataclass(frozen=True)
class PossibilityDistribution:
    universe: tuple
    pi: tuple

    def __post_init__(self):
        object.__setattr__(self, "universe", _check_domain(self.universe))
        object.__setattr__(self, "pi", _check_degrees(self.pi, "possibility"))
        if len(self.pi) != len(self.universe):
            raise InvalidInput("one possibility degree per world is required")

    @property
    def normalized(self) -> bool:
        return max(self.pi) == 1.0

    @classmethod
    def vacuous(cls, universe) -> "PossibilityDistribution":
        universe = tuple(universe)
        return cls(universe, (1.0,) * len(universe))

    def degree(self, w) -> float:
        try:
            return self.pi[self.universe.index(w)]
        except ValueError:
            raise InvalidInput(f"{w!r} is not in the universe") from None

    def as_dict(self) -> dict:
        return dict(zip(self.universe, self.pi))

    def check_subset(self, A: Iterable) -> frozenset:
        A = frozenset(A)
        bad = A - set(self.universe)
        if bad:
            raise InvalidInput(f"unknown worlds {sorted(map(str, bad))}")
        return A


def discount(pi: PossibilityDistribution, reliability: float) -> PossibilityDistribution:
    """Weaken a source trusted to degree ``reliability``: ``max(pi, 1 - reliability)``."""
    (lam,) = _check_degrees([reliability], "reliability")
    return PossibilityDistribution(pi.universe, tuple(max(p, 1.0 - lam) for p in pi.pi))


def possibility_of(pi: PossibilityDistribution, A: Iterable) -> float:
    A = pi.check_subset(A)
    return max((p for w, p in zip(pi.universe, pi.pi) if w in A), default=0.0)


def condition(pi: PossibilityDistribution, A: Iterable) -> PossibilityDistribution:
    """Qualitative (min-based) conditioning on ``A``.

    Worlds of ``A`` reaching ``Pi(A)`` are raised to 1, the rest of ``A``
    keeps its degree, and worlds outside ``A`` drop to 0.
    """
    A = pi.check_subset(A)
    top = possibility_of(pi, A)
    if top <= 0:
        raise UndefinedConditioning("conditioning on an impossible event")
    out = []
    for w, p in zip(pi.universe, pi.pi):
        if w not in A:
            out.append(0.0)
        elif p == top:
            out.append(1.0)
        else:
            out.append(p)
    return PossibilityDistribution(pi.universe, tuple(out))


FUSION_MODES: dict[str, Callable[[float, float], float]] = {
    "and-min": min,
    "and-product": lambda x, y: x * y,
    "or-max": max,
}


def register_fusion_mode(name: str, op: Callable[[float, float], float]) -> None:
    """Add a pointwise binary operator on [0, 1], applied as a left fold."""
    if name in FUSION_MODES:
        raise InvalidInput(f"fusion mode {name!r} already exists")
    FUSION_MODES[name] = op


def fuse(pis: Sequence[PossibilityDistribution], mode: str) -> PossibilityDistribution:
    pis = list(pis)
    if not pis:
        raise InvalidInput("fusion needs at least one source")
    if mode not in FUSION_MODES:
        raise InvalidInput(f"unknown fusion mode {mode!r}; expected one of {sorted(FUSION_MODES)}")
    universe = pis[0].universe
    if any(p.universe != universe for p in pis):
        raise InvalidInput("sources must share a universe")
    op = FUSION_MODES[mode]
    values = tuple(reduce(op, col) for col in zip(*(p.pi for p in pis)))
    return PossibilityDistribution(universe, values)
