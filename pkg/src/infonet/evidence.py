"""Dempster-Shafer evidence: mass functions over a frame, belief and
plausibility, Dempster and Dubois-Prade combination, conflict weight, and
lower/upper probabilities induced by a multivalued mapping.

Subsets of the frame are int bitsets: element ``i`` of ``Frame.elements``
is bit ``1 << i``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InvalidInput, TotalConflict
from .probability import DiscreteDistribution

TOL = 1e-9
MAX_FRAME = 20


@dataclass(frozen=True)
class Frame:
    elements: tuple

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            raise InvalidInput("a frame needs at least one element")
        if len(set(self.elements)) != len(self.elements):
            raise InvalidInput("frame elements must be distinct")
        if len(self.elements) > MAX_FRAME:
            raise InvalidInput(f"frames are limited to {MAX_FRAME} elements")

    @property
    def full(self) -> int:
        return (1 << len(self.elements)) - 1

    def encode(self, subset: Iterable) -> int:
        index = {e: i for i, e in enumerate(self.elements)}
        bits = 0
        for e in subset:
            if e not in index:
                raise InvalidInput(f"{e!r} is not in the frame {list(self.elements)}")
            bits |= 1 << index[e]
        return bits

    def decode(self, bits: int) -> tuple:
        return tuple(e for i, e in enumerate(self.elements) if bits >> i & 1)

    def check(self, bits: int) -> int:
        if not isinstance(bits, int) or bits < 0 or bits & ~self.full:
            raise InvalidInput(f"subset {bits!r} is not a subset of the frame")
        return bits


@dataclass(frozen=True)
class MassFunction:
    frame: Frame
    focal: Mapping  # bitset -> mass in (0, 1]

    def __post_init__(self):
        clean = {}
        for bits, v in dict(self.focal).items():
            self.frame.check(bits)
            v = float(v)
            if math.isnan(v) or v < -TOL or v > 1 + TOL:
                raise InvalidInput(f"mass {v!r} is outside [0, 1]")
            if v <= 0:
                continue
            if bits == 0:
                raise InvalidInput("the empty set cannot carry mass")
            clean[bits] = clean.get(bits, 0.0) + v
        total = math.fsum(clean.values())
        if abs(total - 1.0) > TOL:
            raise InvalidInput(f"masses sum to {total!r}, not 1")
        object.__setattr__(self, "focal", dict(sorted(clean.items())))

    def __hash__(self):
        return hash((self.frame, tuple(self.focal.items())))

    @classmethod
    def from_sets(cls, frame: Frame, assignments) -> "MassFunction":
        """``assignments`` is an iterable of (element collection, mass)."""
        if isinstance(assignments, Mapping):
            assignments = assignments.items()
        focal: dict = defaultdict(float)
        for subset, v in assignments:
            bits = frame.encode(subset)
            if bits == 0 and float(v) > 0:
                raise InvalidInput("the empty set cannot carry mass")
            focal[bits] += float(v)
        return cls(frame, dict(focal))

    @classmethod
    def vacuous(cls, frame: Frame) -> "MassFunction":
        return cls(frame, {frame.full: 1.0})

    def mass(self, bits: int) -> float:
        return self.focal.get(bits, 0.0)

    def as_sets(self) -> list:
        return [(self.frame.decode(b), v) for b, v in self.focal.items()]

    def close_to(self, other: "MassFunction", tol: float = TOL) -> bool:
        keys = set(self.focal) | set(other.focal)
        return self.frame == other.frame and all(
            abs(self.mass(k) - other.mass(k)) <= tol for k in keys)


def _subset_bits(m: MassFunction, A) -> int:
    if isinstance(A, int) and not isinstance(A, bool):
        return m.frame.check(A)
    return m.frame.encode(A)


def belief_plausibility(m: MassFunction, A) -> tuple[float, float, float]:
    """``(Bel(A), Pl(A), Pl(A) - Bel(A))``; ``A`` is a bitset or element list."""
    a = _subset_bits(m, A)
    bel = math.fsum(v for b, v in m.focal.items() if b & ~a == 0)
    pl = math.fsum(v for b, v in m.focal.items() if b & a)
    bel, pl = min(bel, 1.0), min(pl, 1.0)
    return bel, pl, pl - bel


def _same_frame(m1: MassFunction, m2: MassFunction) -> None:
    if m1.frame != m2.frame:
        raise InvalidInput("mass functions must share a frame")


def conflict_mass(m1: MassFunction, m2: MassFunction) -> float:
    """Mass of the conflicting focal pairs (``X & Y`` empty)."""
    _same_frame(m1, m2)
    return math.fsum(v1 * v2 for x, v1 in m1.focal.items()
                     for y, v2 in m2.focal.items() if not x & y)


def _agreement(m1: MassFunction, m2: MassFunction) -> float:
    return math.fsum(v1 * v2 for x, v1 in m1.focal.items()
                     for y, v2 in m2.focal.items() if x & y)


def dempster_combine(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Orthogonal sum; undefined when every focal pair conflicts."""
    _same_frame(m1, m2)
    acc: dict = defaultdict(list)
    conflicted = False
    for x, v1 in m1.focal.items():
        for y, v2 in m2.focal.items():
            if x & y:
                acc[x & y].append(v1 * v2)
            else:
                conflicted = True
    if not acc:
        raise TotalConflict("the orthogonal sum is undefined: all focal pairs conflict")
    # with no conflicting pair the normalizer is exactly 1; skipping it keeps identities exact
    norm = math.fsum(p for ps in acc.values() for p in ps) if conflicted else 1.0
    return MassFunction(m1.frame, {k: math.fsum(ps) / norm for k, ps in acc.items()})


def conflict_weight(m1: MassFunction, m2: MassFunction) -> float:
    """``-ln(N)`` with ``N`` the non-conflicting mass; ``inf`` on total conflict."""
    _same_frame(m1, m2)
    n = _agreement(m1, m2)
    if n <= 0:
        return math.inf
    return -math.log(n) + 0.0


def dubois_prade_combine(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Agreeing products go to the intersection, conflicting ones to the union."""
    _same_frame(m1, m2)
    acc: dict = defaultdict(list)
    for x, v1 in m1.focal.items():
        for y, v2 in m2.focal.items():
            acc[(x & y) or (x | y)].append(v1 * v2)
    return MassFunction(m1.frame, {k: math.fsum(ps) for k, ps in acc.items()})


# --------------------------------------------------------------- mappings

@dataclass(frozen=True)
class MultivaluedMapping:
    """Probability over a source space carried to a frame by set-valued ``gamma``."""

    source: DiscreteDistribution
    frame: Frame
    gamma: Mapping  # source outcome -> non-empty bitset

    def __post_init__(self):
        gamma = {}
        for theta in self.source.outcomes:
            if theta not in self.gamma:
                raise InvalidInput(f"mapping is undefined at {theta!r}")
            img = self.gamma[theta]
            bits = self.frame.check(img) if isinstance(img, int) else self.frame.encode(img)
            if bits == 0:
                raise InvalidInput(f"mapping sends {theta!r} to the empty set")
            gamma[theta] = bits
        extra = set(self.gamma) - set(self.source.outcomes)
        if extra:
            raise InvalidInput(f"mapping names unknown source points {sorted(map(str, extra))}")
        object.__setattr__(self, "gamma", gamma)

    def __hash__(self):
        return hash((self.source, self.frame, tuple(sorted(self.gamma.items(), key=str))))

    def induced_mass(self) -> MassFunction:
        focal: dict = defaultdict(list)
        for theta, p in zip(self.source.outcomes, self.source.probs):
            focal[self.gamma[theta]].append(p)
        return MassFunction(self.frame, {b: math.fsum(ps) for b, ps in focal.items()})


def bounds_from_mapping(mm: MultivaluedMapping, A) -> tuple[float, float]:
    """Lower and upper probability of ``A`` from the source points' images."""
    a = mm.frame.check(A) if isinstance(A, int) and not isinstance(A, bool) else mm.frame.encode(A)
    pairs = list(zip(mm.source.outcomes, mm.source.probs))
    low = math.fsum(p for t, p in pairs if mm.gamma[t] & ~a == 0)
    up = math.fsum(p for t, p in pairs if mm.gamma[t] & a)
    return min(low, 1.0), min(up, 1.0)
