"""Rough-set approximations over an attribute-value information system."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InvalidInput


@dataclass(frozen=True)
class InformationSystem:
    universe: tuple
    attributes: tuple
    values: Mapping  # (object, attribute) -> value symbol

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "values", dict(self.values))
        if not self.universe:
            raise InvalidInput("the universe must be non-empty")
        if len(set(self.universe)) != len(self.universe):
            raise InvalidInput("object ids must be distinct")
        if len(set(self.attributes)) != len(self.attributes):
            raise InvalidInput("attribute names must be distinct")
        for x in self.universe:
            for a in self.attributes:
                if (x, a) not in self.values:
                    raise InvalidInput(f"no value for object {x!r}, attribute {a!r}")

    def __hash__(self):
        return hash((self.universe, self.attributes))

    @classmethod
    def from_rows(cls, rows: Mapping[object, Mapping[str, object]], attributes=None) -> "InformationSystem":
        rows = dict(rows)
        if attributes is None:
            attributes = sorted({a for r in rows.values() for a in r})
        values = {(x, a): r[a] for x, r in rows.items() for a in attributes if a in r}
        return cls(tuple(rows), tuple(attributes), values)

    @classmethod
    def from_csv(cls, text: str) -> "InformationSystem":
        """Header row names the attributes; the first column holds object ids."""
        reader = csv.reader(io.StringIO(text.strip()))
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidInput("empty CSV table") from None
        if len(header) < 2:
            raise InvalidInput("CSV needs an id column and at least one attribute")
        attributes = tuple(h.strip() for h in header[1:])
        rows = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InvalidInput(f"CSV line {lineno} has {len(row)} cells, expected {len(header)}")
            oid = row[0].strip()
            if oid in rows:
                raise InvalidInput(f"duplicate object id {oid!r}")
            rows[oid] = {a: c.strip() for a, c in zip(attributes, row[1:])}
        return cls.from_rows(rows, attributes)

    def check_objects(self, X: Iterable) -> frozenset:
        X = frozenset(X)
        bad = X - set(self.universe)
        if bad:
            raise InvalidInput(f"unknown objects {sorted(map(str, bad))}")
        return X

    def check_attributes(self, B: Iterable) -> tuple:
        B = tuple(dict.fromkeys(B))
        if not B:
            raise InvalidInput("the attribute subset must be non-empty")
        bad = [a for a in B if a not in self.attributes]
        if bad:
            raise InvalidInput(f"unknown attributes {bad}")
        return B


def indiscernibility_classes(S: InformationSystem, B: Iterable) -> list:
    """Blocks of objects agreeing on every attribute in ``B``, in universe order."""
    B = S.check_attributes(B)
    blocks: dict = {}
    for x in S.universe:
        blocks.setdefault(tuple(S.values[(x, a)] for a in B), []).append(x)
    return [frozenset(b) for b in blocks.values()]


@dataclass(frozen=True)
class Approximation:
    lower: frozenset
    upper: frozenset
    boundary: frozenset


def approximate(S: InformationSystem, B: Iterable, X: Iterable) -> Approximation:
    """Objects surely in ``X`` (lower), possibly in ``X`` (upper), and the gap."""
    X = S.check_objects(X)
    lower, upper = set(), set()
    for block in indiscernibility_classes(S, B):
        if block <= X:
            lower |= block
        if block & X:
            upper |= block
    lower, upper = frozenset(lower), frozenset(upper)
    return Approximation(lower, upper, upper - lower)


def is_crisp(S: InformationSystem, B: Iterable, X: Iterable) -> bool:
    return not approximate(S, B, X).boundary
