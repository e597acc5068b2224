"""Classifications, infomorphisms, channels, local logics and perspectives.

Every other model in the package can be viewed through a
:class:`Classification`: tokens are the things classified, types are what
they are classified as, and ``supports`` records which token is of which
type. Token and type ids are plain hashable symbols (usually strings).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Hashable, Iterable, Mapping, Optional

from .errors import InvalidInput, PreconditionFailure

DEFAULT_WIDTH = 3


# ------------------------------------------------------------------ infons

@dataclass(frozen=True)
class Infon:
    """An item of information ``<<R(a1..an), location, time, polarity>>``."""

    relation: str
    args: tuple
    location: Optional[str] = None
    time: Optional[str] = None
    polarity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise InvalidInput(f"infon {self.relation!r} needs at least one argument")
        if self.polarity not in (0, 1):
            raise InvalidInput(f"polarity must be 0 or 1, got {self.polarity!r}")

    def key(self) -> str:
        """Canonical string form; used as a type id inside classifications."""
        return "<<{}({}), {}, {}, {}>>".format(
            self.relation, ",".join(self.args),
            self.location if self.location is not None else "-",
            self.time if self.time is not None else "-",
            self.polarity,
        )

    def __str__(self):
        return self.key()

    @classmethod
    def parse(cls, text: str) -> "Infon":
        """Inverse of :meth:`key`. Also accepts the short form ``R(a,b)``."""
        text = text.strip()
        m = re.fullmatch(
            r"<<\s*(\w+)\(([^)]*)\)\s*(?:,\s*([^,>]+?)\s*,\s*([^,>]+?)\s*,\s*([01])\s*)?>>",
            text,
        )
        if m is None:
            m2 = re.fullmatch(r"(\w+)\(([^)]*)\)", text)
            if m2 is None:
                raise InvalidInput(f"cannot parse infon {text!r}")
            return cls(m2.group(1), _split_args(m2.group(2)))
        loc, time, pol = m.group(3), m.group(4), m.group(5)
        return cls(
            m.group(1), _split_args(m.group(2)),
            None if loc in (None, "-") else loc,
            None if time in (None, "-") else time,
            1 if pol is None else int(pol),
        )


def _split_args(s: str) -> tuple:
    return tuple(a.strip() for a in s.split(",") if a.strip())


def supports(situation: Iterable[Infon], infon: Infon) -> bool:
    """``s |= i`` for an abstract situation given as its infon set."""
    return infon in set(situation)


# ---------------------------------------------------------- classifications

@dataclass(frozen=True)
class Classification:
    tokens: frozenset
    types: frozenset
    supports: frozenset
    _by_token: dict = field(init=False, repr=False, compare=False, hash=False)
    _by_type: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", frozenset(self.tokens))
        object.__setattr__(self, "types", frozenset(self.types))
        object.__setattr__(self, "supports", frozenset((a, t) for a, t in self.supports))
        if not self.tokens:
            raise InvalidInput("a classification needs at least one token")
        by_token = {a: set() for a in self.tokens}
        by_type = {t: set() for t in self.types}
        for a, t in self.supports:
            if a not in by_token:
                raise InvalidInput(f"support pair references undeclared token {a!r}")
            if t not in by_type:
                raise InvalidInput(f"support pair references undeclared type {t!r}")
            by_token[a].add(t)
            by_type[t].add(a)
        object.__setattr__(self, "_by_token", {a: frozenset(s) for a, s in by_token.items()})
        object.__setattr__(self, "_by_type", {t: frozenset(s) for t, s in by_type.items()})

    @classmethod
    def from_table(cls, table: Mapping[Hashable, Iterable[Hashable]], types=None) -> "Classification":
        """Build from ``token -> types it is of``; extra types may be declared."""
        pairs = {(a, t) for a, ts in table.items() for t in ts}
        declared = set(types or ()) | {t for _, t in pairs}
        return cls(frozenset(table), frozenset(declared), frozenset(pairs))

    def holds(self, token, type_) -> bool:
        return type_ in self.type_set(token)

    def type_set(self, token) -> frozenset:
        """The abstract situation of a token: every type it is of."""
        try:
            return self._by_token[token]
        except KeyError:
            raise InvalidInput(f"undeclared token {token!r}") from None

    def extension(self, type_) -> frozenset:
        try:
            return self._by_type[type_]
        except KeyError:
            raise InvalidInput(f"undeclared type {type_!r}") from None

    def check_tokens(self, tokens: Iterable) -> frozenset:
        tokens = frozenset(tokens)
        bad = tokens - self.tokens
        if bad:
            raise InvalidInput(f"undeclared tokens {sorted(map(str, bad))}")
        return tokens

    def check_types(self, types: Iterable) -> frozenset:
        types = frozenset(types)
        bad = types - self.types
        if bad:
            raise InvalidInput(f"undeclared types {sorted(map(str, bad))}")
        return types


# ---------------------------------------------------------------- sequents

@dataclass(frozen=True, order=True)
class Sequent:
    """Constraint ``antecedents |- consequents``.

    A token satisfies it iff it fails some antecedent or is of some
    consequent type. The binary constraint ``S => S'`` is ``{S} |- {S'}``.
    """

    antecedents: frozenset
    consequents: frozenset

    def __post_init__(self):
        object.__setattr__(self, "antecedents", frozenset(self.antecedents))
        object.__setattr__(self, "consequents", frozenset(self.consequents))
        if not self.antecedents and not self.consequents:
            raise InvalidInput("a sequent needs at least one type")

    @property
    def width(self) -> int:
        return len(self.antecedents) + len(self.consequents)

    def satisfied_by(self, types_of_token: frozenset) -> bool:
        return not self.antecedents <= types_of_token or bool(self.consequents & types_of_token)

    def sort_key(self):
        return (self.width, sorted(map(str, self.antecedents)), sorted(map(str, self.consequents)))

    def __str__(self):
        left = ", ".join(sorted(map(str, self.antecedents)))
        right = ", ".join(sorted(map(str, self.consequents)))
        return f"{left} |- {right}"


Constraint = Sequent


def sequent_holds(A: Classification, normal, antecedents, consequents) -> bool:
    """Every token of ``normal`` that is of all antecedents is of some consequent."""
    normal = A.check_tokens(normal)
    gamma = A.check_types(antecedents)
    delta = A.check_types(consequents)
    for a in normal:
        ts = A.type_set(a)
        if gamma <= ts and not (delta & ts):
            return False
    return True


@dataclass(frozen=True)
class LocalLogic:
    host: Classification
    constraints: frozenset
    normal_tokens: frozenset

    def __post_init__(self):
        object.__setattr__(self, "constraints", frozenset(self.constraints))
        object.__setattr__(self, "normal_tokens", self.host.check_tokens(self.normal_tokens))
        for s in self.constraints:
            self.host.check_types(s.antecedents | s.consequents)
        for a in self.normal_tokens:
            ts = self.host.type_set(a)
            for s in self.constraints:
                if not s.satisfied_by(ts):
                    raise InvalidInput(f"normal token {a!r} violates constraint {s}")

    def entails(self, antecedents, consequents) -> bool:
        return Sequent(frozenset(antecedents), frozenset(consequents)) in self.constraints

    def sorted_constraints(self) -> list:
        return sorted(self.constraints, key=Sequent.sort_key)


def _type_masks(A: Classification, normal: Iterable) -> tuple[dict, int]:
    order = sorted(normal, key=str)
    bit = {a: 1 << i for i, a in enumerate(order)}
    masks = {t: 0 for t in A.types}
    for a in order:
        for t in A.type_set(a):
            masks[t] |= bit[a]
    return masks, (1 << len(order)) - 1


def derive_local_logic(A: Classification, normal=None, max_width: int = DEFAULT_WIDTH) -> LocalLogic:
    """All sequents of width at most ``max_width`` that hold on ``normal``.

    Types are encoded as bitmasks over the normal tokens, so a sequent
    holds iff ``AND(antecedent masks) & ~OR(consequent masks)`` is zero.
    Antecedent and consequent sets may overlap (such sequents are trivial
    but they belong to the theory).
    """
    if not isinstance(max_width, int) or max_width < 1:
        raise InvalidInput(f"max_width must be a positive integer, got {max_width!r}")
    normal = A.tokens if normal is None else A.check_tokens(normal)
    masks, full = _type_masks(A, normal)
    types = sorted(A.types, key=str)
    found = set()
    meets = {(): full}
    for k in range(0, max_width + 1):
        for gamma in combinations(types, k):
            if k:
                meet = meets[gamma[:-1]] & masks[gamma[-1]]
                meets[gamma] = meet
            else:
                meet = full
            rest = max_width - k
            _add_consequents(found, frozenset(gamma), meet, types, masks, rest)
    return LocalLogic(A, frozenset(found), normal)


def _add_consequents(found, gamma, meet, types, masks, rest):
    # depth-first over consequent sets, pruning on the uncovered meet
    def walk(start, chosen, uncovered):
        if chosen or gamma:
            if uncovered == 0:
                found.add(Sequent(gamma, frozenset(chosen)))
        if len(chosen) == rest:
            return
        for i in range(start, len(types)):
            t = types[i]
            chosen.append(t)
            walk(i + 1, chosen, uncovered & ~masks[t])
            chosen.pop()

    walk(0, [], meet)


# ------------------------------------------------------------ infomorphisms

@dataclass(frozen=True)
class Infomorphism:
    """``f: source <-> target``: types forward, tokens backward."""

    source: Classification
    target: Classification
    type_map: Mapping
    token_map: Mapping

    def __post_init__(self):
        object.__setattr__(self, "type_map", dict(self.type_map))
        object.__setattr__(self, "token_map", dict(self.token_map))

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.type_map.items()),
                     frozenset(self.token_map.items())))

    @classmethod
    def identity(cls, A: Classification) -> "Infomorphism":
        return cls(A, A, {t: t for t in A.types}, {a: a for a in A.tokens})

    def up(self, types: Iterable) -> frozenset:
        return frozenset(self.type_map[t] for t in types)

    def down(self, tokens: Iterable) -> frozenset:
        return frozenset(self.token_map[b] for b in tokens)


def _check_maps(f: Infomorphism) -> None:
    src, tgt = f.source, f.target
    if set(f.type_map) != set(src.types):
        missing = src.types - set(f.type_map)
        extra = set(f.type_map) - src.types
        raise InvalidInput("type map must be total on the source types",
                           missing=sorted(map(str, missing)), undeclared=sorted(map(str, extra)))
    if set(f.token_map) != set(tgt.tokens):
        missing = tgt.tokens - set(f.token_map)
        extra = set(f.token_map) - tgt.tokens
        raise InvalidInput("token map must be total on the target tokens",
                           missing=sorted(map(str, missing)), undeclared=sorted(map(str, extra)))
    bad_types = {v for v in f.type_map.values() if v not in tgt.types}
    if bad_types:
        raise InvalidInput(f"type map hits undeclared target types {sorted(map(str, bad_types))}")
    bad_tokens = {v for v in f.token_map.values() if v not in src.tokens}
    if bad_tokens:
        raise InvalidInput(f"token map hits undeclared source tokens {sorted(map(str, bad_tokens))}")


def check_infomorphism(f: Infomorphism) -> tuple[bool, list]:
    """Exhaustively test ``f_down(b) |=_A alpha  <=>  b |=_B f_up(alpha)``.

    Returns ``(valid, violations)`` where each violation is a
    ``(target token, source type)`` pair.
    """
    _check_maps(f)
    violations = []
    for b in sorted(f.target.tokens, key=str):
        a = f.token_map[b]
        a_types = f.source.type_set(a)
        b_types = f.target.type_set(b)
        for alpha in sorted(f.source.types, key=str):
            if (alpha in a_types) != (f.type_map[alpha] in b_types):
                violations.append((b, alpha))
    return not violations, violations


def pullback_logic(f: Infomorphism, L: LocalLogic) -> LocalLogic:
    """Inverse image of a logic on ``f.target`` along ``f``.

    A source sequent is kept iff its image under the type map is a
    constraint of ``L``; normal tokens are the images of ``L``'s normal
    tokens under the token map.
    """
    if L.host != f.target:
        raise InvalidInput("logic is not hosted on the infomorphism's target")
    ok, violations = check_infomorphism(f)
    if not ok:
        raise PreconditionFailure("not a valid infomorphism", violations=len(violations))
    preimage: dict = {}
    for alpha, beta in f.type_map.items():
        preimage.setdefault(beta, []).append(alpha)

    def choices(image_set):
        # every source type set whose image is exactly image_set
        options = []
        for beta in sorted(image_set, key=str):
            pre = preimage.get(beta)
            if not pre:
                return []
            subsets = [frozenset(c) for k in range(1, len(pre) + 1) for c in combinations(pre, k)]
            options.append(subsets)
        return [frozenset().union(*combo) for combo in product(*options)]

    constraints = set()
    for s in L.constraints:
        gammas = choices(s.antecedents) if s.antecedents else [frozenset()]
        deltas = choices(s.consequents) if s.consequents else [frozenset()]
        for g in gammas:
            for d in deltas:
                constraints.add(Sequent(g, d))
    return LocalLogic(f.source, frozenset(constraints), f.down(L.normal_tokens))


def meet_logics(logics) -> LocalLogic:
    """Greatest lower bound: shared constraints, pooled normal tokens."""
    logics = list(logics)
    if not logics:
        raise InvalidInput("meet of an empty family of logics")
    host = logics[0].host
    for L in logics[1:]:
        if L.host != host:
            raise InvalidInput("logics in a meet must share their host classification")
    constraints = frozenset.intersection(*(L.constraints for L in logics))
    normal = frozenset().union(*(L.normal_tokens for L in logics))
    return LocalLogic(host, constraints, normal)


# ----------------------------------------------------------------- channels

@dataclass(frozen=True)
class Channel:
    core: Classification
    legs: tuple

    def __post_init__(self):
        object.__setattr__(self, "legs", tuple(self.legs))
        if len(self.legs) < 2:
            raise InvalidInput("a channel needs at least two legs")


def check_channel(ch: Channel) -> tuple[bool, list]:
    """Validate each leg; a leg may point into the core or out of it."""
    report = []
    for i, leg in enumerate(ch.legs):
        if leg.target != ch.core and leg.source != ch.core:
            report.append({"leg": i, "valid": False, "reason": "leg does not touch the core"})
            continue
        ok, violations = check_infomorphism(leg)
        report.append({"leg": i, "valid": ok, "violations": violations})
    return all(r["valid"] for r in report), report


# ------------------------------------------------------------- perspectives

@dataclass(frozen=True)
class Perspective:
    classification: Classification
    involves: frozenset = frozenset()
    precludes: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "involves", frozenset(tuple(p) for p in self.involves))
        object.__setattr__(self, "precludes", frozenset(tuple(p) for p in self.precludes))
        for t, u in self.involves | self.precludes:
            self.classification.check_types((t, u))


PERSPECTIVE_CONDITIONS = ("facticity", "xerox", "local preclusion", "mutual preclusion")


def check_perspective(P: Perspective) -> tuple[bool, list]:
    """Evaluate the four perspective conditions; returns violated names."""
    A = P.classification
    violated = []
    if any(A.extension(t) and not A.extension(u) for t, u in P.involves):
        violated.append("facticity")
    inv = P.involves
    if any((t, v) not in inv for t, u in inv for u2, v in inv if u == u2):
        violated.append("xerox")
    if any(A.extension(t) & A.extension(u) for t, u in P.precludes):
        violated.append("local preclusion")
    if any((u, t) not in P.precludes for t, u in P.precludes):
        violated.append("mutual preclusion")
    return not violated, violated
