"""Vague height predicates as classifications.

A :class:`HeightScenario` fixes objects with heights and a list of
variables. Tokens are assignments of variables to objects; types are the
atoms ``SHORT(X)``, ``MEDIUM(X)``, ``TALL(X)``, ``TALLER(X,Y)`` and
``SAMEHT(X,Y)`` (optionally conjunctions of them). A
:class:`Regimentation` grounds the atoms in numbers: one interval per
height category and a tolerance ``eps`` for ``SAMEHT``.

The event classification ``Evt(S)`` classifies tuples of objects by
regions of height space (``h(X1) in [150, 165]``, ``|h(X1)-h(X2)| <= 2``,
``h(X1) > h(X2)``). Each regimentation ``r`` gives an infomorphism from an
agent's classification into it, sending each atom to the region ``r``
reads it as.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Mapping, Optional, Sequence

from .core import (
    Channel, Classification, Infomorphism, LocalLogic, Sequent,
    derive_local_logic, meet_logics, pullback_logic,
)
from .errors import BudgetExceeded, InvalidInput
from .logic import And, Atom, Const, Formula, Not, Or, Implies, Iff, parse

CATEGORIES = ("SHORT", "MEDIUM", "TALL")
RELATIONS = ("TALLER", "SAMEHT")
TOL = 1e-9
MAX_TOKENS = 20_000
_ATOM = re.compile(r"\s*(\w+)\(([^)]*)\)\s*")


@dataclass(frozen=True)
class Interval:
    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo = -math.inf if self.lo is None else float(self.lo)
        hi = math.inf if self.hi is None else float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or lo > hi:
            raise InvalidInput(f"bad interval bounds {self.lo!r}, {self.hi!r}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo == hi and not (self.lo_closed and self.hi_closed):
            raise InvalidInput("a degenerate interval must be closed")

    def __contains__(self, x: float) -> bool:
        above = x > self.lo or (self.lo_closed and x == self.lo)
        below = x < self.hi or (self.hi_closed and x == self.hi)
        return above and below

    def __str__(self):
        left = "[" if self.lo_closed and math.isfinite(self.lo) else "("
        right = "]" if self.hi_closed and math.isfinite(self.hi) else ")"
        return f"{left}{_num(self.lo)}, {_num(self.hi)}{right}"


def _num(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:g}"


@dataclass(frozen=True)
class Regimentation:
    """Tolerance plus one interval per category, in category order."""

    eps: float
    intervals: tuple
    name: str = ""

    def __post_init__(self):
        eps = float(self.eps)
        if math.isnan(eps) or eps < 0:
            raise InvalidInput(f"tolerance must be a non-negative number, got {self.eps!r}")
        object.__setattr__(self, "eps", eps)
        ivs = tuple(iv if isinstance(iv, Interval) else Interval(*iv) for iv in self.intervals)
        if len(ivs) != len(CATEGORIES):
            raise InvalidInput(f"need {len(CATEGORIES)} intervals ({', '.join(CATEGORIES)})")
        object.__setattr__(self, "intervals", ivs)
        for a, b in zip(ivs, ivs[1:]):
            gap = b.lo - a.hi
            touching = gap == 0 and a.hi_closed and b.lo_closed
            if gap < 0 or touching:
                raise InvalidInput(f"intervals {a} and {b} overlap or are out of order")
            if gap > eps + TOL:
                raise InvalidInput(f"gap {gap:g} between {a} and {b} exceeds the tolerance {eps:g}")

    def category(self, name: str) -> Interval:
        return self.intervals[CATEGORIES.index(name)]

    def label(self) -> str:
        return self.name or "eps={:g} ".format(self.eps) + " ".join(
            f"{c}={iv}" for c, iv in zip(CATEGORIES, self.intervals))


@dataclass(frozen=True)
class HeightScenario:
    heights: Mapping  # object -> height in cm
    variables: tuple = ("X1", "X2")

    def __post_init__(self):
        hs = {}
        for obj, h in dict(self.heights).items():
            if isinstance(h, bool) or not isinstance(h, (int, float)) or not math.isfinite(h) or h <= 0:
                raise InvalidInput(f"height of {obj!r} must be a finite positive number")
            hs[str(obj)] = float(h)
        if not hs:
            raise InvalidInput("a height scenario needs at least one object")
        object.__setattr__(self, "heights", hs)
        vs = tuple(self.variables)
        if not vs or len(set(vs)) != len(vs):
            raise InvalidInput("variables must be distinct and non-empty")
        object.__setattr__(self, "variables", vs)

    def __hash__(self):
        return hash((tuple(sorted(self.heights.items())), self.variables))

    @property
    def objects(self) -> tuple:
        return tuple(sorted(self.heights, key=lambda o: (self.heights[o], o)))

    def height(self, obj) -> float:
        try:
            return self.heights[obj]
        except KeyError:
            raise InvalidInput(f"unknown object {obj!r}") from None


# ------------------------------------------------------------ classification

def _atom_parts(name: str) -> tuple:
    m = _ATOM.fullmatch(name)
    if m is None:
        raise InvalidInput(f"not a height atom: {name!r}")
    pred = m.group(1)
    args = tuple(a.strip() for a in m.group(2).split(",") if a.strip())
    if pred in CATEGORIES and len(args) == 1:
        return pred, args
    if pred in RELATIONS and len(args) == 2:
        return pred, args
    raise InvalidInput(f"unknown height predicate {name!r}")


def _assignment(sc: HeightScenario, token) -> dict:
    if isinstance(token, Mapping):
        a = dict(token)
    else:
        token = tuple(token)
        if len(token) > len(sc.variables):
            raise InvalidInput("token assigns more objects than there are variables")
        a = dict(zip(sc.variables, token))
    for v, o in a.items():
        if v not in sc.variables:
            raise InvalidInput(f"undeclared variable {v!r}")
        sc.height(o)
    return a


def _holds_atom(sc, r, a, name) -> bool:
    pred, args = _atom_parts(name)
    try:
        hs = [sc.heights[a[x]] for x in args]
    except KeyError as exc:
        raise InvalidInput(f"variable {exc.args[0]!r} is not assigned by the token") from None
    if pred in CATEGORIES:
        return hs[0] in r.category(pred)
    if pred == "TALLER":
        return hs[0] > hs[1]
    return abs(hs[0] - hs[1]) <= r.eps + TOL


def _holds(sc, r, a, f: Formula) -> bool:
    if isinstance(f, Atom):
        return _holds_atom(sc, r, a, f.name)
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not _holds(sc, r, a, f.sub)
    if isinstance(f, And):
        return _holds(sc, r, a, f.left) and _holds(sc, r, a, f.right)
    if isinstance(f, Or):
        return _holds(sc, r, a, f.left) or _holds(sc, r, a, f.right)
    if isinstance(f, Implies):
        return not _holds(sc, r, a, f.left) or _holds(sc, r, a, f.right)
    if isinstance(f, Iff):
        return _holds(sc, r, a, f.left) == _holds(sc, r, a, f.right)
    raise InvalidInput(f"unsupported connective in height type {f}")


def classify(sc: HeightScenario, r: Regimentation, token, type_) -> bool:
    """Does the assignment ``token`` satisfy ``type_`` under ``r``?

    Heights in a gap between intervals satisfy no category atom.
    """
    return _holds(sc, r, _assignment(sc, token), parse(type_))


def atom_types(variables: Sequence[str]) -> tuple:
    unary = [f"{c}({v})" for v in variables for c in CATEGORIES]
    binary = [f"{p}({x},{y})" for x, y in permutations(variables, 2) for p in RELATIONS]
    return tuple(unary + binary)


def height_types(variables: Sequence[str], conj_width: int = 1) -> tuple:
    atoms = atom_types(variables)
    out = list(atoms)
    for k in range(2, conj_width + 1):
        out.extend(" & ".join(c) for c in combinations(atoms, k))
    return tuple(out)


def _tokens(sc: HeightScenario, k: int) -> list:
    n = len(sc.objects) ** k
    if n > MAX_TOKENS:
        raise BudgetExceeded(f"{n} assignments exceed the token budget of {MAX_TOKENS}",
                             tokens=n, budget=MAX_TOKENS)
    return list(product(sc.objects, repeat=k))


def _vars(sc: HeightScenario, arity: Optional[int]) -> tuple:
    k = min(2, len(sc.variables)) if arity is None else arity
    if not 1 <= k <= len(sc.variables):
        raise InvalidInput(f"arity must be between 1 and {len(sc.variables)}")
    return sc.variables[:k]


def agent_classification(sc: HeightScenario, r: Regimentation, arity: Optional[int] = None,
                         conj_width: int = 1) -> Classification:
    """Tokens: assignments of the first ``arity`` variables; types: height formulas."""
    vs = _vars(sc, arity)
    types = height_types(vs, conj_width)
    parsed = [(t, parse(t)) for t in types]
    table = {}
    for tok in _tokens(sc, len(vs)):
        a = dict(zip(vs, tok))
        table[tok] = [t for t, f in parsed if _holds(sc, r, a, f)]
    return Classification.from_table(table, types)


# ---------------------------------------------------------------- Evt(S)

def region_of(atom_name: str, r: Regimentation) -> str:
    """The height-space region that ``r`` assigns to an atom."""
    pred, args = _atom_parts(atom_name)
    if pred in CATEGORIES:
        return f"h({args[0]}) in {r.category(pred)}"
    if pred == "TALLER":
        return f"h({args[0]}) > h({args[1]})"
    return f"|h({args[0]})-h({args[1]})| <= {_num(r.eps)}"


def _region(f: Formula, r: Regimentation) -> str:
    if isinstance(f, Atom):
        return region_of(f.name, r)
    if isinstance(f, And):
        parts = sorted(set(_region(f.left, r).split(" & ")) | set(_region(f.right, r).split(" & ")))
        return " & ".join(parts)
    raise InvalidInput(f"only conjunctions of atoms have regions, got {f}")


def _region_holds(sc, tok, vs, region: str) -> bool:
    a = dict(zip(vs, tok))
    for part in region.split(" & "):
        m = re.fullmatch(r"h\((\w+)\) in ([\[(])(\S+), (\S+)([\])])", part)
        if m:
            h = sc.heights[a[m.group(1)]]
            iv = Interval(float(m.group(3)), float(m.group(4)), m.group(2) == "[", m.group(5) == "]")
            if h not in iv:
                return False
            continue
        m = re.fullmatch(r"h\((\w+)\) > h\((\w+)\)", part)
        if m:
            if not sc.heights[a[m.group(1)]] > sc.heights[a[m.group(2)]]:
                return False
            continue
        m = re.fullmatch(r"\|h\((\w+)\)-h\((\w+)\)\| <= (\S+)", part)
        if m:
            if not abs(sc.heights[a[m.group(1)]] - sc.heights[a[m.group(2)]]) <= float(m.group(3)) + TOL:
                return False
            continue
        raise InvalidInput(f"unreadable region {part!r}")
    return True


def event_state_space(sc: HeightScenario, family: Sequence[Regimentation], arity: Optional[int] = None,
                      conj_width: int = 1) -> Classification:
    """Tuples of objects classified by the regions the family's regimentations use."""
    family = list(family)
    if not family:
        raise InvalidInput("need at least one regimentation")
    vs = _vars(sc, arity)
    types = sorted({_region(parse(t), r) for r in family for t in height_types(vs, conj_width)})
    table = {tok: [g for g in types if _region_holds(sc, tok, vs, g)] for tok in _tokens(sc, len(vs))}
    return Classification.from_table(table, types)


def build_regimentation_morphism(sc: HeightScenario, r: Regimentation,
                                 family: Optional[Sequence[Regimentation]] = None,
                                 arity: Optional[int] = None, conj_width: int = 1) -> Infomorphism:
    """``f_r`` from the agent classification under ``r`` into ``Evt(S)``.

    ``Evt(S)`` is built over ``family`` (default: ``[r]``) so several
    regimentations can share it as a channel core.
    """
    family = [r] if family is None else list(family)
    if r not in family:
        family.append(r)
    A = agent_classification(sc, r, arity, conj_width)
    evt = event_state_space(sc, family, arity, conj_width)
    type_map = {t: _region(parse(t), r) for t in A.types}
    token_map = {tok: tok for tok in evt.tokens}
    return Infomorphism(A, evt, type_map, token_map)


def regimentation_channel(sc: HeightScenario, family: Sequence[Regimentation],
                          arity: Optional[int] = None) -> Channel:
    family = list(family)
    legs = [build_regimentation_morphism(sc, r, family, arity) for r in family]
    return Channel(legs[0].target, tuple(legs))


# ------------------------------------------------------- intensional logic

def combined_classification(sc: HeightScenario, family: Sequence[Regimentation],
                            arity: Optional[int] = None, conj_width: int = 1) -> Classification:
    """One host for every regimentation: token ``(assignment, k)`` reads
    the height formulas under ``family[k]``."""
    vs = _vars(sc, arity)
    types = height_types(vs, conj_width)
    parsed = [(t, parse(t)) for t in types]
    table = {}
    for k, r in enumerate(family):
        for tok in _tokens(sc, len(vs)):
            a = dict(zip(vs, tok))
            table[(tok, k)] = [t for t, f in parsed if _holds(sc, r, a, f)]
    return Classification.from_table(table, types)


def host_morphism(sc: HeightScenario, family: Sequence[Regimentation], k: int,
                  host: Classification, evt: Classification, arity: Optional[int] = None) -> Infomorphism:
    r = family[k]
    type_map = {t: _region(parse(t), r) for t in host.types}
    token_map = {tok: (tok, k) for tok in evt.tokens}
    return Infomorphism(host, evt, type_map, token_map)


def regimented_logics(sc: HeightScenario, family: Sequence[Regimentation], width: int = 3,
                      arity: Optional[int] = None, conj_width: int = 1) -> list:
    """``Log_r`` for each ``r``: the pullback of ``Log(Evt(S))`` along ``f_r``."""
    family = list(family)
    if not family:
        raise InvalidInput("the regimentation family must be non-empty")
    host = combined_classification(sc, family, arity, conj_width)
    evt = event_state_space(sc, family, arity, conj_width)
    evt_logic = derive_local_logic(evt, evt.tokens, width)
    out = []
    for k in range(len(family)):
        f = host_morphism(sc, family, k, host, evt, arity)
        out.append(pullback_logic(f, evt_logic))
    return out


def intensional_logic(sc: HeightScenario, family: Sequence[Regimentation], width: int = 3,
                      arity: Optional[int] = None, conj_width: int = 1) -> LocalLogic:
    """Meet of the regimented logics: what holds however the predicates are regimented."""
    return meet_logics(regimented_logics(sc, family, width, arity, conj_width))


# ------------------------------------------------------------------ sorites

def sorites_premises(n: int, variables: Sequence[str]) -> tuple:
    vs = variables[:n]
    return (f"SHORT({vs[0]})",) + tuple(f"SAMEHT({x},{y})" for x, y in zip(vs, vs[1:]))


def _climb(sc: HeightScenario, r: Regimentation) -> Optional[list]:
    """Shortest eps-step chain of objects from SHORT to TALL under ``r``."""
    objs = sc.objects
    short = [o for o in objs if sc.heights[o] in r.category("SHORT")]
    tall = {o for o in objs if sc.heights[o] in r.category("TALL")}
    parent = {o: None for o in short}
    queue = deque(short)
    while queue:
        o = queue.popleft()
        if o in tall:
            path = [o]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for p in objs:
            if p not in parent and abs(sc.heights[p] - sc.heights[o]) <= r.eps + TOL:
                parent[p] = o
                queue.append(p)
    return None


def sorites_check(sc: HeightScenario, family: Sequence[Regimentation], n: int) -> dict:
    """Is ``SHORT(X1), SAMEHT(X1,X2), ..., SAMEHT(X{n-1},Xn) |- not TALL(Xn)``
    valid under every regimentation in ``family``?

    It fails exactly when some regimentation admits an eps-step chain of
    at most ``n - 1`` steps from a SHORT object to a TALL one; the chain,
    padded by repeating its first object, is returned as the witness.
    """
    family = list(family)
    if not family:
        raise InvalidInput("the regimentation family must be non-empty")
    if not isinstance(n, int) or n < 2:
        raise InvalidInput("the chain length must be an integer >= 2")
    if n > len(sc.variables):
        raise InvalidInput(f"chain length {n} exceeds the {len(sc.variables)} declared variables")
    best = None
    for k, r in enumerate(family):
        path = _climb(sc, r)
        if path is not None and (best is None or len(path) < len(best[1])):
            best = (k, path)
    threshold = None if best is None else max(2, len(best[1]))
    vs = sc.variables[:n]
    premises = sorites_premises(n, sc.variables)
    conclusion = f"TALL({vs[-1]})"
    report = {
        "n": n,
        "sequent": {"antecedents": list(premises), "consequents": [f"!{conclusion}"]},
        "threshold": threshold,
        "regimentations": [r.label() for r in family],
    }
    if best is None or len(best[1]) > n:
        report["verdict"] = "derivable"
        report["witness"] = None
        return report
    k, path = best
    chain = [path[0]] * (n - len(path)) + path
    token = dict(zip(vs, chain))
    report["verdict"] = "non-derivable"
    report["witness"] = {
        "regimentation": k,
        "assignment": token,
        "heights": [sc.heights[o] for o in chain],
        "verified": verify_witness(sc, family[k], token, n),
    }
    return report


def verify_witness(sc: HeightScenario, r: Regimentation, token: Mapping, n: int) -> bool:
    """Re-check a witness token atom by atom with :func:`classify`."""
    premises = sorites_premises(n, sc.variables)
    tall = f"TALL({sc.variables[n - 1]})"
    return all(classify(sc, r, token, p) for p in premises) and classify(sc, r, token, tall)


def regimentation_grid(eps: float, short_hi: Sequence[float], tall_lo: Sequence[float],
                       step: float = 0.5, floor: float = -math.inf, ceil: float = math.inf) -> list:
    """Regimentations with SHORT ending at each ``short_hi`` and TALL starting
    at each ``tall_lo``; MEDIUM fills the middle leaving gaps of ``step``
    (skipped when that gap exceeds ``eps``)."""
    out = []
    for s in short_hi:
        for t in tall_lo:
            if t - s < 3 * step:
                continue
            try:
                out.append(Regimentation(eps, (Interval(floor, s), Interval(s + step, t - step),
                                               Interval(t, ceil))))
            except InvalidInput:
                continue
    return out
