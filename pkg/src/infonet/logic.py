"""Formula syntax shared by the propositional and epistemic engines.

Surface syntax::

    p  bird(tweety)  true  false
    !phi   phi & psi   phi | psi   phi -> psi   phi <-> psi
    K{a} phi           agent a knows phi
    C{a,b} phi         phi is common knowledge among a and b
    1*P{a}[p] - 2*P{a}[q] >= 0      linear probability inequality

Propositional reasoning works on truth tables packed into Python integers:
bit ``r`` of a formula's mask is its value under valuation ``r``, where atom
number ``i`` is true iff bit ``i`` of ``r`` is set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from .errors import BudgetExceeded, InvalidInput

MAX_ATOMS = 16


class Formula:
    """Base class for formula nodes; nodes are immutable and hashable."""

    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


TOP = Const(True)
BOTTOM = Const(False)


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula

    def __str__(self):
        return f"!{_wrap(self.sub)}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left)} & {_wrap(self.right)}"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left)} | {_wrap(self.right)}"


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left)} -> {_wrap(self.right)}"


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left)} <-> {_wrap(self.right)}"


@dataclass(frozen=True)
class Know(Formula):
    agent: str
    sub: Formula

    def __str__(self):
        return f"K{{{self.agent}}} {_wrap(self.sub)}"


@dataclass(frozen=True)
class Common(Formula):
    group: tuple
    sub: Formula

    def __post_init__(self):
        if not self.group:
            raise InvalidInput("common knowledge needs a non-empty group")
        object.__setattr__(self, "group", tuple(sorted(set(self.group))))

    def __str__(self):
        return f"C{{{','.join(self.group)}}} {_wrap(self.sub)}"


@dataclass(frozen=True)
class ProbTerm:
    coef: float
    agent: str
    sub: Formula


@dataclass(frozen=True)
class Linear(Formula):
    """``sum(coef_k * P_agent_k(sub_k)) >= bound``."""

    terms: tuple
    bound: float

    def __post_init__(self):
        if not self.terms:
            raise InvalidInput("linear probability formula needs at least one term")

    def __str__(self):
        parts = []
        for k, t in enumerate(self.terms):
            c = t.coef
            sign = "-" if c < 0 else "+"
            mag = _num(abs(c))
            body = f"{mag}*P{{{t.agent}}}[{t.sub}]"
            if k == 0:
                parts.append(body if c >= 0 else f"-{body}")
            else:
                parts.append(f"{sign} {body}")
        return f"{' '.join(parts)} >= {_num(self.bound)}"


def _num(x: float) -> str:
    return repr(int(x)) if float(x).is_integer() else repr(float(x))


def _wrap(f: Formula) -> str:
    if isinstance(f, (Atom, Const, Not, Know, Common)):
        return str(f)
    return f"({f})"


def conj(formulas: Iterable[Formula]) -> Formula:
    items = list(formulas)
    if not items:
        return TOP
    return reduce(And, items)


def disj(formulas: Iterable[Formula]) -> Formula:
    items = list(formulas)
    if not items:
        return BOTTOM
    return reduce(Or, items)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<modal>[KCP])\{(?P<idx>[^{}]*)\}
  | (?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)
  | (?P<atom>[A-Za-z_][A-Za-z0-9_]*(?:\([A-Za-z0-9_,\s]*\))?)
  | (?P<op><->|->|>=|<=|=|!|~|&|\||\(|\)|\[|\]|\+|-|\*)
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise InvalidInput(f"unexpected character {text[pos]!r} at {pos} in {text!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "idx":
            kind = "modal"
        if kind == "modal":
            names = [s.strip() for s in m.group("idx").split(",") if s.strip()]
            if not names:
                raise InvalidInput(f"empty agent index in {text!r}")
            out.append(("modal", (m.group("modal"), tuple(names))))
        elif kind == "num":
            out.append(("num", float(m.group("num"))))
        elif kind == "atom":
            out.append(("atom", re.sub(r"\s+", "", m.group("atom"))))
        else:
            out.append(("op", m.group("op")))
    out.append(("end", None))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op: str):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise InvalidInput(f"expected {op!r} in {self.text!r}, got {val!r}")

    def at_op(self, *ops):
        kind, val = self.peek()
        return kind == "op" and val in ops

    def parse(self) -> Formula:
        f = self.iff()
        if self.peek()[0] != "end":
            raise InvalidInput(f"trailing input in {self.text!r}: {self.peek()[1]!r}")
        return f

    def iff(self):
        left = self.implies()
        while self.at_op("<->"):
            self.take()
            left = Iff(left, self.implies())
        return left

    def implies(self):
        left = self.disj()
        if self.at_op("->"):
            self.take()
            return Implies(left, self.implies())
        return left

    def disj(self):
        left = self.conj()
        while self.at_op("|"):
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.at_op("&"):
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        kind, val = self.peek()
        if kind == "op" and val in ("!", "~"):
            self.take()
            return Not(self.unary())
        if kind == "modal" and val[0] in "KC":
            self.take()
            op, names = val
            if op == "K":
                if len(names) != 1:
                    raise InvalidInput(f"K takes exactly one agent in {self.text!r}")
                return Know(names[0], self.unary())
            return Common(names, self.unary())
        return self.primary()

    def primary(self):
        kind, val = self.peek()
        if kind == "atom":
            self.take()
            if val == "true":
                return TOP
            if val == "false":
                return BOTTOM
            return Atom(val)
        if kind == "op" and val == "(":
            self.take()
            f = self.iff()
            self.expect(")")
            return f
        if kind == "num" or (kind == "modal" and val[0] == "P") or (kind == "op" and val == "-"):
            return self.linear()
        raise InvalidInput(f"unexpected token {val!r} in {self.text!r}")

    def linear(self):
        leading_minus = self.at_op("-")
        if leading_minus:
            self.take()
        terms = [self.prob_term(negate=leading_minus)]
        while self.at_op("+", "-"):
            neg = self.take()[1] == "-"
            terms.append(self.prob_term(negate=neg))
        kind, rel = self.take()
        if kind != "op" or rel not in (">=", "<=", "="):
            raise InvalidInput(f"expected comparison in {self.text!r}")
        negate_bound = False
        if self.at_op("-"):
            self.take()
            negate_bound = True
        kind, bound = self.take()
        if kind != "num":
            raise InvalidInput(f"expected numeric bound in {self.text!r}")
        if negate_bound:
            bound = -bound
        ge = Linear(tuple(terms), bound)
        le = Linear(tuple(ProbTerm(-t.coef, t.agent, t.sub) for t in terms), -bound)
        if rel == ">=":
            return ge
        if rel == "<=":
            return le
        return And(ge, le)

    def prob_term(self, negate: bool) -> ProbTerm:
        coef = 1.0
        kind, val = self.peek()
        if kind == "num":
            self.take()
            coef = val
            if self.at_op("*"):
                self.take()
        kind, val = self.take()
        if kind != "modal" or val[0] != "P" or len(val[1]) != 1:
            raise InvalidInput(f"expected P{{agent}}[...] term in {self.text!r}")
        self.expect("[")
        sub = self.iff()
        self.expect("]")
        return ProbTerm(-coef if negate else coef, val[1][0], sub)


def parse(text) -> Formula:
    """Parse surface syntax into a formula; formulas pass through unchanged."""
    if isinstance(text, Formula):
        return text
    if not isinstance(text, str) or not text.strip():
        raise InvalidInput(f"not a formula: {text!r}")
    return _Parser(text).parse()


# ------------------------------------------------------------ inspection

def atoms_of(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return frozenset([f.name])
    if isinstance(f, Const):
        return frozenset()
    if isinstance(f, (Not, Know, Common)):
        return atoms_of(f.sub)
    if isinstance(f, Linear):
        return frozenset().union(*(atoms_of(t.sub) for t in f.terms))
    return atoms_of(f.left) | atoms_of(f.right)


def agents_of(f: Formula) -> frozenset:
    if isinstance(f, (Atom, Const)):
        return frozenset()
    if isinstance(f, Not):
        return agents_of(f.sub)
    if isinstance(f, Know):
        return agents_of(f.sub) | {f.agent}
    if isinstance(f, Common):
        return agents_of(f.sub) | set(f.group)
    if isinstance(f, Linear):
        return frozenset().union(*(agents_of(t.sub) | {t.agent} for t in f.terms))
    return agents_of(f.left) | agents_of(f.right)


def is_propositional(f: Formula) -> bool:
    if isinstance(f, (Atom, Const)):
        return True
    if isinstance(f, Not):
        return is_propositional(f.sub)
    if isinstance(f, (Know, Common, Linear)):
        return False
    return is_propositional(f.left) and is_propositional(f.right)


def has_probability(f: Formula) -> bool:
    if isinstance(f, Linear):
        return True
    if isinstance(f, (Atom, Const)):
        return False
    if isinstance(f, (Not, Know, Common)):
        return has_probability(f.sub)
    return has_probability(f.left) or has_probability(f.right)


def evaluate(f: Formula, true_atoms) -> bool:
    """Classical value of a propositional formula under one valuation."""
    if isinstance(f, Atom):
        return f.name in true_atoms
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not evaluate(f.sub, true_atoms)
    if isinstance(f, And):
        return evaluate(f.left, true_atoms) and evaluate(f.right, true_atoms)
    if isinstance(f, Or):
        return evaluate(f.left, true_atoms) or evaluate(f.right, true_atoms)
    if isinstance(f, Implies):
        return (not evaluate(f.left, true_atoms)) or evaluate(f.right, true_atoms)
    if isinstance(f, Iff):
        return evaluate(f.left, true_atoms) == evaluate(f.right, true_atoms)
    raise InvalidInput(f"not a propositional formula: {f}")


# ----------------------------------------------------------- truth tables

class TruthTable:
    """Bit-parallel truth tables over a fixed, ordered atom list."""

    def __init__(self, atoms: Sequence[str], max_atoms: int = MAX_ATOMS):
        atoms = tuple(dict.fromkeys(atoms))
        if len(atoms) > max_atoms:
            raise BudgetExceeded(
                f"{len(atoms)} atoms exceed the truth-table budget of {max_atoms}",
                atoms=len(atoms), budget=max_atoms,
            )
        self.atoms = atoms
        self.index = {a: i for i, a in enumerate(atoms)}
        self.rows = 1 << len(atoms)
        self.full = (1 << self.rows) - 1
        self._atom_masks = [self._atom_mask(i) for i in range(len(atoms))]
        self._cache: dict = {}

    def _atom_mask(self, i: int) -> int:
        half = 1 << i
        block = ((1 << half) - 1) << half
        period = half << 1
        return block * (self.full // ((1 << period) - 1))

    def mask(self, f: Formula) -> int:
        hit = self._cache.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Atom):
            if f.name not in self.index:
                raise InvalidInput(f"undeclared atom {f.name!r}")
            m = self._atom_masks[self.index[f.name]]
        elif isinstance(f, Const):
            m = self.full if f.value else 0
        elif isinstance(f, Not):
            m = self.full & ~self.mask(f.sub)
        elif isinstance(f, And):
            m = self.mask(f.left) & self.mask(f.right)
        elif isinstance(f, Or):
            m = self.mask(f.left) | self.mask(f.right)
        elif isinstance(f, Implies):
            m = (self.full & ~self.mask(f.left)) | self.mask(f.right)
        elif isinstance(f, Iff):
            m = self.full & ~(self.mask(f.left) ^ self.mask(f.right))
        else:
            raise InvalidInput(f"not a propositional formula: {f}")
        self._cache[f] = m
        return m

    def mask_all(self, formulas: Iterable[Formula]) -> int:
        m = self.full
        for f in formulas:
            m &= self.mask(f)
        return m

    def entails(self, premises: Iterable[Formula], conclusion: Formula) -> bool:
        return self.mask_all(premises) & ~self.mask(conclusion) == 0

    def consistent(self, formulas: Iterable[Formula]) -> bool:
        return self.mask_all(formulas) != 0

    def valuation(self, row: int) -> frozenset:
        return frozenset(a for i, a in enumerate(self.atoms) if row >> i & 1)

    def rows_of(self, mask: int) -> list:
        out = []
        r = 0
        while mask:
            if mask & 1:
                out.append(r)
            mask >>= 1
            r += 1
        return out


def _table_for(formulas: Sequence[Formula], atoms=None, max_atoms=MAX_ATOMS) -> TruthTable:
    if atoms is None:
        atoms = sorted(frozenset().union(*(atoms_of(f) for f in formulas)) if formulas else ())
    return TruthTable(atoms, max_atoms=max_atoms)


def entails(premises, conclusion, atoms=None, max_atoms=MAX_ATOMS) -> bool:
    premises = [parse(p) for p in premises]
    conclusion = parse(conclusion)
    table = _table_for(premises + [conclusion], atoms, max_atoms)
    return table.entails(premises, conclusion)


def consistent(formulas, atoms=None, max_atoms=MAX_ATOMS) -> bool:
    formulas = [parse(f) for f in formulas]
    return _table_for(formulas, atoms, max_atoms).consistent(formulas)


def models(formulas, atoms=None, max_atoms=MAX_ATOMS) -> list:
    """Valuations (as frozensets of true atoms) satisfying every formula."""
    formulas = [parse(f) for f in formulas]
    table = _table_for(formulas, atoms, max_atoms)
    return [table.valuation(r) for r in table.rows_of(table.mask_all(formulas))]
