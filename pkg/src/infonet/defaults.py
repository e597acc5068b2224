"""Non-monotonic propositional reasoning: consequence diagnostics,
maximal consistent subsets, default-rule extensions and the closed-world
assumption. All reasoning is by bit-parallel truth tables."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Optional, Sequence

from .errors import BudgetExceeded, CwaInconsistent, InvalidInput
from .logic import MAX_ATOMS, Formula, Not, Atom, TruthTable, atoms_of, is_propositional, parse

MAX_MCS_FORMULAS = 12
MAX_RULES = 10


@dataclass(frozen=True)
class PropKB:
    atoms: tuple
    formulas: tuple

    def __post_init__(self):
        formulas = tuple(parse(f) for f in self.formulas)
        for f in formulas:
            if not is_propositional(f):
                raise InvalidInput(f"knowledge bases are propositional; got {f}")
        used = frozenset().union(*(atoms_of(f) for f in formulas)) if formulas else frozenset()
        atoms = tuple(dict.fromkeys(self.atoms)) if self.atoms is not None else tuple(sorted(used))
        missing = used - set(atoms)
        if missing:
            raise InvalidInput(f"formulas use undeclared atoms {sorted(missing)}")
        if len(atoms) > MAX_ATOMS:
            raise BudgetExceeded(f"{len(atoms)} atoms exceed the budget of {MAX_ATOMS}",
                                 atoms=len(atoms), budget=MAX_ATOMS)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "formulas", formulas)

    @classmethod
    def of(cls, formulas: Iterable, atoms: Optional[Iterable[str]] = None) -> "PropKB":
        return cls(None if atoms is None else tuple(atoms), tuple(formulas))

    def table(self) -> TruthTable:
        return TruthTable(self.atoms)

    def with_formulas(self, formulas: Iterable) -> "PropKB":
        return PropKB(self.atoms, tuple(formulas))

    def __str__(self):
        return "{" + ", ".join(map(str, self.formulas)) + "}"


def _kb(kb, atoms=None) -> PropKB:
    return kb if isinstance(kb, PropKB) else PropKB.of(kb, atoms)


def _table_with(kb: PropKB, extra: Sequence[Formula]) -> TruthTable:
    atoms = list(kb.atoms)
    for f in extra:
        for a in sorted(atoms_of(f)):
            if a not in atoms:
                atoms.append(a)
    return TruthTable(atoms)


def entails(kb, phi) -> bool:
    kb = _kb(kb)
    phi = parse(phi)
    t = _table_with(kb, [phi])
    return t.entails(kb.formulas, phi)


def is_consistent(kb) -> bool:
    kb = _kb(kb)
    return kb.table().consistent(kb.formulas)


def inconsistency_explosion(kb, phi) -> bool:
    """Entailment, which an inconsistent ``kb`` grants for every ``phi``."""
    return entails(kb, phi)


def cons_diff(gamma, gamma_prime, probes, consequence: Optional[Callable] = None) -> dict:
    """Compare the probe consequences of ``gamma`` and a superset ``gamma_prime``.

    ``consequence(kb, phi)`` defaults to classical entailment; pass another
    engine (for example :func:`skeptical_entails`) to test it. A probe
    derivable from ``gamma`` but not from ``gamma_prime`` witnesses
    non-monotonicity.
    """
    gamma, gamma_prime = _kb(gamma), _kb(gamma_prime)
    if not set(gamma.formulas) <= set(gamma_prime.formulas):
        raise InvalidInput("the second knowledge base must contain the first")
    consequence = consequence or entails
    probes = [parse(p) for p in probes]
    before = {p for p in probes if consequence(gamma, p)}
    after = {p for p in probes if consequence(gamma_prime, p)}
    lost = [str(p) for p in probes if p in before and p not in after]
    gained = [str(p) for p in probes if p in after and p not in before]
    return {"lost": lost, "gained": gained, "monotonic": not lost}


# ------------------------------------------------------- consistent subsets

def maximal_consistent_subsets(kb) -> list:
    """All inclusion-maximal consistent subsets, ordered by formula positions."""
    kb = _kb(kb)
    n = len(kb.formulas)
    if n > MAX_MCS_FORMULAS:
        raise BudgetExceeded(f"{n} formulas exceed the subset budget of {MAX_MCS_FORMULAS}",
                             formulas=n, budget=MAX_MCS_FORMULAS)
    t = kb.table()
    masks = [t.mask(f) for f in kb.formulas]
    found: list = []
    for size in range(n, -1, -1):
        for idx in combinations(range(n), size):
            sel = sum(1 << i for i in idx)
            if any(sel & ~m == 0 for m in found):
                continue
            meet = t.full
            for i in idx:
                meet &= masks[i]
                if not meet:
                    break
            if meet:
                found.append(sel)
    order = sorted(found, key=lambda m: [i for i in range(n) if m >> i & 1])
    return [kb.with_formulas(kb.formulas[i] for i in range(n) if m >> i & 1) for m in order]


def skeptical_entails(kb, phi) -> bool:
    return all(entails(s, phi) for s in maximal_consistent_subsets(kb))


def credulous_entails(kb, phi) -> bool:
    return any(entails(s, phi) for s in maximal_consistent_subsets(kb))


# -------------------------------------------------------------- defaults

@dataclass(frozen=True)
class DefaultRule:
    """``prerequisites ; not(blockers) |- conclusion``.

    Applicable to an extension when every prerequisite is derivable and
    no blocker is derivable from that extension.
    """

    prerequisites: tuple
    blockers: tuple
    conclusion: Formula
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "prerequisites", tuple(parse(p) for p in self.prerequisites))
        object.__setattr__(self, "blockers", tuple(parse(b) for b in self.blockers))
        object.__setattr__(self, "conclusion", parse(self.conclusion))
        for f in self.prerequisites + self.blockers + (self.conclusion,):
            if not is_propositional(f):
                raise InvalidInput(f"default rules are propositional; got {f}")

    def formulas(self) -> tuple:
        return self.prerequisites + self.blockers + (self.conclusion,)

    def __str__(self):
        pre = ", ".join(map(str, self.prerequisites)) or "T"
        blk = ", ".join(f"not({b})" for b in self.blockers)
        mid = f"; {blk}" if blk else ""
        return f"{pre}{mid} |- {self.conclusion}"


@dataclass(frozen=True)
class Extension:
    kb: PropKB  # facts plus the conclusions of the applied rules
    applied: tuple  # indices into the rule list

    def theory_mask(self, t: TruthTable) -> int:
        return t.mask_all(self.kb.formulas)


def _rule_table(facts: PropKB, rules: Sequence[DefaultRule]) -> TruthTable:
    extra = [f for r in rules for f in r.formulas()]
    return _table_with(facts, extra)


def _grounded(t: TruthTable, facts: PropKB, rules, context_mask: int) -> tuple:
    """Least set of rules applicable when blockers are judged against ``context_mask``."""
    current = t.mask_all(facts.formulas)
    applied: list = []
    changed = True
    while changed:
        changed = False
        for k, r in enumerate(rules):
            if k in applied:
                continue
            if not all(current & ~t.mask(p) == 0 for p in r.prerequisites):
                continue
            if any(context_mask & ~t.mask(b) == 0 for b in r.blockers):
                continue
            applied.append(k)
            current &= t.mask(r.conclusion)
            changed = True
    return tuple(sorted(applied)), current


def default_extensions(facts, rules: Sequence[DefaultRule]) -> list:
    """Every extension, found by guessing applied-rule sets and verifying
    each guess is reproduced by the grounded construction."""
    facts = _kb(facts)
    rules = list(rules)
    if len(rules) > MAX_RULES:
        raise BudgetExceeded(f"{len(rules)} rules exceed the budget of {MAX_RULES}",
                             rules=len(rules), budget=MAX_RULES)
    t = _rule_table(facts, rules)
    base = t.mask_all(facts.formulas)
    seen = set()
    out = []
    for size in range(len(rules) + 1):
        for guess in combinations(range(len(rules)), size):
            candidate = base
            for k in guess:
                candidate &= t.mask(rules[k].conclusion)
            applied, grounded = _grounded(t, facts, rules, candidate)
            if grounded != candidate or candidate in seen:
                continue
            seen.add(candidate)
            formulas = facts.formulas + tuple(rules[k].conclusion for k in applied)
            out.append(Extension(PropKB(t.atoms, formulas), applied))
    return out


def verify_extension(facts, rules: Sequence[DefaultRule], ext: Extension) -> bool:
    """Independent fixpoint check of a claimed extension.

    The theory must equal the consequences of the facts plus the applied
    conclusions; the applied rules must be exactly those whose
    prerequisites hold and whose blockers fail in the theory; and they
    must admit an order in which each is enabled by the facts and the
    conclusions before it.
    """
    facts = _kb(facts)
    rules = list(rules)
    t = _rule_table(facts, rules)
    theory = t.mask_all(facts.formulas)
    for k in ext.applied:
        theory &= t.mask(rules[k].conclusion)
    if theory != t.mask_all(ext.kb.formulas):
        return False

    def derivable(mask, f):
        return mask & ~t.mask(f) == 0

    enabled = {k for k, r in enumerate(rules)
               if all(derivable(theory, p) for p in r.prerequisites)
               and not any(derivable(theory, b) for b in r.blockers)}
    if enabled != set(ext.applied):
        return False
    pending = set(ext.applied)
    state = t.mask_all(facts.formulas)
    while pending:
        ready = [k for k in sorted(pending) if all(derivable(state, p) for p in rules[k].prerequisites)]
        if not ready:
            return False
        for k in ready:
            state &= t.mask(rules[k].conclusion)
            pending.discard(k)
    return True


def default_entails(facts, rules, phi, mode: str = "skeptical") -> bool:
    """``phi`` in every (skeptical) or some (credulous) extension."""
    exts = default_extensions(facts, rules)
    phi = parse(phi)
    facts = _kb(facts)
    t = _table_with(_rule_table_kb(facts, rules), [phi])
    hits = [t.entails(e.kb.formulas, phi) for e in exts]
    if mode == "skeptical":
        return all(hits)
    if mode == "credulous":
        return any(hits)
    raise InvalidInput(f"unknown mode {mode!r}")


def _rule_table_kb(facts: PropKB, rules) -> PropKB:
    atoms = list(facts.atoms)
    for r in rules:
        for f in r.formulas():
            for a in sorted(atoms_of(f)):
                if a not in atoms:
                    atoms.append(a)
    return PropKB(tuple(atoms), facts.formulas)


# -------------------------------------------------------------- CWA

def closed_world(kb) -> PropKB:
    """Add the negation of every atom the knowledge base does not entail."""
    kb = _kb(kb)
    t = kb.table()
    theory = t.mask_all(kb.formulas)
    if not theory:
        raise InvalidInput("the closed-world assumption needs a consistent knowledge base")
    added = [Not(Atom(a)) for a in kb.atoms if theory & ~t.mask(Atom(a)) != 0]
    closure = theory & t.mask_all(added)
    if not closure:
        witness = list(added)
        for f in list(witness):
            trial = [g for g in witness if g is not f]
            if not theory & t.mask_all(trial):
                witness = trial
        raise CwaInconsistent(
            "closing the world contradicts the knowledge base",
            witness_atoms=[g.sub.name for g in witness],
        )
    return kb.with_formulas(kb.formulas + tuple(added))
