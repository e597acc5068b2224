"""Scenario-driven command line.

``infonet run SCENARIO`` loads a JSON scenario ``{"schema": 1, "task": ...,
"payload": {...}}``, validates it, runs the task and prints a JSON report.
``infonet tasks`` lists the task registry; ``infonet examples`` lists the
bundled scenarios (which ``run`` also accepts by name).

Exit codes: 0 success, 2 invalid input, 3 undefined operation,
4 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path
from typing import Callable

import jsonschema

from . import (
    core, defaults, epistemic, evidence, fusion_audit, possibility, probability,
    retrieval, rough, vagueness,
)
from .errors import InfonetError, InvalidInput

SCHEMA_VERSION = 1
SIG_DIGITS = 12

# task -> (module, topic)
TASKS = {
    "bayes": ("probability", "Bayes conditioning over a partition"),
    "bn-joint": ("probability", "Bayesian-network joint as a product of local tables"),
    "entropy": ("probability", "Shannon entropy of a discrete distribution"),
    "channel": ("probability", "noisy discrete channel: output law, entropy and input posterior"),
    "ds-combine": ("evidence", "Dempster and Dubois-Prade combination, conflict weight"),
    "ds-bounds": ("evidence", "belief/plausibility, and bounds from a multivalued mapping"),
    "rough": ("rough", "lower/upper approximations from an attribute table"),
    "possibility": ("possibility", "possibility measure, conditioning, discounting, fuzzy operators"),
    "fuse": ("possibility", "multi-source possibilistic fusion"),
    "audit": ("fusion_audit", "information items and the eight fusion postulates"),
    "kripke-check": ("epistemic", "S5 and probabilistic Kripke model checking"),
    "kripke-update": ("epistemic", "probabilistic product update"),
    "prob-validity": ("epistemic", "probabilistic vs classical validity"),
    "defaults": ("defaults", "default-rule extensions and non-monotonicity"),
    "mcs": ("defaults", "maximal consistent subsets, skeptical/credulous entailment"),
    "cwa": ("defaults", "closed-world assumption"),
    "sorites": ("vagueness", "regimentations and the sorites chain"),
    "ir": ("retrieval", "constraint-based document relevance"),
    "infomorphism-check": ("core", "infomorphisms, channels and local logics"),
}

SAMPLING_TASKS = {"prob-validity"}

# ----------------------------------------------------------------- schemas

_NUM = {"type": "number"}
_STR = {"type": "string"}
_ID = {"type": ["string", "integer"]}
_NUMS = {"type": "array", "items": _NUM}
_STRS = {"type": "array", "items": _STR}
_IDS = {"type": "array", "items": _ID}
_DIST = {"type": "object", "additionalProperties": _NUM}
_MASS = {"type": "array", "minItems": 1, "items": {
    "type": "object", "required": ["set", "mass"], "additionalProperties": False,
    "properties": {"set": _IDS, "mass": _NUM}}}
_PAIRS = {"type": "array", "items": {"type": "array", "items": _ID, "minItems": 2, "maxItems": 2}}
_CLASSIFICATION = {"type": "object", "required": ["tokens"], "additionalProperties": False,
                   "properties": {"tokens": {"type": "object", "additionalProperties": _STRS},
                                  "types": _STRS}}
_KRIPKE = {"type": "object", "required": ["worlds", "relations", "valuation"], "additionalProperties": False,
           "properties": {"worlds": _STRS, "relations": {"type": "object", "additionalProperties": _PAIRS},
                          "valuation": {"type": "object", "additionalProperties": _STRS},
                          "designated": _STR, "s5": {"type": "boolean"},
                          "mu": {"type": "object", "additionalProperties": {
                              "type": "object", "additionalProperties": _DIST}}}}
_REGIMENTATION = {"type": "object", "required": ["eps", "intervals"], "additionalProperties": False,
                  "properties": {"name": _STR, "eps": _NUM, "intervals": {
                      "type": "array", "minItems": 3, "maxItems": 3, "items": {
                          "type": "array", "minItems": 2, "maxItems": 4,
                          "items": {"type": ["number", "null", "boolean"]}}}}}
_HEIGHTS = {"oneOf": [
    {"type": "object", "additionalProperties": _NUM},
    {"type": "object", "required": ["start", "stop", "step"], "additionalProperties": False,
     "properties": {"start": _NUM, "stop": _NUM, "step": _NUM, "prefix": _STR}}]}


def _obj(required, **props):
    return {"type": "object", "required": list(required), "additionalProperties": False, "properties": props}


PAYLOAD_SCHEMAS = {
    "bayes": _obj(["outcomes", "prior", "likelihoods"], outcomes=_STRS, prior=_NUMS, likelihoods=_NUMS),
    "bn-joint": _obj(["nodes"], nodes={"type": "array", "minItems": 1, "items": _obj(
        ["name", "values", "cpt"], name=_STR, values=_STRS, parents=_STRS,
        cpt={"type": "object", "additionalProperties": _NUMS})},
        assignments={"type": "array", "items": {"type": "object", "additionalProperties": _ID}}),
    "entropy": _obj(["outcomes", "probs"], outcomes=_STRS, probs=_NUMS),
    "channel": _obj(["inputs", "outputs", "matrix", "input"], inputs=_STRS, outputs=_STRS,
                    matrix={"type": "array", "items": _NUMS}, input=_NUMS, observed=_STR),
    "ds-combine": _obj(["frame", "masses"], frame=_STRS,
                       masses={"type": "array", "minItems": 2, "maxItems": 2, "items": _MASS},
                       rule={"enum": ["dempster", "dubois-prade", "both"]}),
    "ds-bounds": _obj(["frame", "queries"], frame=_STRS, mass=_MASS,
                      mapping=_obj(["outcomes", "probs", "gamma"], outcomes=_STRS, probs=_NUMS,
                                   gamma={"type": "object", "additionalProperties": _STRS}),
                      queries={"type": "array", "items": _STRS}),
    "rough": _obj(["attributes", "concepts"], csv=_STR, csv_path=_STR,
                  table={"type": "object", "additionalProperties": {"type": "object",
                                                                     "additionalProperties": _ID}},
                  attributes={"type": "array", "items": _STRS, "minItems": 1},
                  concepts={"type": "array", "items": _STRS}),
    "possibility": _obj(["universe", "pi"], universe=_STRS, pi=_NUMS, events={"type": "array", "items": _STRS},
                        condition_on=_STRS, reliability=_NUM,
                        fuzzy=_obj(["a", "b"], a=_NUMS, b=_NUMS)),
    "fuse": _obj(["universe", "sources", "mode"], universe=_STRS,
                 sources={"type": "array", "minItems": 1, "items": _NUMS},
                 mode={"enum": ["and-min", "and-product", "or-max"]}, reliabilities=_NUMS),
    "audit": _obj(["operator", "families"],
                  operator={"oneOf": [{"enum": sorted(fusion_audit.BUILTIN_OPERATORS)}, _obj(
                      ["name", "kind", "entries"], name=_STR, kind={"enum": ["possibility"]},
                      binary_only={"type": "boolean"},
                      entries={"type": "array", "items": _obj(
                          ["inputs", "output"], inputs={"type": "array", "items": _NUMS},
                          output={"type": ["array", "null"], "items": _NUM})})]},
                  families={"type": "array", "minItems": 1, "items": _obj(
                      ["worlds"], worlds=_STRS, grid=_NUM, levels=_NUMS, random={"type": "integer", "minimum": 1},
                      sources={"type": "array", "items": {"type": ["array", "object"]}})},
                  max_tuples={"type": "integer", "minimum": 1}, items={"type": "boolean"}),
    "kripke-check": _obj(["model", "formulas"], model=_KRIPKE, formulas=_STRS, worlds=_STRS),
    "kripke-update": _obj(["model", "update"], model=_KRIPKE, strict={"type": "boolean"}, formulas=_STRS,
                          update=_obj(["events", "relations", "preconditions", "pre", "mu"], events=_STRS,
                                      relations={"type": "object", "additionalProperties": _PAIRS},
                                      preconditions=_STRS, pre={"type": "array", "items": _DIST},
                                      mu={"type": "object", "additionalProperties": {
                                          "type": "object", "additionalProperties": _DIST}},
                                      designated=_STR)),
    "prob-validity": _obj(["premises", "conclusion"], premises=_STRS, conclusion=_STR,
                          samples={"type": "integer", "minimum": 1}),
    "defaults": _obj(["facts", "rules"], facts=_STRS, atoms=_STRS, queries=_STRS, added_facts=_STRS,
                     rules={"type": "array", "items": _obj(["conclusion"], name=_STR, prerequisites=_STRS,
                                                           blockers=_STRS, conclusion=_STR)}),
    "mcs": _obj(["formulas"], formulas=_STRS, atoms=_STRS, queries=_STRS),
    "cwa": _obj(["formulas"], formulas=_STRS, atoms=_STRS),
    "sorites": _obj(["heights", "regimentations", "n"], heights=_HEIGHTS,
                    variables={"type": "integer", "minimum": 2},
                    regimentations={"type": "array", "minItems": 1, "items": _REGIMENTATION},
                    n={"oneOf": [{"type": "integer"}, {"type": "array", "items": {"type": "integer"}}]}),
    "ir": _obj(["types", "edges", "documents", "queries"], types=_STRS,
               edges={"type": "array", "items": _obj(["from", "to"], **{"from": _STR, "to": _STR},
                                                      strength=_NUM, condition=_STR)},
               documents={"type": "object", "additionalProperties": _obj(["type", "infons"], type=_STR,
                                                                          infons=_STRS)},
               queries={"type": "object", "additionalProperties": _STRS}),
    "infomorphism-check": {"oneOf": [
        _obj(["source", "target", "type_map", "token_map"], source=_CLASSIFICATION, target=_CLASSIFICATION,
             type_map={"type": "object", "additionalProperties": _STR},
             token_map={"type": "object", "additionalProperties": _STR}, derive_logic={"type": "boolean"}),
        _obj(["heights", "regimentations"], heights=_HEIGHTS, regimentations={
            "type": "array", "minItems": 1, "items": _REGIMENTATION},
            arity={"type": "integer", "minimum": 1, "maximum": 2}, intensional_logic={"type": "boolean"}),
    ]},
}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["schema", "task", "payload"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "task": {"enum": sorted(TASKS)},
        "seed": {"type": "integer"},
        "description": _STR,
        "expected_exit": {"type": "integer"},
        "payload": {"type": "object"},
    },
}


def validate(scenario) -> None:
    try:
        jsonschema.validate(scenario, SCENARIO_SCHEMA)
        jsonschema.validate(scenario["payload"], PAYLOAD_SCHEMAS[scenario["task"]])
    except jsonschema.ValidationError as exc:
        where = "/".join(map(str, exc.absolute_path)) or "(root)"
        raise InvalidInput(f"scenario does not match its schema at {where}: {exc.message}") from None


# ---------------------------------------------------------------- helpers

def _dist(d) -> dict:
    return dict(zip(map(str, d.outcomes), d.probs))


def _frame_and_mass(frame_elems, mass_json):
    frame = evidence.Frame(tuple(frame_elems))
    return frame, evidence.MassFunction.from_sets(frame, [(m["set"], m["mass"]) for m in mass_json])


def _mass_json(m: evidence.MassFunction):
    return [{"set": list(s), "mass": v} for s, v in m.as_sets()]


def _heights(desc) -> dict:
    if "step" in desc and "start" in desc:
        start, stop, step = desc["start"], desc["stop"], desc["step"]
        if step <= 0:
            raise InvalidInput("height step must be positive")
        prefix = desc.get("prefix", "b")
        out, k = {}, 0
        while start + k * step <= stop + 1e-9:
            h = start + k * step
            out[f"{prefix}{h:g}"] = h
            k += 1
        return out
    return desc


def _regimentation(desc) -> vagueness.Regimentation:
    ivs = []
    for iv in desc["intervals"]:
        lo, hi = iv[0], iv[1]
        lo_closed = iv[2] if len(iv) > 2 else True
        hi_closed = iv[3] if len(iv) > 3 else True
        if not all(isinstance(x, (int, float)) or x is None for x in (lo, hi)):
            raise InvalidInput("interval bounds must be numbers or null")
        ivs.append(vagueness.Interval(lo, hi, bool(lo_closed), bool(hi_closed)))
    return vagueness.Regimentation(desc["eps"], tuple(ivs), desc.get("name", ""))


def _classification(desc) -> core.Classification:
    return core.Classification.from_table(desc["tokens"], desc.get("types", ()))


def _kripke(desc):
    rel = {i: [tuple(p) for p in pairs] for i, pairs in desc["relations"].items()}
    k = epistemic.KripkeModel(tuple(desc["worlds"]), rel, desc["valuation"],
                              desc.get("designated"), s5=desc.get("s5", False))
    if "mu" in desc:
        return epistemic.ProbabilisticKripkeModel(k, desc["mu"])
    return k


def _world_id(w) -> str:
    if isinstance(w, tuple):
        return ".".join(_world_id(x) for x in w)
    return str(w)


def _rule(desc) -> defaults.DefaultRule:
    return defaults.DefaultRule(desc.get("prerequisites", ()), desc.get("blockers", ()),
                                desc["conclusion"], desc.get("name", ""))


def _sequent_json(s: core.Sequent):
    return {"antecedents": sorted(map(str, s.antecedents)), "consequents": sorted(map(str, s.consequents))}


# --------------------------------------------------------------- handlers

def _bayes(p, ctx):
    prior = probability.DiscreteDistribution(p["outcomes"], p["prior"])
    return {"posterior": _dist(probability.bayes_posterior(prior, p["likelihoods"]))}


def _bn_joint(p, ctx):
    nodes = p["nodes"]
    net = probability.BayesNet(
        [n["name"] for n in nodes],
        {n["name"]: n["values"] for n in nodes},
        {n["name"]: n.get("parents", []) for n in nodes},
        {n["name"]: n["cpt"] for n in nodes},
    )
    joints = [{"assignment": {k: str(v) for k, v in a.items()}, "joint": probability.bn_joint(net, a)}
              for a in p.get("assignments", [])]
    total = math.fsum(probability.bn_joint(net, a) for a in net.assignments())
    return {"joints": joints, "total_over_all_assignments": total}


def _entropy(p, ctx):
    d = probability.DiscreteDistribution(p["outcomes"], p["probs"])
    return {"entropy_bits": probability.entropy(d)}


def _channel(p, ctx):
    ch = probability.DiscreteChannel(p["inputs"], p["outputs"], p["matrix"])
    d = probability.DiscreteDistribution(p["inputs"], p["input"])
    out = probability.channel_output(ch, d)
    res = {"output": _dist(out), "input_entropy_bits": probability.entropy(d),
           "output_entropy_bits": probability.entropy(out)}
    if "observed" in p:
        res["posterior"] = _dist(probability.channel_posterior(ch, d, p["observed"]))
    return res


def _ds_combine(p, ctx):
    frame, m1 = _frame_and_mass(p["frame"], p["masses"][0])
    _, m2 = _frame_and_mass(p["frame"], p["masses"][1])
    rule = p.get("rule", "dempster")
    weight = evidence.conflict_weight(m1, m2)
    res = {"conflict_mass": evidence.conflict_mass(m1, m2),
           "conflict_weight": weight, "total_conflict": math.isinf(weight)}
    if rule in ("dubois-prade", "both"):
        res["dubois_prade"] = _mass_json(evidence.dubois_prade_combine(m1, m2))
    if rule in ("dempster", "both"):
        res["dempster"] = _mass_json(evidence.dempster_combine(m1, m2))
    return res


def _ds_bounds(p, ctx):
    frame = evidence.Frame(tuple(p["frame"]))
    if ("mass" in p) == ("mapping" in p):
        raise InvalidInput("give exactly one of 'mass' or 'mapping'")
    res = {}
    if "mapping" in p:
        mp = p["mapping"]
        mm = evidence.MultivaluedMapping(probability.DiscreteDistribution(mp["outcomes"], mp["probs"]),
                                         frame, mp["gamma"])
        m = mm.induced_mass()
        res["induced_mass"] = _mass_json(m)
    else:
        m = evidence.MassFunction.from_sets(frame, [(x["set"], x["mass"]) for x in p["mass"]])
        mm = None
    rows = []
    for q in p["queries"]:
        bel, pl, ign = evidence.belief_plausibility(m, q)
        row = {"set": list(q), "belief": bel, "plausibility": pl, "ignorance": ign}
        if mm is not None:
            low, up = evidence.bounds_from_mapping(mm, q)
            row["lower_probability"], row["upper_probability"] = low, up
        rows.append(row)
    res["queries"] = rows
    return res


def _rough(p, ctx):
    sources = [k for k in ("csv", "csv_path", "table") if k in p]
    if len(sources) != 1:
        raise InvalidInput("give exactly one of 'csv', 'csv_path' or 'table'")
    if "csv" in p:
        S = rough.InformationSystem.from_csv(p["csv"])
    elif "csv_path" in p:
        path = Path(p["csv_path"])
        if not path.is_absolute() and ctx.get("base") is not None:
            path = ctx["base"] / path
        try:
            S = rough.InformationSystem.from_csv(path.read_text())
        except OSError as exc:
            raise InvalidInput(f"cannot read CSV table: {exc}") from None
    else:
        S = rough.InformationSystem.from_rows({k: {a: str(v) for a, v in r.items()}
                                               for k, r in p["table"].items()})
    order = {x: i for i, x in enumerate(S.universe)}
    key = lambda x: order[x]  # noqa: E731
    out = []
    for B in p["attributes"]:
        classes = [sorted(c, key=key) for c in rough.indiscernibility_classes(S, B)]
        concepts = []
        for X in p["concepts"]:
            ap = rough.approximate(S, B, X)
            concepts.append({"concept": list(X), "lower": sorted(ap.lower, key=key),
                             "upper": sorted(ap.upper, key=key), "boundary": sorted(ap.boundary, key=key),
                             "crisp": not ap.boundary})
        out.append({"attributes": list(B), "classes": classes, "concepts": concepts})
    return {"universe": list(S.universe), "approximations": out}


def _possibility(p, ctx):
    pi = possibility.PossibilityDistribution(p["universe"], p["pi"])
    res = {"normalized": pi.normalized}
    if "events" in p:
        res["events"] = [{"event": list(A), "possibility": possibility.possibility_of(pi, A)}
                         for A in p["events"]]
    if "condition_on" in p:
        res["conditioned"] = possibility.condition(pi, p["condition_on"]).as_dict()
    if "reliability" in p:
        res["discounted"] = possibility.discount(pi, p["reliability"]).as_dict()
    if "fuzzy" in p:
        a = possibility.FuzzySet(p["universe"], p["fuzzy"]["a"])
        b = possibility.FuzzySet(p["universe"], p["fuzzy"]["b"])
        res["fuzzy"] = {
            "intersection": list(possibility.fuzzy_combine(a, b, "min-intersection").membership),
            "union": list(possibility.fuzzy_combine(a, b, "max-union").membership),
            "complement_a": list(possibility.fuzzy_complement(a).membership),
        }
    res["item"] = fusion_audit.item_from_possibility(pi).to_dict()
    return res


def _fuse(p, ctx):
    pis = [possibility.PossibilityDistribution(p["universe"], s) for s in p["sources"]]
    if "reliabilities" in p:
        if len(p["reliabilities"]) != len(pis):
            raise InvalidInput("one reliability per source is required")
        pis = [possibility.discount(pi, lam) for pi, lam in zip(pis, p["reliabilities"])]
    out = possibility.fuse(pis, p["mode"])
    return {"fused": out.as_dict(), "normalized": out.normalized,
            "item": fusion_audit.item_from_possibility(out).to_dict()}


def _audit_family(desc, kind, seed):
    worlds = desc["worlds"]
    modes = [k for k in ("grid", "levels", "random", "sources") if k in desc]
    if len(modes) != 1:
        raise InvalidInput("a family needs exactly one of 'grid', 'levels', 'random' or 'sources'")
    mode = modes[0]
    if kind == "mass":
        if mode == "grid":
            return fusion_audit.mass_grid_family(worlds, desc["grid"])
        if mode == "random":
            if seed is None:
                raise InvalidInput("random audit families need a seed (--seed or scenario 'seed')")
            return fusion_audit.random_mass_family(worlds, desc["random"], seed)
        if mode == "sources":
            frame = evidence.Frame(tuple(worlds))
            return [evidence.MassFunction.from_sets(frame, [(m["set"], m["mass"]) for m in s])
                    for s in desc["sources"]]
        raise InvalidInput("mass families use 'grid', 'random' or 'sources'")
    if mode == "levels":
        return fusion_audit.possibility_grid_family(worlds, desc["levels"])
    if mode == "grid":
        steps = round(1 / desc["grid"])
        return fusion_audit.possibility_grid_family(worlds, [k / steps for k in range(steps + 1)])
    if mode == "sources":
        return [possibility.PossibilityDistribution(worlds, s) for s in desc["sources"]]
    raise InvalidInput("possibility families use 'grid', 'levels' or 'sources'")


def _audit(p, ctx):
    desc = p["operator"]
    if isinstance(desc, str):
        op = fusion_audit.BUILTIN_OPERATORS[desc]
    else:
        worlds = p["families"][0]["worlds"]
        entries = []
        for e in desc["entries"]:
            inputs = [possibility.PossibilityDistribution(worlds, s) for s in e["inputs"]]
            out = None if e["output"] is None else possibility.PossibilityDistribution(worlds, e["output"])
            entries.append((inputs, out))
        op = fusion_audit.table_operator(desc["name"], fusion_audit.POSSIBILITY, entries,
                                         desc.get("binary_only", False))
    families = [_audit_family(f, op.kind.name, ctx["seed"]) for f in p["families"]]
    report = fusion_audit.audit(op, families, seed=ctx["seed"] or 0,
                                max_tuples=p.get("max_tuples", 50_000))
    if p.get("items"):
        report["items"] = [[op.kind.item(s).to_dict() for s in fam] for fam in families]
    return report


def _kripke_check(p, ctx):
    M = _kripke(p["model"])
    k = M.kripke if isinstance(M, epistemic.ProbabilisticKripkeModel) else M
    worlds = p.get("worlds") or [k.designated]
    rows = []
    for f in p["formulas"]:
        row = {"formula": f}
        for w in worlds:
            if isinstance(M, epistemic.ProbabilisticKripkeModel):
                row[str(w)] = epistemic.prob_model_check(M, w, f)
            else:
                row[str(w)] = epistemic.model_check(M, w, f)
        rows.append(row)
    return {"worlds": [str(w) for w in worlds], "results": rows}


def _kripke_update(p, ctx):
    M = _kripke(p["model"])
    if not isinstance(M, epistemic.ProbabilisticKripkeModel):
        raise InvalidInput("product update needs a model with probabilities ('mu')")
    u = p["update"]
    E = epistemic.UpdateModel(tuple(u["events"]), {i: [tuple(x) for x in r] for i, r in u["relations"].items()},
                              tuple(u["preconditions"]), tuple(u["pre"]), u["mu"], u.get("designated"))
    N = epistemic.product_update(M, E, strict=p.get("strict", False))
    k = N.kripke
    res = {
        "worlds": [_world_id(w) for w in k.worlds],
        "designated": _world_id(k.designated),
        "relations": {i: sorted([_world_id(a), _world_id(b)] for a, b in r) for i, r in sorted(k.relations.items())},
        "valuation": {a: sorted(_world_id(w) for w in ext) for a, ext in sorted(k.valuation.items())},
        "mu": {i: {_world_id(w): {_world_id(v): q for v, q in d.items()} for w, d in table.items()}
               for i, table in sorted(N.mu.items())},
    }
    if "formulas" in p:
        res["results"] = [{"formula": f, "value": epistemic.prob_model_check(N, k.designated, f)}
                          for f in p["formulas"]]
    return res


def _prob_validity(p, ctx):
    return epistemic.probabilistic_validity(p["premises"], p["conclusion"], p.get("samples", 1000), ctx["seed"])


def _defaults(p, ctx):
    atoms = p.get("atoms")
    facts = defaults.PropKB.of(p["facts"], atoms)
    rules = [_rule(r) for r in p["rules"]]

    def describe(fs):
        exts = defaults.default_extensions(fs, rules)
        return [{"formulas": [str(f) for f in e.kb.formulas],
                 "applied": [rules[k].name or str(rules[k]) for k in e.applied],
                 "verified": defaults.verify_extension(fs, rules, e)} for e in exts]

    res = {"extensions": describe(facts)}
    queries = p.get("queries", [])
    res["queries"] = [{"formula": q,
                       "skeptical": defaults.default_entails(facts, rules, q, "skeptical"),
                       "credulous": defaults.default_entails(facts, rules, q, "credulous")} for q in queries]
    if "added_facts" in p:
        bigger = defaults.PropKB.of(list(p["facts"]) + list(p["added_facts"]), atoms)
        res["with_added_facts"] = {"extensions": describe(bigger)}

        def engine(kb, phi):
            return defaults.default_entails(kb, rules, phi, "skeptical")

        res["nonmonotonicity"] = defaults.cons_diff(facts, bigger, queries, engine)
    return res


def _mcs(p, ctx):
    kb = defaults.PropKB.of(p["formulas"], p.get("atoms"))
    subsets = defaults.maximal_consistent_subsets(kb)
    return {
        "consistent": defaults.is_consistent(kb),
        "subsets": [[str(f) for f in s.formulas] for s in subsets],
        "queries": [{"formula": q, "skeptical": defaults.skeptical_entails(kb, q),
                     "credulous": defaults.credulous_entails(kb, q)} for q in p.get("queries", [])],
    }


def _cwa(p, ctx):
    kb = defaults.PropKB.of(p["formulas"], p.get("atoms"))
    closed = defaults.closed_world(kb)
    return {"closed": [str(f) for f in closed.formulas],
            "added": [str(f) for f in closed.formulas[len(kb.formulas):]]}


def _scenario(p) -> vagueness.HeightScenario:
    n_vars = p.get("variables", 2)
    return vagueness.HeightScenario(_heights(p["heights"]), tuple(f"X{i}" for i in range(1, n_vars + 1)))


def _sorites(p, ctx):
    sc = _scenario(p)
    family = [_regimentation(r) for r in p["regimentations"]]
    ns = p["n"] if isinstance(p["n"], list) else [p["n"]]
    return {"objects": len(sc.objects), "reports": [vagueness.sorites_check(sc, family, n) for n in ns]}


def _ir(p, ctx):
    edges = {(e["from"], e["to"]): retrieval.Edge(e.get("strength", 1.0), e.get("condition"))
             for e in p["edges"]}
    g = retrieval.ConstraintGraph(frozenset(p["types"]), edges)
    corpus = retrieval.Corpus({d: (v["type"], v["infons"]) for d, v in p["documents"].items()}, p["queries"])
    corpus.check(g)
    return {"rankings": {q: [{"document": d, "relevance": s} for d, s in retrieval.rank(g, corpus, q)]
                         for q in sorted(corpus.queries)}}


def _infomorphism_check(p, ctx):
    width = ctx["max_width"]
    if "source" in p:
        A, B = _classification(p["source"]), _classification(p["target"])
        f = core.Infomorphism(A, B, p["type_map"], p["token_map"])
        ok, violations = core.check_infomorphism(f)
        res = {"valid": ok, "violations": [{"token": str(b), "type": str(a)} for b, a in violations]}
        if p.get("derive_logic") and ok:
            L = core.derive_local_logic(B, B.tokens, width)
            pulled = core.pullback_logic(f, L)
            res["target_logic"] = [_sequent_json(s) for s in L.sorted_constraints()]
            res["pullback_logic"] = [_sequent_json(s) for s in pulled.sorted_constraints()]
            res["pullback_normal_tokens"] = sorted(map(str, pulled.normal_tokens))
        return res
    sc = vagueness.HeightScenario(_heights(p["heights"]), ("X1", "X2"))
    family = [_regimentation(r) for r in p["regimentations"]]
    arity = p.get("arity", 2)
    ch = vagueness.regimentation_channel(sc, family, arity)
    ok, legs = core.check_channel(ch)
    res = {"core_types": sorted(ch.core.types), "core_tokens": len(ch.core.tokens), "channel_valid": ok,
           "legs": [{"regimentation": r.label(), "valid": leg["valid"], "violations": len(leg["violations"])}
                    for r, leg in zip(family, legs)]}
    if p.get("intensional_logic"):
        logics = vagueness.regimented_logics(sc, family, width, arity)
        meet = core.meet_logics(logics)
        res["regimented_logic_sizes"] = [len(L.constraints) for L in logics]
        res["intensional_logic_size"] = len(meet.constraints)
        res["regimentation_independent_examples"] = [
            _sequent_json(s) for s in meet.sorted_constraints()
            if not s.consequents and len(s.antecedents) == 2][:10]
    return res


HANDLERS: dict[str, Callable] = {
    "bayes": _bayes, "bn-joint": _bn_joint, "entropy": _entropy, "channel": _channel,
    "ds-combine": _ds_combine, "ds-bounds": _ds_bounds, "rough": _rough, "possibility": _possibility,
    "fuse": _fuse, "audit": _audit, "kripke-check": _kripke_check, "kripke-update": _kripke_update,
    "prob-validity": _prob_validity, "defaults": _defaults, "mcs": _mcs, "cwa": _cwa,
    "sorites": _sorites, "ir": _ir, "infomorphism-check": _infomorphism_check,
}


# ----------------------------------------------------------- serialization

def _clean(x):
    """JSON-ready copy with floats cut to 12 significant digits."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        y = float(f"{x:.{SIG_DIGITS}g}")
        return 0.0 if y == 0 else y
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, tuple) else _world_id(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted((_clean(v) for v in x), key=str)
    return str(x)


def _flatten(x, prefix=""):
    if isinstance(x, dict):
        if not x:
            yield f"{prefix}: {{}}"
        for k, v in x.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(x, list) and any(isinstance(v, (dict, list)) for v in x):
        for i, v in enumerate(x):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield f"{prefix}: {json.dumps(x)}"


def render(report: dict, pretty: bool = False) -> str:
    if pretty:
        return "\n".join(_flatten(report)) + "\n"
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


# ------------------------------------------------------------------ running

def execute(scenario: dict, seed=None, max_width: int = core.DEFAULT_WIDTH, base=None) -> dict:
    """Validate and run a scenario; returns the report (errors are raised)."""
    validate(scenario)
    task = scenario["task"]
    seed = scenario.get("seed") if seed is None else seed
    if task in SAMPLING_TASKS and seed is None:
        raise InvalidInput(f"task {task!r} samples randomly and needs a seed (--seed or scenario 'seed')")
    if not isinstance(max_width, int) or max_width < 1:
        raise InvalidInput("--max-width must be a positive integer")
    ctx = {"seed": seed, "max_width": max_width, "base": base}
    result = HANDLERS[task](scenario["payload"], ctx)
    report = {"schema": SCHEMA_VERSION, "task": task, "status": "ok"}
    if seed is not None:
        report["seed"] = seed
    report["result"] = result
    return _clean(report)


def bundled_scenarios() -> dict:
    """Name -> path of every scenario shipped with the package."""
    folder = resources.files("infonet") / "scenarios"
    return {p.name[:-5]: p for p in sorted(folder.iterdir(), key=lambda q: q.name) if p.name.endswith(".json")}


def load_scenario(ref: str):
    path = Path(ref)
    if path.exists():
        text, base = path.read_text(), path.parent
    else:
        bundled = bundled_scenarios()
        if ref not in bundled:
            raise InvalidInput(f"no scenario file or bundled example named {ref!r}")
        text, base = bundled[ref].read_text(), Path(str(bundled[ref])).parent
    try:
        return json.loads(text), base
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"scenario is not valid JSON: {exc}") from None


def run(ref: str, pretty: bool = False, seed=None, max_width: int = core.DEFAULT_WIDTH) -> tuple[int, str]:
    """Run a scenario file (or bundled name); returns (exit code, rendered report)."""
    task = None
    try:
        scenario, base = load_scenario(ref)
        if isinstance(scenario, dict):
            task = scenario.get("task")
        report = execute(scenario, seed=seed, max_width=max_width, base=base)
        return 0, render(report, pretty)
    except InfonetError as exc:
        report = {"schema": SCHEMA_VERSION, "task": task, "status": "error", "error": exc.to_dict()}
        return exc.exit_code, render(_clean(report), pretty)


def list_tasks() -> list:
    return [{"task": t, "module": m, "topic": topic} for t, (m, topic) in TASKS.items()]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="infonet", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario file or bundled example")
    p_run.add_argument("scenario", help="path to a scenario JSON file, or a bundled example name")
    p_run.add_argument("--seed", type=int, default=None, help="seed for sampling tasks (overrides the file)")
    p_run.add_argument("--max-width", type=int, default=core.DEFAULT_WIDTH,
                       help="bound on |antecedents| + |consequents| for derived sequents")
    p_run.add_argument("--out", default=None, help="write the report to this file instead of stdout")
    p_tasks = sub.add_parser("tasks", help="list the task registry")
    p_ex = sub.add_parser("examples", help="list bundled example scenarios")
    for p in (p_run, p_tasks, p_ex):
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="pretty", action="store_false", help="JSON output (the default)")
        fmt.add_argument("--pretty", dest="pretty", action="store_true", help="flattened human-readable table")
        p.set_defaults(pretty=False)
    args = parser.parse_args(argv)

    if args.command == "tasks":
        sys.stdout.write(render({"schema": SCHEMA_VERSION, "tasks": list_tasks()}, args.pretty))
        return 0
    if args.command == "examples":
        rows = []
        for name, path in bundled_scenarios().items():
            data = json.loads(path.read_text())
            rows.append({"name": name, "task": data["task"], "expected_exit": data.get("expected_exit", 0),
                         "description": data.get("description", "")})
        sys.stdout.write(render({"schema": SCHEMA_VERSION, "examples": rows}, args.pretty))
        return 0
    code, text = run(args.scenario, pretty=args.pretty, seed=args.seed, max_width=args.max_width)
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            sys.stderr.write(f"infonet: cannot write {args.out}: {exc}\n")
            return 2
    else:
        sys.stdout.write(text)
    if code:
        sys.stderr.write(f"infonet: exit {code}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
