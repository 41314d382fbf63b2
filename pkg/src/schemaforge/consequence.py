"""Schema consequences: what a rule set can make instances look like.

Given a schema S and an inference rule r: A -> C, the basic consequence of
S by r is a schema modelling every subset of every single application r(I)
over instances I of S. It is computed by evaluating A (or a rewriting of A)
over a canonical instance of S, filtering the resulting mappings to respect
RDF's literal placement rules, and instantiating C into new schema patterns.

Two canonical instances are supported:

* the critical instance: every schema variable is replaced, in all
  combinations, by every constant of the schema and the rule plus one
  reserved placeholder IRI. Sound and complete, but exponentially large.
* the sandbox graph: every schema variable is replaced by the placeholder
  alone, giving one triple per schema pattern. The antecedent is then
  rewritten into a union query whose per-triple variants re-introduce the
  placeholder wherever a constant of A would have matched a wildcard.

Both routes feed the same filtering and expansion phases, and produce
semantically equivalent output schemas.

The full (simple) schema consequence iterates basic consequences over all
rules to a fixpoint, normalising after every round; it terminates because
only finitely many pattern shapes exist over the fixed constant pool.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .errors import CriticalInstanceTooLargeError
from .eval import (
    BudgetClock,
    build_lambda_rewriting,
    evaluate_bgp,
    evaluate_union_query,
)
from .rules import InferenceRule
from .schema import TriplestoreSchema, normalize_schema, pattern_shape_key
from .terms import (
    FreshNames,
    Graph,
    Mapping,
    Term,
    Triple,
    iri,
    pattern_consts,
)

LAMBDA_NS = "urn:lambda:"


def choose_lambda(*const_sources: Iterable[Term]) -> Term:
    """The reserved placeholder IRI, picked to be absent from all inputs."""
    taken = {t.lexical for consts in const_sources for t in consts}
    n = 0
    while f"{LAMBDA_NS}{n}" in taken:
        n += 1
    return iri(f"{LAMBDA_NS}{n}")


def lambda_for(schema: TriplestoreSchema, *rules: InferenceRule) -> Term:
    sources = [schema.constants()]
    for r in rules:
        sources.append(pattern_consts(r.antecedent) | pattern_consts(r.consequent))
    return choose_lambda(*sources)


def build_sandbox(schema: TriplestoreSchema, lam: Term | None = None) -> Graph:
    """One triple per schema pattern, every variable collapsed to the placeholder."""
    if lam is None:
        lam = choose_lambda(schema.constants())
    triples = set()
    for t in schema.graph:
        triples.add(Triple(*(lam if term.is_variable else term for term in t)))
    return Graph(triples, validate=False)


def sandbox_of_pattern(patterns: Iterable[Triple], lam: Term) -> Graph:
    """Sandbox of an arbitrary graph pattern (used for trigger checks)."""
    return Graph(
        (Triple(*(lam if term.is_variable else term for term in t)) for t in patterns),
        validate=False,
    )


def build_critical(
    schema: TriplestoreSchema,
    rule: InferenceRule,
    lam: Term | None = None,
    triple_budget: int = 10**7,
    clock: BudgetClock | None = None,
) -> Graph:
    """The critical instance of the schema for one rule.

    Every variable position ranges independently over all constants of the
    schema and the rule plus the placeholder; literals are only admitted in
    object position for variables outside the no-literal set. Constant
    positions are copied through. Size grows as |constants|^|vars|, so a
    triple budget guards construction.
    """
    if lam is None:
        lam = lambda_for(schema, rule)
    pool = sorted(
        schema.constants()
        | pattern_consts(rule.antecedent)
        | pattern_consts(rule.consequent)
        | {lam},
        key=Term.sort_key,
    )
    pool_iris = [t for t in pool if t.is_iri]
    triples: set[Triple] = set()
    for pattern in schema.sorted_patterns():
        choices: list[list[Term]] = []
        for pos, term in enumerate(pattern):
            if term.is_constant:
                choices.append([term])
            elif pos == 2 and term.lexical not in schema.no_literal:
                choices.append(pool)
            else:
                choices.append(pool_iris)
        count = 1
        for c in choices:
            count *= len(c)
        if len(triples) + count > triple_budget:
            raise CriticalInstanceTooLargeError(
                f"critical instance would exceed {triple_budget} triples"
            )
        for s, p, o in product(*choices):
            triples.add(Triple(s, p, o))
        if clock is not None:
            clock.check(every=1)
    return Graph(triples, validate=False)


def find_origin_patterns(t: Triple, schema: TriplestoreSchema) -> set[Triple]:
    """Schema patterns a canonical-instance triple can arise from.

    Positionwise: the pattern carries the same constant, or a variable for
    which the triple's term is a permitted substitute (any IRI, placeholder
    included; a literal only in object position for a variable outside the
    no-literal set).
    """
    found = set()
    for pattern in schema.graph:
        ok = True
        for pos, (p_term, value) in enumerate(zip(pattern, t)):
            if p_term.is_constant:
                if p_term != value:
                    ok = False
                    break
            elif value.is_literal and (pos < 2 or p_term.lexical in schema.no_literal):
                ok = False
                break
        if ok:
            found.add(pattern)
    return found


@dataclass(frozen=True)
class FilteredMapping:
    """A surviving mapping with its temporary no-literal annotation."""

    mapping: Mapping
    temp_no_literal: frozenset[str]


SCORE = "score"
CRITICAL = "critical"


def _rewriting_alternatives(t: Triple, lam: Term, drop_lambda_predicates: bool) -> list[Triple]:
    alts: list[Triple] = []
    for s_term in (t.s, lam):
        for p_term in (t.p, lam):
            if drop_lambda_predicates and p_term == lam and t.p != lam:
                continue
            for o_term in (t.o, lam):
                alt = Triple(s_term, p_term, o_term)
                if alt not in alts:
                    alts.append(alt)
    return alts


def filter_and_annotate(
    m: Mapping,
    antecedent: Iterable[Triple],
    consequent: Iterable[Triple],
    schema: TriplestoreSchema,
    mode: str,
    lam: Term,
    canonical: Graph,
    drop_lambda_predicates: bool = False,
) -> FilteredMapping | None:
    """The post-processing of one mapping; None means it is filtered out.

    The temporary no-literal set starts with every rule variable occurring
    in subject or predicate position of the antecedent or consequent. Each
    antecedent object position is then checked against the schema patterns
    that enabled the match: a literal with no origin permitting it rejects
    the mapping, and a placeholder-bound variable whose origins all forbid
    literals joins the temporary set. Finally a mapping binding any
    temporary-set variable to a literal is rejected.
    """
    antecedent = sorted(antecedent, key=Triple.sort_key)
    consequent = sorted(consequent, key=Triple.sort_key)
    delta_m: set[str] = set()
    for t in list(antecedent) + list(consequent):
        for term in (t.s, t.p):
            if term.is_variable:
                delta_m.add(term.lexical)

    for t_a in antecedent:
        if mode == CRITICAL:
            candidates = [t_a]
        else:
            candidates = _rewriting_alternatives(t_a, lam, drop_lambda_predicates)
        origins: set[Triple] = set()
        for t_q in candidates:
            image = m.apply_triple(t_q)
            if image in canonical:
                origins |= find_origin_patterns(image, schema)

        obj = t_a.o
        value = m.apply_term(obj)
        if value.is_literal:
            permitted = any(
                o.o == value or (o.o.is_variable and o.o.lexical not in schema.no_literal)
                for o in origins
            )
            if not permitted:
                return None
        elif obj.is_variable and value == lam:
            if not any(o.o.is_variable and o.o.lexical not in schema.no_literal for o in origins):
                delta_m.add(obj.lexical)

    for name in sorted(delta_m):
        bound = m.get(name)
        if bound is not None and bound.is_literal:
            return None
    return FilteredMapping(m, frozenset(delta_m))


def expand_schema(
    patterns: set[Triple],
    no_literal: set[str],
    fm: FilteredMapping,
    consequent: Iterable[Triple],
    lam: Term,
    fresh: FreshNames,
) -> None:
    """Add the instantiated consequent of one surviving mapping, in place.

    Placeholder-bound variables become fresh variables, one per occurrence,
    which preserves the at-most-once rule for schema-graph variables; the
    fresh variable inherits membership in the no-literal set from the
    temporary annotation of its source variable.
    """
    m = fm.mapping
    for c in sorted(consequent, key=Triple.sort_key):
        terms: list[Term] = []
        for term in c:
            value = m.apply_term(term)
            if term.is_variable and value == lam:
                f = fresh.fresh_var()
                terms.append(f)
                if term.lexical in fm.temp_no_literal:
                    no_literal.add(f.lexical)
            else:
                terms.append(value)
        patterns.add(Triple(*terms))


def basic_consequence(
    schema: TriplestoreSchema,
    rule: InferenceRule,
    mode: str = SCORE,
    lam: Term | None = None,
    fresh: FreshNames | None = None,
    triple_budget: int = 10**7,
    clock: BudgetClock | None = None,
) -> tuple[TriplestoreSchema, bool]:
    """One rule's schema consequence; the flag reports applicability.

    The output starts from the input's graph and no-literal parts with an
    empty existential set, and gains one instantiated consequent per
    surviving mapping. A rule is applicable iff at least one mapping
    survives filtering.
    """
    if mode not in (SCORE, CRITICAL):
        raise ValueError(f"unknown mode {mode!r}")
    if lam is None:
        lam = lambda_for(schema, rule)
    if fresh is None:
        fresh = FreshNames()
        fresh.observe(schema.graph)
        fresh.observe(rule.antecedent)
        fresh.observe(rule.consequent)

    drop_preds = all(t.p.is_constant for t in schema.graph)
    if mode == CRITICAL:
        canonical = build_critical(schema, rule, lam, triple_budget, clock)
        mappings = evaluate_bgp(rule.antecedent, canonical, clock)
    else:
        canonical = build_sandbox(schema, lam)
        query = build_lambda_rewriting(rule.antecedent, lam, drop_preds)
        mappings = evaluate_union_query(query, canonical, clock)

    patterns = set(schema.graph)
    no_literal = set(schema.no_literal)
    applicable = False
    for m in sorted(mappings, key=Mapping.sort_key):
        if clock is not None:
            clock.check(every=64)
        fm = filter_and_annotate(
            m, rule.antecedent, rule.consequent, schema, mode, lam, canonical, drop_preds
        )
        if fm is None:
            continue
        applicable = True
        expand_schema(patterns, no_literal, fm, rule.consequent, lam, fresh)
    out = TriplestoreSchema.of(patterns, no_literal)
    return out, applicable


@dataclass(frozen=True)
class ConsequenceResult:
    schema: TriplestoreSchema
    applicable_rules: frozenset[str]
    rounds: int


def simple_schema_consequence_report(
    schema: TriplestoreSchema,
    rules: Sequence[InferenceRule],
    mode: str = SCORE,
    triple_budget: int = 10**7,
    clock: BudgetClock | None = None,
) -> ConsequenceResult:
    """Fixpoint of basic consequences over all rules, with normalisation
    per round; also reports which rules ever fired."""
    fresh = FreshNames()
    fresh.observe(schema.graph)
    for r in rules:
        fresh.observe(r.antecedent)
        fresh.observe(r.consequent)
    lam = lambda_for(schema, *rules)

    current = normalize_schema(schema.graph_part())
    applicable: set[str] = set()
    rounds = 0
    while True:
        rounds += 1
        if clock is not None:
            clock.check(every=1)
        patterns = set(current.graph)
        no_literal = set(current.no_literal)
        for rule in rules:
            out, fired = basic_consequence(
                current, rule, mode, lam=lam, fresh=fresh, triple_budget=triple_budget, clock=clock
            )
            patterns |= out.graph
            no_literal |= out.no_literal
            if fired:
                applicable.add(rule.name)
        merged = normalize_schema(TriplestoreSchema.of(patterns, no_literal))
        if merged.graph == current.graph and merged.no_literal == current.no_literal:
            break
        current = merged
    return ConsequenceResult(current, frozenset(applicable), rounds)


def simple_schema_consequence(
    schema: TriplestoreSchema,
    rules: Sequence[InferenceRule],
    mode: str = SCORE,
    triple_budget: int = 10**7,
    clock: BudgetClock | None = None,
) -> TriplestoreSchema:
    return simple_schema_consequence_report(schema, rules, mode, triple_budget, clock).schema


def applicable_rules(
    schema: TriplestoreSchema,
    rules: Sequence[InferenceRule],
    mode: str = SCORE,
    clock: BudgetClock | None = None,
) -> frozenset[str]:
    """Names of the rules that fire on at least one instance of the schema,
    including rules enabled only by earlier consequences."""
    return simple_schema_consequence_report(schema, rules, mode, clock=clock).applicable_rules
