"""Triplestore schemas: instance checking, violations, containment.

A triplestore schema is a triple of parts: a schema graph (triple patterns
whose variables are independent wildcards, each occurring at most once), a
no-literal set (variables that may not be instantiated by literals, which
must cover every subject- and predicate-position variable), and a set of
existential rules (single-atom if-then constraints on instances).

A graph is an instance of a schema when every triple instantiates some
schema pattern without binding a no-literal variable to a literal, and no
existential rule is violated. An existential rule a -> c is violated on a
graph when some match of a has no match of the correspondingly instantiated
c; a ground instantiated consequent counts as matched exactly when it is in
the graph.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import product
from typing import Iterable

from .errors import SchemaError
from .eval import evaluate_bgp
from .terms import (
    Graph,
    Mapping,
    Term,
    Triple,
    is_valid_pattern,
    iri,
    lit,
    pattern_consts,
    pattern_vars,
    var,
)


@dataclass(frozen=True)
class ExistentialRule:
    """Single-atom if-then constraint: whenever ``antecedent`` matches, a
    matching instantiation of ``consequent`` must exist."""

    antecedent: Triple
    consequent: Triple

    def __post_init__(self) -> None:
        for t in (self.antecedent, self.consequent):
            if not is_valid_pattern(t):
                raise SchemaError(f"ill-formed pattern in existential rule: {t!r}")

    def canonical(self) -> tuple:
        """Shape up to variable renaming, for set comparison and dedup."""
        names: dict[str, str] = {}

        def key(term: Term) -> tuple:
            if term.is_variable:
                name = names.setdefault(term.lexical, f"x{len(names)}")
                return ("v", name)
            return ("c", term.kind, term.lexical)

        return tuple(key(t) for t in self.antecedent) + tuple(key(t) for t in self.consequent)

    def sort_key(self) -> tuple:
        return self.canonical()


@dataclass(frozen=True)
class Violation:
    """A witness that an existential rule fails on a graph."""

    mapping: Mapping
    rule: ExistentialRule

    def sort_key(self) -> tuple:
        return (self.rule.sort_key(), self.mapping.sort_key())


@dataclass(frozen=True)
class TriplestoreSchema:
    graph: frozenset[Triple]
    no_literal: frozenset[str]
    existentials: frozenset[ExistentialRule] = frozenset()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for t in self.graph:
            if not is_valid_pattern(t):
                raise SchemaError(f"ill-formed schema pattern: {t!r}")
            for term in t:
                if term.is_variable:
                    if term.lexical in seen:
                        raise SchemaError(
                            f"variable ?{term.lexical} occurs more than once in the schema graph"
                        )
                    seen.add(term.lexical)
        if not self.no_literal <= seen:
            extra = sorted(self.no_literal - seen)
            raise SchemaError(f"no-literal set names unknown variables: {extra}")
        for t in self.graph:
            for term in (t.s, t.p):
                if term.is_variable and term.lexical not in self.no_literal:
                    raise SchemaError(
                        f"subject/predicate variable ?{term.lexical} missing from the no-literal set"
                    )

    @staticmethod
    def of(
        patterns: Iterable[Triple],
        no_literal: Iterable[str] = (),
        existentials: Iterable[ExistentialRule] = (),
    ) -> "TriplestoreSchema":
        return TriplestoreSchema(frozenset(patterns), frozenset(no_literal), frozenset(existentials))

    def sorted_patterns(self) -> list[Triple]:
        return sorted(self.graph, key=Triple.sort_key)

    def sorted_existentials(self) -> list[ExistentialRule]:
        return sorted(self.existentials, key=ExistentialRule.sort_key)

    def constants(self) -> set[Term]:
        return pattern_consts(self.graph)

    def variables(self) -> set[str]:
        return pattern_vars(self.graph)

    def graph_part(self) -> "TriplestoreSchema":
        """The schema with its existential rules dropped."""
        return replace(self, existentials=frozenset())


def triple_instantiates(t: Triple, pattern: Triple, delta: frozenset[str] | set[str]) -> bool:
    """True iff some mapping sends the pattern to ``t`` without binding a
    no-literal variable to a literal."""
    bound: dict[str, Term] = {}
    for p_term, value in zip(pattern, t):
        if p_term.is_constant:
            if p_term != value:
                return False
        else:
            if value.is_literal and p_term.lexical in delta:
                return False
            prior = bound.get(p_term.lexical)
            if prior is not None and prior != value:
                return False
            bound[p_term.lexical] = value
    return True


def instantiates_some(t: Triple, schema: TriplestoreSchema) -> bool:
    return any(triple_instantiates(t, p, schema.no_literal) for p in schema.graph)


def violations(rules: Iterable[ExistentialRule], graph: Graph) -> frozenset[Violation]:
    """All pairs of a rule and an antecedent match with no consequent witness.

    Residual variables of the instantiated consequent are evaluated as a
    pattern, so any witness triple satisfies the rule.
    """
    found: set[Violation] = set()
    for rule in rules:
        for m in evaluate_bgp([rule.antecedent], graph):
            consequent = m.apply_triple(rule.consequent)
            if not evaluate_bgp([consequent], graph):
                found.add(Violation(m, rule))
    return frozenset(found)


def is_instance(graph: Graph, schema: TriplestoreSchema) -> bool:
    """Instance check: pattern coverage plus existential-rule satisfaction."""
    if any(not instantiates_some(t, schema) for t in graph):
        return False
    return not violations(schema.existentials, graph)


# ---------------------------------------------------------------------------
# Containment and equivalence of the graph/no-literal parts.
#
# Schema variables are independent wildcards, so a finite set of
# representative instantiations decides containment: each variable is
# replaced by every constant both schemas mention, by one fresh IRI, and
# (for literal-permitting object variables) by one fresh literal. A pattern
# is covered iff every representative instantiates the other schema.
# ---------------------------------------------------------------------------


def _fresh_probe_terms(pool: set[Term]) -> tuple[Term, Term]:
    taken = {t.lexical for t in pool}
    n = 0
    while f"urn:probe:{n}" in taken:
        n += 1
    probe_iri = iri(f"urn:probe:{n}")
    n = 0
    while f"probe-{n}" in taken:
        n += 1
    return probe_iri, lit(f"probe-{n}")


def _representatives(pattern: Triple, schema: TriplestoreSchema, pool_iris: list[Term],
                     pool_lits: list[Term], probe_iri: Term, probe_lit: Term) -> Iterable[Triple]:
    choices: list[list[Term]] = []
    for pos, term in enumerate(pattern):
        if term.is_constant:
            choices.append([term])
        elif pos < 2 or term.lexical in schema.no_literal:
            choices.append(pool_iris + [probe_iri])
        else:
            choices.append(pool_iris + [probe_iri] + pool_lits + [probe_lit])
    for s, p, o in product(*choices):
        yield Triple(s, p, o)


def schema_contains(s1: TriplestoreSchema, s2: TriplestoreSchema) -> bool:
    """True iff every instance of s1's graph part is an instance of s2's.

    Existential rules are ignored on both sides. Inputs are normalised
    first, which preserves the instance sets and keeps the representative
    enumeration small even for machine-built schemas full of subsumed
    patterns.
    """
    s1 = normalize_schema(s1.graph_part())
    s2 = normalize_schema(s2.graph_part())
    pool = pattern_consts(s1.graph) | pattern_consts(s2.graph)
    pool_iris = sorted((t for t in pool if t.is_iri), key=Term.sort_key)
    pool_lits = sorted((t for t in pool if t.is_literal), key=Term.sort_key)
    probe_iri, probe_lit = _fresh_probe_terms(pool)
    target = s2.graph_part()
    for pattern in s1.sorted_patterns():
        for rep in _representatives(pattern, s1, pool_iris, pool_lits, probe_iri, probe_lit):
            if not instantiates_some(rep, target):
                return False
    return True


def existentials_equal(e1: Iterable[ExistentialRule], e2: Iterable[ExistentialRule]) -> bool:
    return {e.canonical() for e in e1} == {e.canonical() for e in e2}


def schema_equivalent(s1: TriplestoreSchema, s2: TriplestoreSchema) -> bool:
    """Containment both ways; existential sets compared up to renaming."""
    return (
        existentials_equal(s1.existentials, s2.existentials)
        and schema_contains(s1, s2)
        and schema_contains(s2, s1)
    )


# ---------------------------------------------------------------------------
# Normalisation: canonical variable names plus removal of patterns that are
# positionwise subsumed by another pattern of the same schema.
# ---------------------------------------------------------------------------


def pattern_shape_key(t: Triple, delta: Iterable[str]) -> tuple:
    """Identity of a pattern up to variable renaming (no-literal aware)."""
    d = set(delta)
    key = []
    for term in t:
        if term.is_variable:
            key.append(("v", term.lexical in d))
        else:
            key.append(("c", term.kind, term.lexical))
    return tuple(key)


def pattern_subsumed(p: Triple, q: Triple, delta: set[str] | frozenset[str]) -> bool:
    """Every instantiation of p is an instantiation of q (within one schema)."""
    for pos, (pt, qt) in enumerate(zip(p, q)):
        if qt == pt:
            continue
        if not qt.is_variable:
            return False
        q_nolit = qt.lexical in delta
        if pt.is_iri:
            continue
        if pt.is_literal:
            if pos == 2 and not q_nolit:
                continue
            return False
        # pt is a (different) variable
        if not q_nolit or pt.lexical in delta:
            continue
        return False
    return True


def normalize_schema(schema: TriplestoreSchema) -> TriplestoreSchema:
    """Equivalent schema with canonical names and no subsumed patterns.

    Idempotent; two schemas are equal after normalisation iff their maximal
    pattern sets coincide up to renaming.
    """
    delta = schema.no_literal
    by_key: dict[tuple, Triple] = {}
    for t in sorted(schema.graph, key=Triple.sort_key):
        by_key.setdefault(pattern_shape_key(t, delta), t)
    unique = list(by_key.values())
    kept = [
        p
        for p in unique
        if not any(q is not p and pattern_subsumed(p, q, delta) for q in unique)
    ]
    kept.sort(key=lambda t: pattern_shape_key(t, delta))

    counter = 0
    new_patterns: list[Triple] = []
    new_delta: set[str] = set()
    for t in kept:
        terms = []
        for term in t:
            if term.is_variable:
                counter += 1
                name = f"v{counter}"
                terms.append(var(name))
                if term.lexical in delta:
                    new_delta.add(name)
            else:
                terms.append(term)
        new_patterns.append(Triple(*terms))

    new_existentials = []
    seen_canon = set()
    for e in schema.sorted_existentials():
        names: dict[str, str] = {}

        def rename(term: Term) -> Term:
            if term.is_variable:
                return var(names.setdefault(term.lexical, f"e{len(names) + 1}"))
            return term

        canon = ExistentialRule(
            Triple(*(rename(x) for x in e.antecedent)),
            Triple(*(rename(x) for x in e.consequent)),
        )
        if canon.canonical() not in seen_canon:
            seen_canon.add(canon.canonical())
            new_existentials.append(canon)

    return TriplestoreSchema.of(new_patterns, new_delta, new_existentials)
