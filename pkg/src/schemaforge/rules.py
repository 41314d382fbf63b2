"""Datalog rule application, closure, and the existential chase.

Inference rules are plain datalog: conjunctive antecedent and consequent,
no existential variables, every consequent triple with a constant predicate
and distinct subject/object variables. A single application of a rule adds
the instantiated consequent for every antecedent match, keeping only
instantiations that are valid RDF graphs. The closure applies all rules to
a fixpoint; it terminates because rules never invent constants.

Closure is computed with delta-driven (semi-naive) evaluation: in each
round, at least one antecedent triple must match a triple derived in the
previous round. The direct-from-definition naive iteration is kept behind
a flag as the testing oracle.

The chase extends a ground graph until every existential rule is satisfied,
inventing one fresh IRI per residual consequent variable. Termination is
only guaranteed for weakly acyclic rule sets, so a step bound guards the
loop and a diagnostic error names the likely cause when it trips.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ChaseNonterminationError, SchemaError
from .eval import BudgetClock, _join, evaluate_bgp
from .schema import ExistentialRule
from .terms import (
    FreshNames,
    Graph,
    Mapping,
    Term,
    Triple,
    is_valid_pattern,
    is_valid_rdf_graph,
    pattern_vars,
)


@dataclass(frozen=True)
class InferenceRule:
    antecedent: frozenset[Triple]
    consequent: frozenset[Triple]
    name: str = ""

    def __post_init__(self) -> None:
        for t in self.antecedent:
            if not is_valid_pattern(t):
                raise SchemaError(f"rule {self.name or '?'}: ill-formed antecedent triple {t!r}")
        for t in self.consequent:
            if not is_valid_pattern(t):
                raise SchemaError(f"rule {self.name or '?'}: ill-formed consequent triple {t!r}")
            if not t.p.is_constant:
                raise SchemaError(f"rule {self.name or '?'}: consequent predicate must be constant: {t!r}")
            if t.s.is_variable and t.s == t.o:
                raise SchemaError(
                    f"rule {self.name or '?'}: consequent triple repeats a variable in subject and object: {t!r}"
                )
        missing = pattern_vars(self.consequent) - pattern_vars(self.antecedent)
        if missing:
            raise SchemaError(
                f"rule {self.name or '?'}: consequent variables {sorted(missing)} not bound by the antecedent"
            )

    @staticmethod
    def of(antecedent: Iterable[Triple], consequent: Iterable[Triple], name: str = "") -> "InferenceRule":
        return InferenceRule(frozenset(antecedent), frozenset(consequent), name)

    def sorted_antecedent(self) -> list[Triple]:
        return sorted(self.antecedent, key=Triple.sort_key)

    def sorted_consequent(self) -> list[Triple]:
        return sorted(self.consequent, key=Triple.sort_key)

    def canonical(self) -> tuple:
        names: dict[str, str] = {}

        def key(term: Term) -> tuple:
            if term.is_variable:
                return ("v", names.setdefault(term.lexical, f"x{len(names)}"))
            return ("c", term.kind, term.lexical)

        return (
            tuple(tuple(key(x) for x in t) for t in self.sorted_antecedent()),
            tuple(tuple(key(x) for x in t) for t in self.sorted_consequent()),
        )


def apply_rule(rule: InferenceRule, graph: Graph, clock: BudgetClock | None = None) -> Graph:
    """One rule application: the graph plus every valid instantiated consequent."""
    added: set[Triple] = set()
    for m in evaluate_bgp(rule.antecedent, graph, clock):
        instantiated = m.apply(rule.consequent)
        if is_valid_rdf_graph(instantiated):
            added |= instantiated
    return graph.union(added)


def _rule_matches_seminaive(
    rule: InferenceRule, full: Graph, delta: Graph, clock: BudgetClock | None
) -> set[Mapping]:
    """Matches of the antecedent using at least one delta triple.

    Realised as the union over which antecedent triple is forced into the
    delta; duplicates collapse in the result set.
    """
    antecedent = rule.sorted_antecedent()
    found: set[Mapping] = set()
    for i in range(len(antecedent)):
        goals = [(t, delta if j == i else full) for j, t in enumerate(antecedent)]
        found |= _join(goals, clock)
    return found


def closure(
    graph: Graph,
    rules: Sequence[InferenceRule],
    naive: bool = False,
    clock: BudgetClock | None = None,
) -> Graph:
    """Least fixpoint of applying all rules.

    ``naive=True`` switches to the direct definition (re-evaluate every rule
    against the whole graph each round); it is the oracle the semi-naive
    path is tested against.
    """
    current: set[Triple] = set(graph.triples)
    delta: set[Triple] = set(graph.triples)
    while delta:
        if clock is not None:
            clock.check(every=1)
        full_graph = Graph(current, validate=False)
        delta_graph = Graph(delta, validate=False)
        new: set[Triple] = set()
        for rule in rules:
            if naive:
                mappings = evaluate_bgp(rule.antecedent, full_graph, clock)
            else:
                mappings = _rule_matches_seminaive(rule, full_graph, delta_graph, clock)
            for m in sorted(mappings, key=Mapping.sort_key):
                instantiated = m.apply(rule.consequent)
                if is_valid_rdf_graph(instantiated):
                    new |= instantiated
        delta = new - current
        current |= delta
    return Graph(current, validate=False)


def _match_single(pattern: Triple, triples: set[Triple]) -> list[Mapping]:
    """Matches of one pattern against a plain triple set (chase inner loop)."""
    out = []
    for t in triples:
        bound: dict[str, Term] = {}
        ok = True
        for p_term, value in zip(pattern, t):
            if p_term.is_constant:
                if p_term != value:
                    ok = False
                    break
            else:
                prior = bound.get(p_term.lexical)
                if prior is not None and prior != value:
                    ok = False
                    break
                bound[p_term.lexical] = value
        if ok:
            out.append(Mapping.of(bound))
    return out


def chase_existentials(
    graph: Graph,
    rules: Iterable[ExistentialRule],
    fresh: FreshNames,
    max_steps: int | None = None,
) -> Graph:
    """Extend the graph until every existential rule is satisfied.

    For each antecedent match whose instantiated consequent has no match in
    the current graph, the consequent is added with every residual variable
    bound to a fresh IRI. The default step bound is quadratic in the input
    size; exceeding it raises, flagging a non-weakly-acyclic rule set.
    """
    rule_list = sorted(rules, key=ExistentialRule.sort_key)
    current: set[Triple] = set(graph.triples)
    if max_steps is None:
        max_steps = 10 * (len(current) + len(rule_list) + 1) ** 2
    steps = 0
    changed = True
    while changed:
        changed = False
        for rule in rule_list:
            for m in sorted(_match_single(rule.antecedent, current), key=Mapping.sort_key):
                consequent = m.apply_triple(rule.consequent)
                if _match_single(consequent, current):
                    continue
                grounding = {
                    name: fresh.fresh_iri()
                    for name in sorted(pattern_vars([consequent]))
                }
                witness = Mapping.of(grounding).apply_triple(consequent)
                if not (witness.s.is_iri and witness.p.is_iri):
                    # No valid RDF witness can exist (literal forced into the
                    # subject or predicate); the violation is left standing.
                    continue
                current.add(witness)
                changed = True
                steps += 1
                if steps > max_steps:
                    raise ChaseNonterminationError(
                        f"chase exceeded {max_steps} steps; the existential rules are "
                        "likely not weakly acyclic"
                    )
    return Graph(current, validate=False)
