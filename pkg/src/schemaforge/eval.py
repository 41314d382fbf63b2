"""Conjunctive-pattern evaluation over in-memory graphs.

Two query forms are supported: a plain basic graph pattern (a conjunction
of triple patterns) and a union query (per-triple disjunction of pattern
alternatives, conjoined across triples). The union form exists for one
purpose: rewriting a rule antecedent so that it can be evaluated over a
sandbox graph in which every schema variable has been collapsed to a single
reserved placeholder IRI. Each antecedent triple expands into the 8 variants
obtained by substituting any subset of its positions with the placeholder;
when the target graph cannot contain the placeholder in predicate position
the 4 variants that put it there are dropped.

Evaluation is a left-deep nested-loop join with index lookups on the
positions already bound. Graphs here are small (the sandbox has one triple
per schema pattern), except for critical instances where the cost explosion
is exactly the phenomenon under study, so a simple correct join is the right
tool. Results are duplicate-free sets of mappings.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BudgetExceededError
from .terms import EMPTY_MAPPING, Graph, Mapping, Term, Triple, pattern_vars


class BudgetClock:
    """Cooperative wall-clock budget. check() raises once the deadline passes.

    Checks are throttled so callers may invoke it in tight loops.
    """

    def __init__(self, seconds: float | None):
        self.deadline = None if seconds is None else time.perf_counter() + seconds
        self._ticks = 0

    def check(self, every: int = 1024) -> None:
        if self.deadline is None:
            return
        self._ticks += 1
        if self._ticks % every == 0 and time.perf_counter() > self.deadline:
            raise BudgetExceededError("wall-clock budget exceeded")

    def expired(self) -> bool:
        return self.deadline is not None and time.perf_counter() > self.deadline


def _goal_selectivity(t: Triple, bound: set[str]) -> int:
    score = 0
    for term in t:
        if term.is_constant or (term.is_variable and term.lexical in bound):
            score += 1
    return score


def _join(
    goals: Sequence[tuple[Triple, Graph]],
    clock: BudgetClock | None = None,
) -> set[Mapping]:
    """All mappings sending every goal pattern into its paired graph."""
    results: set[Mapping] = set()
    n = len(goals)

    def extend(binding: dict[str, Term], remaining: list[tuple[Triple, Graph]]) -> None:
        if clock is not None:
            clock.check()
        if not remaining:
            results.add(Mapping.of(binding))
            return
        # Pick the most-bound goal next; ties keep list order (deterministic).
        bound = set(binding)
        best = max(range(len(remaining)), key=lambda i: (_goal_selectivity(remaining[i][0], bound), -i))
        pattern, graph = remaining[best]
        rest = remaining[:best] + remaining[best + 1 :]

        lookup = []
        for term in pattern:
            if term.is_constant:
                lookup.append(term)
            elif term.lexical in binding:
                lookup.append(binding[term.lexical])
            else:
                lookup.append(None)
        for t in graph.match(*lookup):
            new = dict(binding)
            ok = True
            for term, value in zip(pattern, t):
                if term.is_variable and term.lexical not in binding:
                    prior = new.get(term.lexical)
                    if prior is not None and prior != value:
                        ok = False
                        break
                    new[term.lexical] = value
            if ok:
                extend(new, rest)

    extend({}, list(goals))
    return results if n else {EMPTY_MAPPING}


def evaluate_bgp(
    patterns: Iterable[Triple],
    graph: Graph,
    clock: BudgetClock | None = None,
) -> set[Mapping]:
    """All mappings m with domain vars(P) and m(P) contained in the graph.

    A ground pattern contained in the graph yields the singleton set holding
    the empty mapping; an empty pattern likewise.
    """
    goals = [(t, graph) for t in sorted(patterns, key=Triple.sort_key)]
    if not goals:
        return {EMPTY_MAPPING}
    return _join(goals, clock)


def matches(patterns: Iterable[Triple], graph: Graph) -> bool:
    """True iff the pattern's evaluation over the graph is nonempty."""
    return bool(evaluate_bgp(patterns, graph))


@dataclass(frozen=True)
class UnionEntry:
    """One antecedent triple with its placeholder-substituted alternatives."""

    source: Triple
    alternatives: tuple[Triple, ...]


@dataclass(frozen=True)
class UnionQuery:
    """Conjunction over entries, disjunction over each entry's alternatives."""

    entries: tuple[UnionEntry, ...]
    variables: frozenset[str]


def build_lambda_rewriting(
    antecedent: Iterable[Triple],
    lam: Term,
    drop_lambda_predicates: bool = False,
) -> UnionQuery:
    """Expand each triple into its placeholder variants.

    ``drop_lambda_predicates`` applies the optimisation that is sound when
    the target graph has no placeholder in predicate position (schemas with
    constant predicates): variants with the placeholder as predicate can
    never match and are omitted.
    """
    source = sorted(antecedent, key=Triple.sort_key)
    entries = []
    for t in source:
        alts: list[Triple] = []
        for s_term in (t.s, lam):
            for p_term in (t.p, lam):
                if drop_lambda_predicates and p_term == lam and t.p != lam:
                    continue
                for o_term in (t.o, lam):
                    alt = Triple(s_term, p_term, o_term)
                    if alt not in alts:
                        alts.append(alt)
        entries.append(UnionEntry(t, tuple(alts)))
    return UnionQuery(tuple(entries), frozenset(pattern_vars(source)))


def evaluate_union_query(
    query: UnionQuery,
    graph: Graph,
    clock: BudgetClock | None = None,
) -> set[Mapping]:
    """Union over all alternative choices, one alternative per entry.

    Only mappings that bind every variable of the source antecedent are
    kept; a choice that substitutes away a variable's last occurrence
    produces partial mappings, which are discarded.
    """
    results: set[Mapping] = set()

    def extend(binding: dict[str, Term], idx: int) -> None:
        if clock is not None:
            clock.check()
        if idx == len(query.entries):
            if query.variables <= set(binding):
                results.add(Mapping.of({k: v for k, v in binding.items() if k in query.variables}))
            return
        entry = query.entries[idx]
        for pattern in entry.alternatives:
            lookup = []
            for term in pattern:
                if term.is_constant:
                    lookup.append(term)
                elif term.lexical in binding:
                    lookup.append(binding[term.lexical])
                else:
                    lookup.append(None)
            for t in graph.match(*lookup):
                new = dict(binding)
                ok = True
                for term, value in zip(pattern, t):
                    if term.is_variable and term.lexical not in binding:
                        prior = new.get(term.lexical)
                        if prior is not None and prior != value:
                            ok = False
                            break
                        new[term.lexical] = value
                if ok:
                    extend(new, idx + 1)

    extend({}, 0)
    if not query.entries:
        return {EMPTY_MAPPING}
    return results
