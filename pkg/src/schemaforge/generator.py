"""Synthetic schema and rule generator for scalability experiments.

Eight parameters control the output: the probability that a subject or
object position holds a constant rather than a fresh variable, the sizes of
the predicate / IRI / literal vocabularies, the schema-graph size, the
number of inference rules and their antecedent length, the number of
existential rules, and the seed. Everything is drawn from one seeded RNG,
so equal configurations yield equal outputs.

Rules are chains: antecedent triples join object-to-subject, and the
consequent relates the first subject to the last object through a predicate
the rule's antecedent does not use. Half of the schema graph is seeded with
the antecedent triples of randomly selected rules (variables renamed apart,
as schema wildcards are independent); the other half is random patterns.
Each existential rule pairs a randomly chosen rule consequent, as its
antecedent, with a randomly chosen rule antecedent triple as its
consequent, which keeps the existential rules relevant to what the
inference rules can derive. The no-literal set holds exactly the subject
variables; predicates are never variables.

Duplicates (same shape up to renaming) are regenerated so the requested
counts are met exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import SchemaError
from .rules import InferenceRule
from .schema import ExistentialRule, TriplestoreSchema, pattern_shape_key
from .terms import Term, Triple, iri, lit, var

PREDICATE_NS = "urn:bench:p"
IRI_NS = "urn:bench:u"
LITERAL_STEM = "l"

_MAX_ATTEMPTS = 10_000


@dataclass(frozen=True)
class GeneratorConfig:
    pi_c: float
    p_count: int
    u_count: int
    l_count: int
    schema_size: int
    rule_count: int
    existential_count: int
    antecedent_len: int
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.pi_c <= 1.0:
            raise SchemaError("pi_c must lie in [0, 1]")
        for name in ("p_count", "u_count", "l_count", "schema_size", "rule_count", "antecedent_len"):
            if getattr(self, name) < 1:
                raise SchemaError(f"{name} must be positive")
        if self.existential_count < 0:
            raise SchemaError("existential_count must be nonnegative")
        if self.p_count < self.antecedent_len + 1:
            raise SchemaError("p_count must exceed antecedent_len for consequent predicates")


def _vocab(config: GeneratorConfig) -> tuple[list[Term], list[Term], list[Term]]:
    predicates = [iri(f"{PREDICATE_NS}{i}") for i in range(config.p_count)]
    iris = [iri(f"{IRI_NS}{i}") for i in range(config.u_count)]
    literals = [lit(f"{LITERAL_STEM}{i}") for i in range(config.l_count)]
    return predicates, iris, literals


def _chain_rule(
    rng: random.Random,
    config: GeneratorConfig,
    predicates: list[Term],
    iris: list[Term],
    literals: list[Term],
    name: str,
) -> InferenceRule:
    counter = 0

    def fresh() -> Term:
        nonlocal counter
        term = var(f"v{counter}")
        counter += 1
        return term

    antecedent: list[Triple] = []
    used_predicates: set[Term] = set()
    subject: Term = rng.choice(iris) if rng.random() < config.pi_c else fresh()
    first_subject = subject
    for i in range(config.antecedent_len):
        predicate = rng.choice(predicates)
        used_predicates.add(predicate)
        last = i == config.antecedent_len - 1
        if rng.random() < config.pi_c:
            # join positions must stay IRIs; only the final object may be a literal
            if last and rng.random() < 0.5:
                obj: Term = rng.choice(literals)
            else:
                obj = rng.choice(iris)
        else:
            obj = fresh()
        antecedent.append(Triple(subject, predicate, obj))
        subject = obj
    head_predicate = rng.choice(sorted(
        (p for p in predicates if p not in used_predicates), key=Term.sort_key
    ))
    consequent = Triple(first_subject, head_predicate, antecedent[-1].o)
    return InferenceRule.of(antecedent, [consequent], name)


def _rename_pattern_apart(t: Triple, counter: list[int]) -> Triple:
    terms = []
    for term in t:
        if term.is_variable:
            counter[0] += 1
            terms.append(var(f"s{counter[0]}"))
        else:
            terms.append(term)
    return Triple(*terms)


def _random_pattern(
    rng: random.Random,
    config: GeneratorConfig,
    predicates: list[Term],
    iris: list[Term],
    literals: list[Term],
    counter: list[int],
) -> Triple:
    def fresh() -> Term:
        counter[0] += 1
        return var(f"s{counter[0]}")

    subject = rng.choice(iris) if rng.random() < config.pi_c else fresh()
    predicate = rng.choice(predicates)
    if rng.random() < config.pi_c:
        obj = rng.choice(literals) if rng.random() < 0.5 else rng.choice(iris)
    else:
        obj = fresh()
    return Triple(subject, predicate, obj)


def _existential_rule(
    rng: random.Random, rules: list[InferenceRule]
) -> ExistentialRule:
    source = rng.choice(rules)
    (antecedent_triple,) = source.sorted_consequent()
    target = rng.choice(rules)
    consequent_triple = rng.choice(target.sorted_antecedent())

    # Shared variables survive only when both triples come from the same
    # rule; drawing from different rules yields disjoint variables.
    renaming: dict[tuple[str, int], Term] = {}

    def rename(term: Term, scope: int) -> Term:
        if not term.is_variable:
            return term
        key = (term.lexical, scope)
        if key not in renaming:
            renaming[key] = var(f"x{len(renaming)}")
        return renaming[key]

    consequent_scope = 0 if target is source else 1
    a = Triple(*(rename(x, 0) for x in antecedent_triple))
    c = Triple(*(rename(x, consequent_scope) for x in consequent_triple))
    return ExistentialRule(a, c)


def generate(config: GeneratorConfig) -> tuple[TriplestoreSchema, list[InferenceRule]]:
    """A schema and rule set drawn deterministically from the configuration."""
    rng = random.Random(config.seed)
    predicates, iris, literals = _vocab(config)

    rules: list[InferenceRule] = []
    seen_rules: set[tuple] = set()
    attempts = 0
    while len(rules) < config.rule_count:
        candidate = _chain_rule(rng, config, predicates, iris, literals, f"r{len(rules) + 1}")
        key = candidate.canonical()
        if key in seen_rules and attempts <= _MAX_ATTEMPTS:
            # redraw duplicates while the vocabulary still offers variety;
            # small vocabularies fall back to isomorphic copies
            attempts += 1
            continue
        seen_rules.add(key)
        rules.append(candidate)

    counter = [0]
    patterns: list[Triple] = []
    shapes: set[tuple] = set()

    def try_add(t: Triple) -> bool:
        key = pattern_shape_key(t, _subject_vars([t]))
        if key in shapes:
            return False
        shapes.add(key)
        patterns.append(t)
        return True

    # Half of the schema comes from rule antecedents, capped by how many
    # distinct pattern shapes the rules can supply at all.
    available = {
        pattern_shape_key(_rename_pattern_apart(t, [0]), set())
        for r in rules
        for t in r.antecedent
    }
    seeded_target = min(config.schema_size // 2, len(available))
    while len(patterns) < seeded_target:
        source = rng.choice(rules)
        for t in source.sorted_antecedent():
            if len(patterns) >= seeded_target:
                break
            try_add(_rename_pattern_apart(t, counter))
    attempts = 0
    while len(patterns) < config.schema_size:
        candidate = _random_pattern(rng, config, predicates, iris, literals, counter)
        if try_add(candidate):
            continue
        attempts += 1
        if attempts > _MAX_ATTEMPTS:
            # shape pool exhausted (e.g. pi_c = 0 with few predicates):
            # keep isomorphic copies so the requested size is met exactly
            patterns.append(candidate)

    existentials: list[ExistentialRule] = []
    seen_existentials: set[tuple] = set()
    attempts = 0
    while len(existentials) < config.existential_count:
        candidate = _existential_rule(rng, rules)
        key = candidate.canonical()
        if key in seen_existentials:
            attempts += 1
            if attempts > _MAX_ATTEMPTS:
                raise SchemaError("cannot draw enough distinct existential rules")
            continue
        seen_existentials.add(key)
        existentials.append(candidate)

    delta = _subject_vars(patterns)
    schema = TriplestoreSchema.of(patterns, delta, existentials)
    return schema, rules


def _subject_vars(patterns: list[Triple]) -> set[str]:
    return {t.s.lexical for t in patterns if t.s.is_variable}
