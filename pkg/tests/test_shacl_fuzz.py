"""Randomised stress of the shape bridge and the two consequence engines.

The schemas drawn here deliberately leave the synthetic-benchmark
distribution: constant subjects next to wildcard ones under the same
predicate, literal objects, mixed no-literal status. Three properties are
checked per case: the emitted shape document re-parses to an equivalent
schema, the reference validator agrees with the schema-side instance check
on random graphs, and the rewriting and critical-instance consequences of
a random rule stay equivalent.
"""

from __future__ import annotations

import random

import pytest

from schemaforge import (
    CRITICAL,
    SCORE,
    Graph,
    InferenceRule,
    SchemaError,
    Triple,
    TriplestoreSchema,
    basic_consequence,
    is_instance,
    iri,
    lit,
    schema_equivalent,
    var,
)
from schemaforge.shacl import ShapeDocument, schema_to_shacl, shacl_to_schema, validate_graph

IRIS = [iri("urn:f:a"), iri("urn:f:b"), iri("urn:f:c")]
LITS = [lit("1"), lit("2")]
PREDS = [iri("urn:f:p"), iri("urn:f:q")]


def random_schema(seed: int) -> TriplestoreSchema:
    rng = random.Random(seed)
    patterns: list[Triple] = []
    delta: set[str] = set()
    counter = iter(range(100))
    for _ in range(rng.randint(1, 4)):
        p = rng.choice(PREDS)
        if rng.random() < 0.4:
            s = rng.choice(IRIS)
        else:
            s = var(f"s{next(counter)}")
            delta.add(s.lexical)
        r = rng.random()
        if r < 0.25:
            o = rng.choice(IRIS)
        elif r < 0.45:
            o = rng.choice(LITS)
        else:
            o = var(f"o{next(counter)}")
            if rng.random() < 0.5:
                delta.add(o.lexical)
        patterns.append(Triple(s, p, o))
    used = {t.lexical for tr in patterns for t in tr if t.is_variable}
    return TriplestoreSchema.of(patterns, delta & used)


def random_graph(seed: int) -> Graph:
    rng = random.Random(10_000 + seed)
    triples = set()
    for _ in range(3):
        triples.add(
            Triple(
                rng.choice(IRIS),
                rng.choice(PREDS + [iri("urn:f:other")]),
                rng.choice(IRIS + LITS),
            )
        )
    return Graph(triples)


def random_rule(seed: int) -> InferenceRule | None:
    rng = random.Random(20_000 + seed)
    vs = [var("x"), var("y"), var("z")]
    body = [Triple(vs[0], rng.choice(PREDS), vs[1] if rng.random() < 0.7 else rng.choice(IRIS + LITS))]
    if rng.random() < 0.5:
        body.append(Triple(vs[1] if body[0].o == vs[1] else vs[0], rng.choice(PREDS), vs[2]))
    used = sorted({t.lexical for tr in body for t in tr if t.is_variable})
    head = Triple(var(used[0]), rng.choice(PREDS), var(used[-1]) if len(used) > 1 else rng.choice(IRIS))
    try:
        return InferenceRule.of(body, [head], "fuzz")
    except SchemaError:
        return None


@pytest.mark.parametrize("block", range(4))
def test_bridge_and_engines_on_adversarial_schemas(block):
    for seed in range(block * 50, (block + 1) * 50):
        schema = random_schema(seed)
        doc = schema_to_shacl(schema)
        reparsed = shacl_to_schema(ShapeDocument.from_text(doc.to_text()))
        assert schema_equivalent(reparsed, schema), seed
        for g_seed in range(3):
            graph = random_graph(seed * 3 + g_seed)
            assert validate_graph(graph, doc) == is_instance(graph, schema), (seed, g_seed)
        rule = random_rule(seed)
        if rule is None:
            continue
        left, _ = basic_consequence(schema, rule, SCORE)
        right, _ = basic_consequence(schema, rule, CRITICAL)
        assert schema_equivalent(left, right), seed
