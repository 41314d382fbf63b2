"""Schema model: instantiation, violations, containment, normalisation."""

from __future__ import annotations

import itertools

import pytest

from schemaforge import (
    ExistentialRule,
    Graph,
    Mapping,
    SchemaError,
    Triple,
    TriplestoreSchema,
    Violation,
    closure,
    iri,
    is_instance,
    lit,
    normalize_schema,
    schema_contains,
    schema_equivalent,
    triple_instantiates,
    var,
    violations,
)
from schemaforge.schema import instantiates_some

from conftest import (
    CARRIED_BY,
    HAS_RESULT,
    PERSONNEL_TAG,
    RDF_TYPE,
    WID1,
    WID2,
    O1,
    O3,
)

A = iri("urn:s:a")
B = iri("urn:s:b")
P = iri("urn:s:p")
Q = iri("urn:s:q")


def test_schema_invariants_enforced():
    with pytest.raises(SchemaError):
        # variable occurs twice in the schema graph
        TriplestoreSchema.of(
            [Triple(var("x"), P, var("y")), Triple(var("x"), Q, var("z"))],
            {"x", "y", "z"},
        )
    with pytest.raises(SchemaError):
        # subject variable missing from the no-literal set
        TriplestoreSchema.of([Triple(var("x"), P, var("y"))], set())
    with pytest.raises(SchemaError):
        # no-literal set naming an unknown variable
        TriplestoreSchema.of([Triple(var("x"), P, B)], {"x", "ghost"})


def test_triple_instantiates_cases(schema_s1):
    pattern = Triple(var("v9"), HAS_RESULT, var("v10"))
    assert triple_instantiates(Triple(O1, HAS_RESULT, WID1), pattern, {"v9"})
    assert triple_instantiates(Triple(O3, HAS_RESULT, lit("1")), pattern, {"v9"})
    assert not triple_instantiates(Triple(O3, HAS_RESULT, lit("1")), pattern, {"v9", "v10"})


def test_instance_checks_for_running_example(schema_s1, rules_r1, instance_i1):
    assert is_instance(instance_i1, schema_s1)
    closed = closure(instance_i1, rules_r1)
    assert not is_instance(closed, schema_s1)
    assert is_instance(Graph(), schema_s1)


def test_violations_on_running_example(schema_s1, rules_r1, instance_i1):
    (e1,) = schema_s1.sorted_existentials()
    assert violations([e1], instance_i1) == frozenset()
    closed = closure(instance_i1, rules_r1)
    got = violations([e1], closed)
    assert got == frozenset({Violation(Mapping.of({"x1": WID2}), e1)})
    assert violations([], closed) == frozenset()


def test_violation_with_residual_variable_searches_for_witness():
    e = ExistentialRule(Triple(var("x"), RDF_TYPE, PERSONNEL_TAG), Triple(var("x"), CARRIED_BY, var("y")))
    satisfied = Graph([Triple(WID1, RDF_TYPE, PERSONNEL_TAG), Triple(WID1, CARRIED_BY, lit("alex"))])
    assert violations([e], satisfied) == frozenset()


def test_subset_closure_of_graph_part(schema_s1, instance_i1):
    graph_only = schema_s1.graph_part()
    triples = instance_i1.sorted_triples()
    for size in (0, 1, 5, len(triples)):
        for combo in itertools.islice(itertools.combinations(triples, size), 20):
            assert is_instance(Graph(combo), graph_only)


# --- containment ------------------------------------------------------------


def test_containment_positionwise():
    narrow = TriplestoreSchema.of([Triple(A, P, var("v"))], {"v"})
    wide = TriplestoreSchema.of([Triple(var("u"), P, var("w"))], {"u", "w"})
    assert schema_contains(narrow, wide)
    assert not schema_contains(wide, narrow)


def test_containment_literal_objects_matter():
    lit_ok = TriplestoreSchema.of([Triple(var("u"), P, var("w"))], {"u"})
    iri_only = TriplestoreSchema.of([Triple(var("x"), P, var("y"))], {"x", "y"})
    assert not schema_contains(lit_ok, iri_only)
    assert schema_contains(iri_only, lit_ok)


def test_containment_brute_force_oracle():
    """Compare against enumerating all graphs of <= 2 triples over a small
    universe extended with the schemas' constants."""

    def instances_leq2(universe):
        yield Graph()
        for t in universe:
            yield Graph([t])
        for pair in itertools.combinations(universe, 2):
            yield Graph(pair)

    schemas = [
        TriplestoreSchema.of([Triple(A, P, var("v"))], {"v"}),
        TriplestoreSchema.of([Triple(A, P, var("v"))], set()),
        TriplestoreSchema.of([Triple(var("u"), P, var("w"))], {"u", "w"}),
        TriplestoreSchema.of([Triple(var("u"), P, var("w"))], {"u"}),
        TriplestoreSchema.of([Triple(var("u"), P, B)], {"u"}),
        TriplestoreSchema.of([Triple(A, P, B), Triple(var("u"), Q, var("w"))], {"u"}),
    ]
    iris = [A, B, iri("urn:s:f")]
    lits = [lit("l")]
    universe = [
        Triple(s, p, o)
        for s in iris
        for p in (P, Q)
        for o in iris + lits
    ]
    for s1 in schemas:
        for s2 in schemas:
            oracle = all(
                is_instance(g, s2.graph_part())
                for g in instances_leq2(universe)
                if is_instance(g, s1.graph_part())
            )
            assert schema_contains(s1, s2) == oracle, (s1, s2)


def test_equivalence_modulo_renaming(schema_s1):
    renamed = normalize_schema(schema_s1)
    assert schema_equivalent(schema_s1, renamed)
    smaller = TriplestoreSchema.of(
        [t for t in schema_s1.graph if t.p != RDF_TYPE],
        {n for n in schema_s1.no_literal if n not in {"v3", "v4"}},
        schema_s1.existentials,
    )
    assert not schema_equivalent(schema_s1, smaller)


# --- normalisation ----------------------------------------------------------


def test_normalize_removes_subsumed_pattern():
    s = TriplestoreSchema.of(
        [Triple(A, P, var("u")), Triple(var("x"), P, var("y"))],
        {"u", "x", "y"},
    )
    n = normalize_schema(s)
    assert len(n.graph) == 1
    (kept,) = n.graph
    assert kept.s.is_variable and kept.o.is_variable


def test_normalize_collapses_duplicates_modulo_renaming():
    s = TriplestoreSchema.of(
        [Triple(var("a"), P, var("b")), Triple(var("c"), P, var("d"))],
        {"a", "b", "c", "d"},
    )
    assert len(normalize_schema(s).graph) == 1


def test_normalize_is_idempotent(schema_s1):
    once = normalize_schema(schema_s1)
    assert normalize_schema(once) == once
    assert schema_equivalent(once, schema_s1)


def test_normalize_keeps_literal_distinctions():
    s = TriplestoreSchema.of(
        [Triple(var("x"), P, var("y")), Triple(var("u"), P, lit("1"))],
        {"x", "y", "u"},
    )
    n = normalize_schema(s)
    # the literal-object pattern is not subsumed: ?y is no-literal
    assert len(n.graph) == 2
