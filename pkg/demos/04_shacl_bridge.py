#!/usr/bin/env python3
"""Shapes in, shapes out.

Triplestore schemas abstract away from SHACL syntax; this script shows the
bridge in both directions. The shipped shape document (value constraints,
one minimum-cardinality property shape, a closed-vocabulary declaration)
becomes a schema; the schema goes back to shapes; and re-parsing those
yields an equivalent schema. A small reference validator for the supported
fragment double-checks that translation preserves which graphs are valid.
"""

from __future__ import annotations

from pathlib import Path

from schemaforge import Graph, Triple, closure, is_instance, iri, lit, schema_equivalent
from schemaforge.formats import parse_graph, parse_rules, serialize_schema
from schemaforge.shacl import ShapeDocument, schema_to_shacl, shacl_to_schema, validate_graph

DATA = Path(__file__).resolve().parent / "data"
EX = "http://example.org/mine#"


def main() -> None:
    doc = ShapeDocument.from_text((DATA / "mine.shapes.ttl").read_text(), "mine.shapes.ttl")
    schema = shacl_to_schema(doc)

    print("== shapes to schema ==")
    print(serialize_schema(schema, doc.prefix_map()))

    print("== schema back to shapes (excerpt) ==")
    emitted = schema_to_shacl(schema)
    lines = emitted.to_text().splitlines()
    print("\n".join(lines[:24]))
    print(f"... {len(lines)} lines total")

    again = shacl_to_schema(ShapeDocument.from_text(emitted.to_text()))
    print(f"\nround trip is equivalent: {schema_equivalent(again, schema)}")

    print("\n== validation agreement on assorted graphs ==")
    instance, _ = parse_graph((DATA / "mine.instance.nt").read_text())
    rules, _ = parse_rules((DATA / "mine.rules.rq").read_text())
    cases = {
        "the shipped instance": instance,
        "its closure under the rules": closure(instance, rules),
        "a tag with a literal carrier": Graph(
            [
                Triple(iri(EX + "t"), iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), iri(EX + "PersonnelTag")),
                Triple(iri(EX + "t"), iri(EX + "carriedBy"), lit("alex")),
            ]
        ),
        "an unknown predicate": Graph([Triple(iri(EX + "a"), iri(EX + "nosuch"), iri(EX + "b"))]),
    }
    for label, graph in cases.items():
        direct = validate_graph(graph, doc)
        via_schema = is_instance(graph, schema)
        print(f"  {label:32s} shapes say {str(direct):5s}  schema says {str(via_schema):5s}")


if __name__ == "__main__":
    main()
