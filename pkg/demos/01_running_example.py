#!/usr/bin/env python3
"""The mine-monitoring story, end to end.

A mine collects sensor observations (CO level detectors and RFID readers)
and keeps a registry of personnel tags. Its schema says, among other
things, that every personnel tag has a carrier on record. Separately, a
rule engineer ships three inference rules: detected RFIDs are personnel
tags located where they were sensed, high-CO rooms are off-limit, and
anyone located in an off-limit room is trespassing.

This script loads the shipped fixture files and walks through the
question the library answers: which constraints can those rules break,
and what does the evolved schema look like?
"""

from __future__ import annotations

from pathlib import Path

from schemaforge import (
    closure,
    is_instance,
    retained_existentials,
    simple_schema_consequence,
    violations,
)
from schemaforge.formats import (
    parse_graph,
    parse_rules,
    parse_schema,
    serialize_schema,
)

DATA = Path(__file__).resolve().parent / "data"


def main() -> None:
    schema, prefixes = parse_schema((DATA / "mine.schema.txt").read_text(), "mine.schema.txt")
    rules, rule_prefixes = parse_rules((DATA / "mine.rules.rq").read_text(), "mine.rules.rq")
    instance, _ = parse_graph((DATA / "mine.instance.nt").read_text(), "mine.instance.nt")
    prefixes.update(rule_prefixes)

    print("== the day's data is a valid instance of the schema ==")
    print(f"instance has {len(instance)} triples; valid: {is_instance(instance, schema)}")

    print("\n== closing it under the rules breaks the schema ==")
    closed = closure(instance, rules)
    new = closed.triples - instance.triples
    print(f"closure adds {len(new)} facts:")
    for t in sorted(new, key=lambda t: t.sort_key()):
        print(f"  + {t!r}")
    print(f"still a valid instance? {is_instance(closed, schema)}")
    (violation,) = violations(schema.existentials, closed)
    print(f"violated carrier requirement for: {violation.mapping!r}")

    print("\n== the library predicts this without seeing any instance ==")
    report = retained_existentials(schema, rules)
    for v in report.violated:
        print(f"rule {v.via_rule} can violate: {v.rule.antecedent!r} => {v.rule.consequent!r}")
        print("minimal witness instance:")
        for t in v.witness.sorted_triples():
            print(f"  {t!r}")

    print("\n== and computes the evolved schema ==")
    evolved = simple_schema_consequence(schema, rules)
    print(serialize_schema(evolved, prefixes))


if __name__ == "__main__":
    main()
