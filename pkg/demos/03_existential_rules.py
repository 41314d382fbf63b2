#!/usr/bin/env python3
"""How a constraint violation is found without enumerating instances.

The interesting machinery sits behind one question: can the closure of
*some* instance of the schema break an if-then constraint? The search works
backwards from the rule that could trigger the constraint, unfolds its
antecedent through the other rules (backward rewriting), grounds each
unfolding into a minimal candidate instance, completes it with the chase so
it satisfies all constraints up front, and only then runs the closure
forward to check.

This script surfaces each of those steps on the mining example.
"""

from __future__ import annotations

from pathlib import Path

from schemaforge import (
    FreshNames,
    chase_existentials,
    closure,
    is_instance,
    retained_existentials,
    rewrite_antecedents,
    violations,
)
from schemaforge.formats import parse_rules, parse_schema, triple_str

DATA = Path(__file__).resolve().parent / "data"


def main() -> None:
    schema, _ = parse_schema((DATA / "mine.schema.txt").read_text(), "mine.schema.txt")
    rules, _ = parse_rules((DATA / "mine.rules.rq").read_text(), "mine.rules.rq")
    r1, r2, r3 = rules

    print("== backward rewriting of r3's antecedent ==")
    print("r3 fires on located-in plus off-limit facts, which only r1 and r2 produce;")
    print("unfolding both reaches raw sensor data:\n")
    for rewriting in rewrite_antecedents(r3, rules):
        print(f"  depth {rewriting.depth}:")
        for t in sorted(rewriting.antecedent, key=lambda t: t.sort_key()):
            print(f"    {triple_str(t, {})}")

    print("== the chase completes candidate instances ==")
    from schemaforge import Graph, Triple, iri

    tag = iri("http://example.org/mine#t1")
    personnel = iri("http://example.org/mine#PersonnelTag")
    rdf_type = iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
    bare = Graph([Triple(tag, rdf_type, personnel)])
    chased = chase_existentials(bare, schema.existentials, FreshNames())
    print("a bare personnel tag is not an instance (no carrier on record);")
    print("the chase invents the required witness:")
    for t in chased.sorted_triples():
        print(f"  {triple_str(t, {})}")
    print(f"chased graph is an instance: {is_instance(chased, schema)}")

    print("\n== the full verdict ==")
    report = retained_existentials(schema, rules)
    for violation in report.violated:
        print(f"violated via {violation.via_rule}:")
        print(f"  {triple_str(violation.rule.antecedent, {})} => {triple_str(violation.rule.consequent, {})}")
        witness = violation.witness
        print(f"  witness ({len(witness)} triples) is an instance: {is_instance(witness, schema)}")
        print(f"  violations before closure: {len(violations([violation.rule], witness))}")
        closed = closure(witness, rules)
        print(f"  violations after closure:  {len(violations([violation.rule], closed))}")


if __name__ == "__main__":
    main()
