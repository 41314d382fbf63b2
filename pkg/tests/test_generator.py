"""Generator invariants and benchmark harness behaviour."""

from __future__ import annotations

import pytest

from schemaforge import SchemaError
from schemaforge.bench import BenchRecord, records_to_csv, run_benchmark
from schemaforge.generator import GeneratorConfig, generate
from schemaforge.terms import pattern_vars


def config(**overrides) -> GeneratorConfig:
    base = dict(
        pi_c=0.1,
        p_count=15,
        u_count=10,
        l_count=10,
        schema_size=10,
        rule_count=4,
        existential_count=2,
        antecedent_len=2,
        seed=42,
    )
    base.update(overrides)
    return GeneratorConfig(**base)


def test_generator_is_deterministic():
    first = generate(config())
    second = generate(config())
    assert first[0] == second[0]
    assert first[1] == second[1]
    different = generate(config(seed=43))
    assert different[0] != first[0] or different[1] != first[1]


def test_generated_rules_are_chains():
    _, rules = generate(config(antecedent_len=3, rule_count=6))
    for rule in rules:
        (head,) = rule.sorted_consequent()
        antecedent = rule.sorted_antecedent()
        assert len(antecedent) == 3
        # reconstruct the chain: objects join the next subject
        by_subject = {t.s: t for t in antecedent}
        start = [t for t in antecedent if t.s == head.s]
        assert len(start) == 1
        chain = [start[0]]
        while len(chain) < len(antecedent):
            chain.append(by_subject[chain[-1].o])
        assert chain[-1].o == head.o
        assert head.p not in {t.p for t in antecedent}


def test_exact_sizes_and_delta():
    schema, rules = generate(config(schema_size=9, rule_count=5, existential_count=3))
    assert len(schema.graph) == 9
    assert len(rules) == 5
    assert len(schema.existentials) == 3
    subject_vars = {t.s.lexical for t in schema.graph if t.s.is_variable}
    assert schema.no_literal == subject_vars  # objects stay literal-permitting


def test_zero_constant_probability_means_no_subject_object_constants():
    schema, rules = generate(config(pi_c=0.0))
    for t in schema.graph:
        assert t.s.is_variable and t.o.is_variable
    for rule in rules:
        for t in rule.antecedent:
            assert t.s.is_variable and t.o.is_variable


def test_existentials_drawn_from_rule_parts():
    schema, rules = generate(config(existential_count=4, rule_count=6))
    consequent_predicates = {t.p for r in rules for t in r.consequent}
    antecedent_predicates = {t.p for r in rules for t in r.antecedent}
    for e in schema.existentials:
        assert e.antecedent.p in consequent_predicates
        assert e.consequent.p in antecedent_predicates


def test_invalid_configs_rejected():
    with pytest.raises(SchemaError):
        config(pi_c=1.5)
    with pytest.raises(SchemaError):
        config(schema_size=0)
    with pytest.raises(SchemaError):
        config(p_count=2, antecedent_len=2)


def test_bench_records_reproducible_modulo_timing():
    base = dict(
        pi_c=0.1,
        p_count=8,
        u_count=5,
        l_count=5,
        schema_size=5,
        rule_count=2,
        existential_count=1,
        antecedent_len=2,
        seed=7,
    )
    first = run_benchmark(base, [{}], ["score"], ["simple", "existential"], budget_seconds=60)
    second = run_benchmark(base, [{}], ["score"], ["simple", "existential"], budget_seconds=60)

    def strip_timing(csv_text: str) -> str:
        lines = csv_text.splitlines()
        header = lines[0].split(",")
        drop = header.index("time_ms")
        return "\n".join(",".join(v for i, v in enumerate(line.split(",")) if i != drop) for line in lines)

    assert strip_timing(records_to_csv(first)) == strip_timing(records_to_csv(second))


def test_bench_timeout_is_recorded_not_fatal():
    base = dict(
        pi_c=0.1,
        p_count=60,
        u_count=40,
        l_count=40,
        schema_size=40,
        rule_count=4,
        existential_count=0,
        antecedent_len=2,
        seed=3,
    )
    records = run_benchmark(base, [{}], ["critical"], ["simple"], budget_seconds=0.05)
    (record,) = records
    assert record.timed_out
    assert record.time_ms >= 50.0  # the budget, in milliseconds


def test_empty_sweep_gives_header_only_csv():
    assert records_to_csv([]).strip().count("\n") == 0
    assert records_to_csv([]).startswith("seed,")
