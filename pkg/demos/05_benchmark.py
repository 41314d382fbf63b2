#!/usr/bin/env python3
"""A desk-scale rerun of the two scalability experiments.

The first sweep compares the rewriting-based and critical-instance routes
while the schema grows (predicates at 1.5x the schema size, IRI and literal
vocabularies tracking it, four chain rules of length two). The second fixes
a 100-pattern schema with twenty rules and scales the number of existential
rules. Sizes are kept small enough to finish in about a minute; pass
--full to use the larger sizes, with a 60-second budget per run.

Writes fig2a.csv / fig2b.csv next to this script.
"""

from __future__ import annotations

import sys
from pathlib import Path

from schemaforge.bench import run_benchmark, write_csv

HERE = Path(__file__).resolve().parent


def sweep_a(sizes: list[int], budget: float) -> None:
    points = [
        {
            "schema_size": size,
            "p_count": round(1.5 * size),
            "u_count": size,
            "l_count": size,
        }
        for size in sizes
    ]
    base = {
        "pi_c": 0.1,
        "p_count": 15,
        "u_count": 10,
        "l_count": 10,
        "schema_size": 10,
        "rule_count": 4,
        "existential_count": 0,
        "antecedent_len": 2,
        "seed": 1,
    }
    records = run_benchmark(
        base, points, algorithms=("score", "critical"), modes=("simple",),
        budget_seconds=budget, repetitions=1,
    )
    write_csv(records, str(HERE / "fig2a.csv"))
    print("schema-size sweep (simple consequence):")
    for record in records:
        status = "timeout" if record.timed_out else f"{record.time_ms:9.1f} ms"
        print(f"  size {record.schema_size:3d}  {record.algo:8s} {status}")


def sweep_b(counts: list[int], budget: float) -> None:
    base = {
        "pi_c": 0.1,
        "p_count": 110,
        "u_count": 100,
        "l_count": 100,
        "schema_size": 100,
        "rule_count": 20,
        "existential_count": 0,
        "antecedent_len": 2,
        "seed": 1,
    }
    points = [{"existential_count": n} for n in counts]
    records = run_benchmark(
        base, points, algorithms=("score",), modes=("simple", "existential"),
        budget_seconds=budget, repetitions=1,
    )
    write_csv(records, str(HERE / "fig2b.csv"))
    print("existential-rule sweep (score):")
    for record in records:
        status = "timeout" if record.timed_out else f"{record.time_ms:9.1f} ms"
        print(
            f"  existentials {record.existential_count:3d}  {record.mode:12s} {status}"
            + (f"  ({record.violated_count} violated)" if record.mode == "existential" else "")
        )


def main() -> None:
    full = "--full" in sys.argv
    if full:
        sweep_a([10, 20, 30, 45, 60, 80, 100], budget=60.0)
        sweep_b([0, 10, 20, 30, 40, 50], budget=60.0)
    else:
        sweep_a([6, 10, 14, 18], budget=20.0)
        sweep_b([0, 10, 25, 50], budget=20.0)
    print("CSV written next to this script.")


if __name__ == "__main__":
    main()
