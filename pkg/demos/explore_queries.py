#!/usr/bin/env python3
"""Walkthrough: query and cluster a built review graph.

Builds the demo graph in memory, then runs the pre-designed clusterings
and a few user queries against it.
"""

from pathlib import Path

from litgraph import (
    KeywordTaxonomyEnricher,
    KnowledgeGraph,
    SearchSpec,
    cluster_by,
    execute,
    fixture_registry,
    load_taxonomy,
    parse_query,
    parse_search_expr,
    run_review,
)

HERE = Path(__file__).resolve().parent

registry = fixture_registry(HERE / "corpus")
spec = SearchSpec(
    expr=parse_search_expr("context-awareness AND automation systems"),
    year_from=2016,
    year_to=2022,
    sources=frozenset(registry.ids()),
)
enricher = KeywordTaxonomyEnricher(load_taxonomy(HERE / "taxonomy.json"))
kg = KnowledgeGraph()
run_review(spec, registry, enricher, kg)

# The three pre-designed clusterings.
for dimension in ("field", "year", "database"):
    clusters = cluster_by(kg, dimension)
    sizes = {key: len(members) for key, members in clusters.clusters.items()}
    print(f"cluster by {dimension}: {sizes}")

# User queries: most-cited publications first.
table = execute(kg, parse_query("FIND PUBLICATIONS ORDER BY citations DESC LIMIT 5"))
print("\ntop cited:")
for row in table.rows:
    print(f"  {row['citations']:>3}  {row['title']}")

# Attribute filters compose with AND/OR and parentheses.
queries = [
    'FIND PUBLICATIONS WHERE year >= 2020 AND field = "predictive maintenance" LIMIT 3',
    'FIND PUBLICATIONS WHERE author CONTAINS "keller" ORDER BY year ASC LIMIT 3',
    'FIND PUBLICATIONS WHERE keyword = "context-awareness" AND citations > 20 LIMIT 3',
]
for text in queries:
    table = execute(kg, parse_query(text))
    print(f"\n{text}\n  -> {len(table.rows)} rows")
    for row in table.rows:
        print(f"     {row['year']}  {row['title'][:60]}")
