#!/usr/bin/env python3
"""Regenerate the demo corpus, taxonomy, and benchmark under demos/.

Fully deterministic (fixed seed). Sizes per source are 45/53/29/17/9;
every record contains both demo search phrases and a year in 2016-2022,
so the demo search retains all of them. The benchmark is crafted so
db5 scores 100%/100%, db4 has no entries (N/A), and the pooled TOTAL
differs from the per-source mean. Run from the repo root:

    python scripts/make_demo_corpus.py
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from litgraph.acquisition import default_descriptors, extract_record  # noqa: E402
from litgraph.graph import dedup_key  # noqa: E402
from litgraph.textproc import Taxonomy, classify_field, load_taxonomy  # noqa: E402

DEMOS = ROOT / "demos"
CORPUS = DEMOS / "corpus"

SIZES = {"db1": 45, "db2": 53, "db3": 29, "db4": 17, "db5": 9}

TAXONOMY = {
    "default_label": "unclassified",
    "fields": [
        {
            "label": "predictive maintenance",
            "indicators": [
                {"phrase": "predictive maintenance", "weight": 2.0},
                {"phrase": "condition monitoring", "weight": 1.5},
                {"phrase": "remaining useful life", "weight": 1.0},
            ],
        },
        {
            "label": "human-robot collaboration",
            "indicators": [
                {"phrase": "human-robot collaboration", "weight": 2.0},
                {"phrase": "collaborative robot", "weight": 1.5},
                {"phrase": "operator assistance", "weight": 1.0},
            ],
        },
        {
            "label": "energy management",
            "indicators": [
                {"phrase": "energy management", "weight": 2.0},
                {"phrase": "energy efficiency", "weight": 1.0},
                {"phrase": "load forecasting", "weight": 1.0},
            ],
        },
        {
            "label": "process control",
            "indicators": [
                {"phrase": "process control", "weight": 2.0},
                {"phrase": "adaptive control", "weight": 1.0},
                {"phrase": "control loop reconfiguration", "weight": 1.0},
            ],
        },
        {
            "label": "smart manufacturing",
            "indicators": [
                {"phrase": "smart manufacturing", "weight": 2.0},
                {"phrase": "production planning", "weight": 1.0},
                {"phrase": "digital twin", "weight": 1.0},
            ],
        },
    ],
}

FIELD_PHRASES = {
    "predictive maintenance": [
        "predictive maintenance",
        "condition monitoring",
        "remaining useful life",
    ],
    "human-robot collaboration": [
        "human-robot collaboration",
        "collaborative robot",
        "operator assistance",
    ],
    "energy management": ["energy management", "energy efficiency", "load forecasting"],
    "process control": ["process control", "adaptive control"],
    "smart manufacturing": ["smart manufacturing", "production planning", "digital twin"],
}

TOPICS = [
    "cyber-physical production cells",
    "industrial sensor networks",
    "reconfigurable assembly lines",
    "distributed plant supervision",
    "autonomous intralogistics",
    "machine tool fleets",
    "building automation",
    "electric drive systems",
    "packaging machinery",
    "water treatment plants",
    "additive manufacturing setups",
    "warehouse robotics",
]

METHODS = [
    "ontology-driven reasoning",
    "rule-based situation assessment",
    "graph-structured context models",
    "key-value context representation",
    "probabilistic state estimation",
    "event-driven architectures",
    "multi-agent coordination",
    "semantic middleware",
]

FIRST = ["A.", "B.", "C.", "D.", "E.", "F.", "G.", "H.", "J.", "K.", "L.", "M."]
LAST = [
    "Keller", "Novak", "Ortiz", "Hansen", "Weber", "Sato", "Lindgren", "Moreau",
    "Petrov", "Okafor", "Silva", "Zhang", "Haddad", "Kovacs", "Rinaldi", "Byrne",
]

FILLERS = [
    "The evaluation covers deployment experience collected over several months.",
    "A prototype demonstrates feasibility on realistic workloads.",
    "Results indicate reduced engineering effort compared with static configurations.",
    "Limitations and open integration questions are discussed.",
    "The study reports lessons learned from an industrial pilot.",
    "A comparison with baseline setups highlights runtime adaptation benefits.",
]

PUB_TYPES = ["journal", "conference", "book_chapter", "other"]


def make_items(rng: random.Random, taxonomy: Taxonomy) -> dict[str, list[dict]]:
    labels = list(FIELD_PHRASES)
    corpus: dict[str, list[dict]] = {}
    serial = 0
    for sid, size in SIZES.items():
        items = []
        for i in range(size):
            serial += 1
            topic = TOPICS[serial % len(TOPICS)]
            method = METHODS[serial % len(METHODS)]
            year = 2016 + serial % 7
            # roughly one record in six stays unclassified
            label = None if serial % 6 == 0 else labels[serial % len(labels)]
            title = f"Context-awareness for {topic}: study {serial}"
            sentences = [
                f"We investigate context-awareness in automation systems for {topic}.",
                f"The approach builds on {method} to capture operating context.",
            ]
            if label is not None:
                phrases = FIELD_PHRASES[label]
                sentences.append(
                    f"Context information supports {phrases[0]} in the evaluated plant."
                )
                if serial % 3 == 0 and len(phrases) > 1:
                    sentences.append(
                        f"A second study examines {phrases[1]} under changing loads."
                    )
            sentences.append(FILLERS[serial % len(FILLERS)])
            n_authors = 1 + serial % 3
            authors = [
                f"{FIRST[(serial + j) % len(FIRST)]} {LAST[(serial * 3 + j) % len(LAST)]}"
                for j in range(n_authors)
            ]
            item = {
                "title": title,
                "authors": authors,
                "abstract": " ".join(sentences),
                "year": year,
                "type": PUB_TYPES[serial % len(PUB_TYPES)],
                "keywords": sorted({"context-awareness", topic.split()[-1], method.split()[0]}),
                "citations": rng.choice([0, 1, 2, 3, 5, 8, 9, 13, 21, 34]),
                "url": f"https://example.org/{sid}/pub/{serial}",
            }
            if serial % 2 == 0:
                item["doi"] = f"10.5555/demo.{sid}.{serial}"
            items.append(item)
        corpus[sid] = items
    return corpus


# benchmark design per source: (manual size, hits, agreeing labels)
BENCH_DESIGN = {
    "db1": (20, 10, 8),  # recall 50%, agreement 80%
    "db2": (10, 9, 8),   # recall 90%, agreement 89%
    "db3": (8, 4, 4),    # recall 50%, agreement 100%
    "db4": (0, 0, 0),    # N/A, N/A
    "db5": (9, 9, 9),    # recall 100%, agreement 100%
}


def make_benchmark(
    corpus: dict[str, list[dict]], taxonomy: Taxonomy
) -> list[tuple[str, str, str]]:
    descriptors = {d.id: d for d in default_descriptors()}
    labels = list(FIELD_PHRASES)
    rows = []
    all_keys = set()
    for sid, items in corpus.items():
        manual_size, hits, agreeing = BENCH_DESIGN[sid]
        records = [extract_record(item, descriptors[sid]) for item in items]
        keys = [dedup_key(r) for r in records]
        all_keys.update(keys)
        assigned = {
            dedup_key(r): classify_field(r, taxonomy).label for r in records
        }
        for idx in range(hits):
            key = keys[idx]
            label = assigned[key]
            if idx >= agreeing:  # deliberate disagreement
                label = next(l for l in labels if l != assigned[key])
            rows.append((key, label, sid))
        for ghost in range(manual_size - hits):
            rows.append(
                (f"manual only {sid} entry {ghost}#2018", labels[ghost % len(labels)], sid)
            )
    assert len({r[0] for r in rows}) == len(rows), "benchmark keys must be unique"
    assert len(all_keys) == sum(SIZES.values()), "dedup keys must be globally unique"
    return rows


def main() -> None:
    rng = random.Random(20160422)
    CORPUS.mkdir(parents=True, exist_ok=True)

    taxonomy_path = DEMOS / "taxonomy.json"
    taxonomy_path.write_text(json.dumps(TAXONOMY, indent=2) + "\n", "utf-8")
    taxonomy = load_taxonomy(taxonomy_path)

    corpus = make_items(rng, taxonomy)
    for sid, items in corpus.items():
        path = CORPUS / f"{sid}.jsonl"
        path.write_text("\n".join(json.dumps(i) for i in items) + "\n", "utf-8")
        print(f"{path}: {len(items)} records")

    rows = make_benchmark(corpus, taxonomy)
    bench_path = DEMOS / "benchmark.csv"
    with open(bench_path, "w", encoding="utf-8", newline="") as f:
        f.write("dedup_key,field_label,source_id\n")
        for key, label, sid in rows:
            f.write(f'"{key}","{label}",{sid}\n')
    print(f"{bench_path}: {len(rows)} entries")


if __name__ == "__main__":
    main()
