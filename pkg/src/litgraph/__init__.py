"""litgraph: partially automated literature reviews over a property graph.

Pipeline: boolean search over pluggable sources -> record extraction
and filtering -> deterministic keyword extraction and field
classification -> merge into a labelled property graph -> query,
cluster, export, and evaluate against a manual benchmark.
"""

from .search import (
    And,
    BooleanExpr,
    DocumentText,
    Or,
    SearchSpec,
    Term,
    matches,
    parse_search_expr,
    render_search_expr,
    validate_spec,
)
from .acquisition import (
    AcquisitionResult,
    FixtureConnector,
    PublicationRecord,
    PubType,
    SourceDescriptor,
    SourceRegistry,
    apply_criteria,
    build_request,
    extract_record,
    fixture_registry,
    run_acquisition,
)
from .textproc import (
    CleanedText,
    Enrichment,
    KeywordTaxonomyEnricher,
    Taxonomy,
    classify_field,
    clean_text,
    extract_keywords,
    load_taxonomy,
)
from .graph import (
    EdgeLabel,
    KnowledgeGraph,
    NodeLabel,
    UpsertOutcome,
    dedup_key,
    export_csv,
    graph_stats,
    import_csv,
    isomorphic,
)
from .queries import ClusterSet, ResultTable, cluster_by, execute, parse_query, render_query
from .evaluation import (
    BenchmarkSet,
    EvalReport,
    build_report,
    classification_agreement,
    extraction_recall,
    load_benchmark,
    render_report,
)
from .pipeline import RunSummary, run_review

__version__ = "0.1.0"
