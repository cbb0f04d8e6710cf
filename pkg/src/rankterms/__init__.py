"""Re-rank topic-model word lists and evaluate the rankings by retrieval."""

from .coherence import (
    CoocStats,
    build_cooc,
    coherence_by_count,
    model_coherence,
    npmi,
    select_topic_count,
    topic_coherence,
    topic_coherences,
    uci_pmi,
)
from .corpus import (
    Corpus,
    Document,
    RawDocument,
    Vocabulary,
    build_corpus,
    load_corpus,
    load_stopwords,
    read_jsonl,
    save_corpus,
    tokenize,
)
from .evaluation import (
    CellResult,
    EvalReport,
    GoldLabelSet,
    LabelResult,
    average_precision,
    map_gold_to_topic,
    pearson,
    run_ir_eval,
    select_top_gold,
    truncate_labels,
    with_truncated_labels,
    write_qrels,
)
from .index import (
    BM25Params,
    InvertedIndex,
    Query,
    bm25_score,
    build_index,
    idf,
    search,
    write_run,
)
from .model import (
    GibbsConfig,
    TopicModel,
    export_model,
    import_model,
    load_model,
    train_lda,
)
from .rerank import (
    RankedTopic,
    RankedWord,
    RankingMethod,
    method_scores,
    rerank_all,
    rerank_topic,
    score_idf,
    score_norm,
    score_orig,
    score_tfidf,
)

__version__ = "0.1.0"

__all__ = [
    "BM25Params",
    "CellResult",
    "CoocStats",
    "Corpus",
    "Document",
    "EvalReport",
    "GibbsConfig",
    "GoldLabelSet",
    "InvertedIndex",
    "LabelResult",
    "Query",
    "RankedTopic",
    "RankedWord",
    "RankingMethod",
    "RawDocument",
    "TopicModel",
    "Vocabulary",
    "average_precision",
    "bm25_score",
    "build_cooc",
    "build_corpus",
    "build_index",
    "coherence_by_count",
    "export_model",
    "idf",
    "import_model",
    "load_corpus",
    "load_model",
    "load_stopwords",
    "map_gold_to_topic",
    "method_scores",
    "model_coherence",
    "npmi",
    "pearson",
    "read_jsonl",
    "rerank_all",
    "rerank_topic",
    "run_ir_eval",
    "save_corpus",
    "score_idf",
    "score_norm",
    "score_orig",
    "score_tfidf",
    "search",
    "select_top_gold",
    "select_topic_count",
    "tokenize",
    "topic_coherence",
    "topic_coherences",
    "train_lda",
    "truncate_labels",
    "uci_pmi",
    "with_truncated_labels",
    "write_qrels",
    "write_run",
]
