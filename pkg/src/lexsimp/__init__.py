"""Lexical simplification with a masked language model.

Replace complex words in a sentence with simpler substitutes: identify
complex words, generate in-context candidates from a masked LM, rank
them with frequency/similarity/fluency features, and rewrite the
sentence word by word under an acceptance condition.
"""

from .core import (
    GenerationMode,
    PipelineConfig,
    SimplificationTrace,
    StepReason,
    Token,
    TokenizedSentence,
    TraceStep,
    detokenize,
    match_case,
    replace_token,
    tokenize,
    tokenize_whitespace,
)
from .cwi import (
    CapitalizationEntityRecognizer,
    ComplexityAnnotation,
    FrequencyComplexityScorer,
    detect_entities,
    score_complexity,
    select_complex_words,
)
from .evaluation import (
    GoldInstance,
    TsInstance,
    count_syllables,
    eval_pipeline,
    eval_pipeline_corpus,
    eval_sg,
    eval_sg_corpus,
    fres,
    load_ls_dataset,
    sari,
)
from .generation import (
    Candidate,
    CandidateSet,
    build_mask_input,
    generate_candidates,
    is_morphological_derivation,
)
from .mlm_backend import (
    MASK,
    MlmBackendError,
    MlmPrediction,
    MlmQuery,
    MockMlmBackend,
    SequenceTooLongError,
    TransformerMlmBackend,
    is_whole_word,
)
from .pipeline import (
    Resources,
    SimplifiedResult,
    simplify_batch,
    simplify_sentence,
    simplify_word,
)
from .ranking import (
    FEATURES,
    RankingTable,
    aggregate,
    feature_bert_order,
    feature_frequency,
    feature_lm_loss,
    feature_ppdb,
    feature_similarity,
    filter_by_frequency,
    mean_ranks,
)
from .resources import (
    EmbeddingStore,
    FrequencyStore,
    ParaphraseStore,
    ResourceFormatError,
    contains_pair,
    cosine,
    load_embeddings,
    load_frequencies,
    load_paraphrases,
    zipf,
)
from .stemming import porter_stem

__version__ = "0.1.0"

__all__ = [
    "GenerationMode", "PipelineConfig", "SimplificationTrace", "StepReason",
    "Token", "TokenizedSentence", "TraceStep", "detokenize", "match_case",
    "replace_token", "tokenize", "tokenize_whitespace",
    "CapitalizationEntityRecognizer", "ComplexityAnnotation",
    "FrequencyComplexityScorer", "detect_entities", "score_complexity",
    "select_complex_words",
    "GoldInstance", "TsInstance", "count_syllables", "eval_pipeline",
    "eval_pipeline_corpus", "eval_sg", "eval_sg_corpus", "fres",
    "load_ls_dataset", "sari",
    "Candidate", "CandidateSet", "build_mask_input", "generate_candidates",
    "is_morphological_derivation",
    "MASK", "MlmBackendError", "MlmPrediction", "MlmQuery", "MockMlmBackend",
    "SequenceTooLongError", "TransformerMlmBackend", "is_whole_word",
    "Resources", "SimplifiedResult", "simplify_batch", "simplify_sentence",
    "simplify_word",
    "FEATURES", "RankingTable", "aggregate", "feature_bert_order",
    "feature_frequency", "feature_lm_loss", "feature_ppdb",
    "feature_similarity", "filter_by_frequency", "mean_ranks",
    "EmbeddingStore", "FrequencyStore", "ParaphraseStore",
    "ResourceFormatError", "contains_pair", "cosine", "load_embeddings",
    "load_frequencies", "load_paraphrases", "zipf",
    "porter_stem",
]
