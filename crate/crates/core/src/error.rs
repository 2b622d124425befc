use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("vocabulary is empty after normalization")]
    EmptyVocabulary,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("empty occurrence matrix")]
    EmptyOccurrenceMatrix,
    #[error("invalid occurrence matrix: {0}")]
    InvalidOccurrence(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid similarity matrix: {0}")]
    InvalidSimilarity(String),
    #[error("unknown term `{0}`")]
    UnknownTerm(String),
    #[error("duplicate term id `{0}`")]
    DuplicateTerm(String),
    #[error("is_a target `{parent}` of `{child}` is not a known term")]
    UnknownParent { child: String, parent: String },
    #[error("is_a cycle through `{0}`")]
    Cycle(String),
    #[error("wang decay weight {0} is outside (0, 1)")]
    InvalidDecay(f64),
    #[error("rank correlation needs two vectors of equal length >= 3 (got {left} and {right})")]
    CorrelationLength { left: usize, right: usize },
    #[error("constant input vector: rank correlation undefined")]
    ConstantInput,
    #[error("no non-co-occurring pairs")]
    NoNonCooccurringPairs,
    #[error("fewer than 3 common pairs ({0})")]
    TooFewPairs(usize),
    #[error("no co-occurrence counts to train on")]
    EmptyCooccurrence,
    #[error("non-finite training loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("no term has an in-vocabulary word")]
    NoEmbeddableTerms,
    #[error("planted graph has no edges")]
    NoPlantedEdges,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
