//! Transcript metrics: word error rate, Jaro-Winkler similarity, proper-noun
//! scoring over aligned named entities, and length-weighted aggregation.

mod aggregate;
mod align;
mod entities;
mod jaro;
mod matcher;

pub use aggregate::{weighted_average, EvalReport, EvalRow, MetricAggregates};
pub use align::{word_align, wer, AlignOp, EditAlignment};
pub use entities::{
    align_entities, parse_entity_records, pn_score, write_entity_records, EntityAlignment, EntityRecord, EntitySpan,
    EntityType, ExternalTagger, LexicalMetric, PnScore, DEFAULT_SIM_THRESHOLD,
};
pub use jaro::{jaro, jaro_winkler};
pub use matcher::{matching_blocks, opcodes, Block, Opcode, OpcodeTag};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("metrics: reference is empty, WER is undefined")]
    EmptyReference,
    #[error("metrics: {scores} scores but {lengths} lengths")]
    LengthMismatch { scores: usize, lengths: usize },
    #[error("metrics: length at index {index} is not positive ({value})")]
    NonPositiveLength { index: usize, value: f64 },
    #[error("metrics: nothing to average")]
    EmptyAggregate,
    #[error("metrics: invalid entity span: {0}")]
    InvalidSpan(String),
    #[error("metrics: entity file line {line}: {msg}")]
    EntitySyntax { line: usize, msg: String },
    #[error("metrics: external tagger failed: {0}")]
    Tagger(String),
    #[error("metrics: {0}")]
    Io(#[from] std::io::Error),
}
