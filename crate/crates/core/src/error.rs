use thiserror::Error;

use crate::family::SubsetMask;

/// Errors raised by family construction, checking and search.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ground set size {0} outside the supported range 1..=24")]
    GroundSize(u32),

    #[error("element {element} outside the ground set [1, {n}]")]
    Element { element: u32, n: u32 },

    #[error("mask {mask:#x} does not fit a ground set of size {n}")]
    MaskRange { mask: u32, n: u32 },

    #[error("element {0} repeated inside a set")]
    RepeatedElement(u32),

    #[error("set {0} appears more than once in the family")]
    DuplicateSet(SubsetMask),

    #[error("ground set mismatch: {0} vs {1}")]
    GroundMismatch(u32, u32),

    #[error("k = {0} outside the supported range 2..=7")]
    KRange(u32),

    #[error("family is not {k}-wise intersecting")]
    NotIntersecting { k: u32 },

    #[error("family is not maximal {k}-wise intersecting: {addable} can be added")]
    NotMaximal { k: u32, addable: SubsetMask },

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("operation undefined on the empty family")]
    EmptyFamily,

    #[error("clique size {0} outside the supported range 2..=8")]
    CliqueSize(usize),

    #[error("invalid certificate: {0}")]
    Certificate(String),

    #[error("worker pool: {0}")]
    Workers(String),

    #[error("n = {n} exceeds the limit {max} for {what}")]
    TooLarge { what: &'static str, n: u32, max: u32 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
