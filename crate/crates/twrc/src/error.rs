//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by rate functions, region predicates, the gap certifier and
/// the protocol simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An SNR value was negative, NaN or infinite.
    #[error("SNR must be finite and non-negative, got {0}")]
    InvalidSnr(f64),

    /// A rate-tuple component was negative, NaN or infinite.
    #[error("rate components must be finite and non-negative, got {0}")]
    InvalidRate(f64),

    /// A function requiring the canonical power order was called with p1 > p2.
    #[error("power order violated: expected p1 <= p2, got p1={p1}, p2={p2}")]
    PowerOrder { p1: f64, p2: f64 },

    /// A time-sharing fraction was outside [0, 1].
    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaRange(f64),

    /// A tuple handed to the certifier lies outside the MAC-phase outer bound.
    #[error("tuple outside the MAC-phase outer bound: violated \"{constraint}\" (slack {slack})")]
    OutsideOuterMa { constraint: String, slack: f64 },

    /// Genie-mode simulation was requested at an operating point outside the
    /// EER-BR MAC-phase region.
    #[error("operating point outside the EER-BR MAC-phase region: violated \"{constraint}\" (slack {slack})")]
    OutsideEerMa { constraint: String, slack: f64 },

    /// The fixed components of a slice already violate the outer bound.
    #[error("slice is empty: fixed components violate the outer bound at \"{constraint}\" (slack {slack})")]
    EmptySlice { constraint: String, slack: f64 },

    /// Two lattice words with different (q, n) were combined.
    #[error("lattice word mismatch: ({q_a}, {n_a}) vs ({q_b}, {n_b})")]
    WordMismatch { q_a: u32, n_a: usize, q_b: u32, n_b: usize },

    /// A lattice symbol was outside {0, .., q-1} or q < 2 or n = 0.
    #[error("invalid lattice word: {0}")]
    InvalidWord(String),

    /// A message does not fit its declared bit width or the lattice codebook.
    #[error("message {message} does not fit {context}")]
    MessageRange { message: u64, context: String },

    /// A bit width exceeds what the desk-scale integer pipeline supports.
    #[error("bit width {bits} exceeds the supported maximum of {max} bits")]
    WidthOverflow { bits: u32, max: u32 },

    /// A scalar parameter failed validation (trial counts, resolutions, ...).
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}
